use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::config::ExperimentConfig;
use crate::error::CliError;
use crate::spec::parse_channel_spec;
use nibp::toy::hoeffding_range;
use nibp::Channel;

/// Channel descriptors recorded alongside every run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DerivedConstants {
    pub p_eff: f64,
    pub r: f64,
    pub eta: f64,
    pub nu: f64,
    /// Log range of the per-layer purity ratio; absent for singular channels.
    pub r_ln: Option<f64>,
}

impl DerivedConstants {
    pub fn of(channel: &Channel) -> DerivedConstants {
        let c = channel.noise_coefficients();
        DerivedConstants {
            p_eff: c.p_eff,
            r: c.r,
            eta: c.eta,
            nu: c.nu,
            r_ln: hoeffding_range(channel).ok(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub config: ExperimentConfig,
    pub library_version: String,
    pub wall_time_s: f64,
    pub problem: Option<String>,
    pub constants: DerivedConstants,
}

pub const VERIFY_TOL: f64 = 1e-12;

impl RunManifest {
    /// Sidecar path for a CSV output: `run.csv` → `run.manifest.json`.
    pub fn path_for(csv: &Path) -> PathBuf {
        csv.with_extension("manifest.json")
    }

    pub fn load(path: &Path) -> Result<RunManifest, CliError> {
        let text = std::fs::read_to_string(path)?;
        serde_json::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
    }

    pub fn save(&self, path: &Path) -> Result<(), CliError> {
        let text = serde_json::to_string_pretty(self).map_err(|e| CliError::Config(e.to_string()))?;
        std::fs::write(path, text + "\n")?;
        Ok(())
    }

    /// Recomputes the derived constants from the echoed channel spec.
    pub fn verify(&self) -> Result<(), CliError> {
        let fresh = DerivedConstants::of(&parse_channel_spec(&self.config.channel)?);
        let stored = self.constants;
        let pairs = [
            ("p_eff", stored.p_eff, fresh.p_eff),
            ("r", stored.r, fresh.r),
            ("eta", stored.eta, fresh.eta),
            ("nu", stored.nu, fresh.nu),
        ];
        for (name, a, b) in pairs {
            let close = (a - b).abs() <= VERIFY_TOL;
            if !close {
                return Err(CliError::Numerical(format!("{name}: stored {a}, recomputed {b}")));
            }
        }
        match (stored.r_ln, fresh.r_ln) {
            (None, None) => Ok(()),
            (Some(a), Some(b)) if (a - b).abs() <= VERIFY_TOL => Ok(()),
            (a, b) => Err(CliError::Numerical(format!("r_ln: stored {a:?}, recomputed {b:?}"))),
        }
    }
}
