use std::path::{Path, PathBuf};

use clap::ValueEnum;
use serde::{Deserialize, Serialize};

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentKind {
    /// Purity of the Haar toy model with exact, approximate and Hoeffding curves.
    ToyPurity,
    /// Mean and variance of the QAOA output purity over random angles.
    QaoaPurity,
    /// Statistics of ∂C/∂γ₁ and ∂C/∂α_L.
    QaoaGrad,
    /// Fidelity of the averaged QAOA output with the twirled-noise model.
    TwirlFidelity,
    /// Infidelity between noisy QAOA and QAOA with the Haar-twirled channel.
    HaarInfidelity,
    /// Noise coefficients ν, η, r, p_eff and the Hoeffding log range.
    Coeffs,
    /// Monte-Carlo check of the gradient-variance predictor (n ≤ 3).
    VarianceCheck,
}

impl ExperimentKind {
    pub fn name(self) -> &'static str {
        match self {
            ExperimentKind::ToyPurity => "toy-purity",
            ExperimentKind::QaoaPurity => "qaoa-purity",
            ExperimentKind::QaoaGrad => "qaoa-grad",
            ExperimentKind::TwirlFidelity => "twirl-fidelity",
            ExperimentKind::HaarInfidelity => "haar-infidelity",
            ExperimentKind::Coeffs => "coeffs",
            ExperimentKind::VarianceCheck => "variance-check",
        }
    }

    pub fn needs_graph(self) -> bool {
        matches!(
            self,
            ExperimentKind::QaoaPurity
                | ExperimentKind::QaoaGrad
                | ExperimentKind::TwirlFidelity
                | ExperimentKind::HaarInfidelity
        )
    }
}

/// Partially specified settings, as read from a JSON config file or from
/// command-line flags. Flags override the file.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Settings {
    pub experiment: Option<ExperimentKind>,
    pub n: Option<usize>,
    pub channel: Option<String>,
    pub graph: Option<String>,
    pub layers: Option<usize>,
    pub samples: Option<usize>,
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
    pub threads: Option<usize>,
    pub p_max: Option<f64>,
    pub ell: Option<usize>,
}

impl Settings {
    pub fn from_json_file(path: &Path) -> Result<Settings, CliError> {
        let text = std::fs::read_to_string(path)?;
        serde_json::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
    }

    /// Fields set in `over` win.
    pub fn overridden_by(self, over: Settings) -> Settings {
        Settings {
            experiment: over.experiment.or(self.experiment),
            n: over.n.or(self.n),
            channel: over.channel.or(self.channel),
            graph: over.graph.or(self.graph),
            layers: over.layers.or(self.layers),
            samples: over.samples.or(self.samples),
            seed: over.seed.or(self.seed),
            out: over.out.or(self.out),
            threads: over.threads.or(self.threads),
            p_max: over.p_max.or(self.p_max),
            ell: over.ell.or(self.ell),
        }
    }
}

/// A complete experiment description.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub experiment: ExperimentKind,
    pub n: Option<usize>,
    pub channel: String,
    pub graph: Option<String>,
    pub layers: usize,
    pub samples: usize,
    pub seed: u64,
    pub out: Option<PathBuf>,
    pub threads: Option<usize>,
    pub p_max: f64,
    pub ell: usize,
}

pub const DEFAULT_LAYERS: usize = 10;
pub const DEFAULT_SAMPLES: usize = 128;
pub const DEFAULT_P_MAX: f64 = 0.01;

impl ExperimentConfig {
    pub fn resolve(s: Settings) -> Result<ExperimentConfig, CliError> {
        let experiment = s
            .experiment
            .ok_or_else(|| CliError::Config("no experiment kind given".into()))?;
        let channel = s
            .channel
            .ok_or_else(|| CliError::Config("--channel is required".into()))?;
        if experiment.needs_graph() && s.graph.is_none() {
            return Err(CliError::Config(format!("{} needs --graph", experiment.name())));
        }
        if s.threads == Some(0) {
            return Err(CliError::Config("--threads must be at least 1".into()));
        }
        let cfg = ExperimentConfig {
            experiment,
            n: s.n,
            channel,
            graph: s.graph,
            layers: s.layers.unwrap_or(DEFAULT_LAYERS),
            samples: s.samples.unwrap_or(DEFAULT_SAMPLES),
            seed: s.seed.unwrap_or(0),
            out: s.out,
            threads: s.threads,
            p_max: s.p_max.unwrap_or(DEFAULT_P_MAX),
            ell: s.ell.unwrap_or(1),
        };
        if cfg.experiment != ExperimentKind::Coeffs && cfg.samples < 2 {
            return Err(CliError::Config("--samples must be at least 2".into()));
        }
        Ok(cfg)
    }
}
