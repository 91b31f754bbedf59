use std::fmt::Write as _;
use std::time::Instant;

use nibp::pauli::{pauli_op, PauliIndex};
use nibp::qaoa::{
    derivative_statistics, haar_model_infidelity, purity_statistics, twirl_fidelity, universal_qaoa_instance,
    QaoaInstance,
};
use nibp::toy::{self, ToyModelConfig};
use nibp::{Channel, DensityMatrix};

use crate::config::{ExperimentConfig, ExperimentKind};
use crate::error::CliError;
use crate::manifest::{DerivedConstants, RunManifest};
use crate::spec::{parse_channel_spec, parse_problem_spec, Problem};

/// Everything a run produces; nothing is written to disk here.
#[derive(Debug, Clone)]
pub struct RunOutput {
    pub csv: String,
    /// Human-readable summary for stdout (used by `coeffs`).
    pub report: Option<String>,
    pub manifest: RunManifest,
}

fn csv_table(header: &str, rows: impl IntoIterator<Item = (usize, Vec<f64>)>) -> Result<String, CliError> {
    let mut out = String::from(header);
    out.push('\n');
    for (layer, values) in rows {
        write!(out, "{layer}").unwrap();
        for v in values {
            if !v.is_finite() {
                return Err(CliError::Numerical(format!("non-finite value at layer {layer}")));
            }
            write!(out, ",{v:.16e}").unwrap();
        }
        out.push('\n');
    }
    Ok(out)
}

fn check_qubits(cfg: &ExperimentConfig, found: usize, what: &str) -> Result<(), CliError> {
    match cfg.n {
        Some(n) if n != found => Err(CliError::Config(format!(
            "--n {n} but the {what} acts on {found} qubits"
        ))),
        _ => Ok(()),
    }
}

/// Runs `cfg` on a dedicated thread pool when `threads` is set, otherwise on
/// the global one. Output does not depend on the thread count.
pub fn run(cfg: &ExperimentConfig) -> Result<RunOutput, CliError> {
    match cfg.threads {
        Some(t) => rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build()
            .map_err(|e| CliError::Config(e.to_string()))?
            .install(|| run_here(cfg)),
        None => run_here(cfg),
    }
}

fn run_here(cfg: &ExperimentConfig) -> Result<RunOutput, CliError> {
    let start = Instant::now();
    let channel = parse_channel_spec(&cfg.channel)?;
    let mut problem_label = None;
    let mut report = None;
    let csv = if cfg.experiment.needs_graph() {
        let problem = parse_problem_spec(cfg.graph.as_deref().unwrap_or_default())?;
        check_qubits(cfg, problem.n_qubits(), "graph")?;
        if channel.n_qubits() != problem.n_qubits() {
            return Err(CliError::Config(format!(
                "channel acts on {} qubits, problem has {}; use `<spec>^{}`",
                channel.n_qubits(),
                problem.n_qubits(),
                problem.n_qubits()
            )));
        }
        problem_label = Some(match &problem {
            Problem::MaxCut(g) => format!("{} edges={:?}", g.label(), g.edges()),
            Problem::Universal(u) => format!("{u:?}"),
        });
        let inst = match problem {
            Problem::MaxCut(g) => QaoaInstance::maxcut(g, channel.clone(), cfg.layers)?,
            Problem::Universal(u) => universal_qaoa_instance(&u, channel.clone(), cfg.layers)?,
        };
        run_qaoa(cfg, &inst)?
    } else {
        check_qubits(cfg, channel.n_qubits(), "channel")?;
        match cfg.experiment {
            ExperimentKind::ToyPurity => run_toy(cfg, &channel)?,
            ExperimentKind::VarianceCheck => run_variance_check(cfg, &channel)?,
            _ => {
                let c = DerivedConstants::of(&channel);
                let r_ln = c.r_ln.unwrap_or(f64::NAN);
                report = Some(format!(
                    "nu = {:.16e}\neta = {:.16e}\nr = {:.16e}\np_eff = {:.16e}\nr_ln = {r_ln:.16e}\n",
                    c.nu, c.eta, c.r, c.p_eff
                ));
                format!(
                    "nu,eta,r,p_eff,r_ln\n{:.16e},{:.16e},{:.16e},{:.16e},{r_ln:.16e}\n",
                    c.nu, c.eta, c.r, c.p_eff
                )
            }
        }
    };
    Ok(RunOutput {
        csv,
        report,
        manifest: RunManifest {
            config: cfg.clone(),
            library_version: nibp::VERSION.to_string(),
            wall_time_s: start.elapsed().as_secs_f64(),
            problem: problem_label,
            constants: DerivedConstants::of(&channel),
        },
    })
}

fn run_toy(cfg: &ExperimentConfig, channel: &Channel) -> Result<String, CliError> {
    let n = channel.n_qubits();
    let rho = DensityMatrix::basis_state(n, 0)?;
    let model = ToyModelConfig::new(channel.clone(), rho.clone(), cfg.layers, cfg.samples, cfg.seed)?;
    let trace = toy::simulate(&model)?;
    let band = toy::hoeffding_band(channel, &rho, cfg.layers, cfg.p_max)?;
    let rows = (0..=cfg.layers)
        .map(|l| {
            let s = trace.summary(l);
            let exact = toy::exact_avg_purity(channel, &rho, l)?;
            let approx = toy::approx_avg_purity(channel, &rho, l);
            Ok((l, vec![s.mean, s.variance, exact, approx, band[l].0, band[l].1]))
        })
        .collect::<Result<Vec<_>, CliError>>()?;
    csv_table(
        "layer,mean_purity,var_purity,exact_pred,approx_pred,hoeffding_lo,hoeffding_hi",
        rows,
    )
}

/// Generator used by the variance check: Z on one qubit, otherwise X⊗Y⊗…,
/// scaled by 1/√2.
pub fn variance_generator(n: usize) -> Result<nibp::CMatrix, CliError> {
    let label = if n == 1 {
        "Z".to_string()
    } else {
        format!("X{}", "Y".repeat(n - 1))
    };
    Ok(pauli_op(PauliIndex::from_label(&label)?).unscale(2f64.sqrt()))
}

fn run_variance_check(cfg: &ExperimentConfig, channel: &Channel) -> Result<String, CliError> {
    let v = variance_generator(channel.n_qubits())?;
    if cfg.ell == 0 || cfg.ell > cfg.layers {
        return Err(CliError::Config(format!("need 1 <= ell <= layers (ell={})", cfg.ell)));
    }
    let rows = (cfg.ell..=cfg.layers)
        .map(|l| {
            // Disjoint RNG streams per depth.
            let offset = (l * cfg.samples) as u64;
            let c = toy::variance_mc_check(channel, &v, l, cfg.ell, cfg.samples, cfg.seed, offset)?;
            Ok((l, vec![c.mc_variance, c.mc_std_error, c.predicted]))
        })
        .collect::<Result<Vec<_>, CliError>>()?;
    csv_table("L,mc_variance,mc_std_error,predicted", rows)
}

fn run_qaoa(cfg: &ExperimentConfig, inst: &QaoaInstance) -> Result<String, CliError> {
    if cfg.layers == 0 && cfg.experiment != ExperimentKind::TwirlFidelity {
        return Err(CliError::Config("--layers must be at least 1".into()));
    }
    let (l_max, samples, seed) = (cfg.layers, cfg.samples, cfg.seed);
    match cfg.experiment {
        ExperimentKind::QaoaPurity => csv_table(
            "L,mean_purity,var_purity",
            purity_statistics(inst, l_max, samples, seed)?
                .into_iter()
                .map(|s| (s.layers, vec![s.mean, s.variance])),
        ),
        ExperimentKind::QaoaGrad => csv_table(
            "L,mean_abs_dgamma1,var_dgamma1,mean_abs_dalphaL,var_dalphaL",
            derivative_statistics(inst, l_max, samples, seed)?.into_iter().map(|s| {
                (
                    s.layers,
                    vec![
                        s.mean_abs_dgamma1,
                        s.var_dgamma1,
                        s.mean_abs_dalpha_last,
                        s.var_dalpha_last,
                    ],
                )
            }),
        ),
        ExperimentKind::TwirlFidelity => {
            let depths: Vec<usize> = (0..=l_max).collect();
            csv_table(
                "L,fidelity",
                twirl_fidelity(inst.hamiltonian(), inst.channel(), &depths, samples, seed)?
                    .into_iter()
                    .map(|t| (t.layers, vec![t.fidelity])),
            )
        }
        ExperimentKind::HaarInfidelity => csv_table(
            "L,mean_infidelity",
            haar_model_infidelity(inst, l_max, samples, seed)?
                .into_iter()
                .map(|s| (s.layers, vec![s.mean])),
        ),
        other => unreachable!("{} is not a QAOA experiment", other.name()),
    }
}

/// Writes the CSV to `cfg.out` plus a manifest next to it, or the CSV to
/// stdout when no output path is set.
pub fn emit(out: &RunOutput) -> Result<(), CliError> {
    if let Some(report) = &out.report {
        print!("{report}");
    }
    match &out.manifest.config.out {
        Some(path) => {
            if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
                std::fs::create_dir_all(dir)?;
            }
            std::fs::write(path, &out.csv)?;
            out.manifest.save(&RunManifest::path_for(path))?;
        }
        None if out.report.is_none() => print!("{}", out.csv),
        None => {}
    }
    Ok(())
}
