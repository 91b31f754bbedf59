use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use nibp_expt::{emit, run, CliError, ExperimentConfig, ExperimentKind, Settings};

/// Run a seeded noisy-circuit experiment and write its dataset as CSV.
///
/// Channels: `ad:<gamma>`, `depol:<p>`, `<spec>^<k>`. Graphs:
/// `reg:<n>:<d>:<seed>`, `er:<n>:<p>:<seed>`, `file:<path>`, `universal:<n>`.
#[derive(Debug, Parser)]
#[command(name = "nibp-expt", version)]
struct Cli {
    #[arg(value_enum)]
    experiment: ExperimentKind,
    /// Number of qubits; checked against the channel and graph.
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    channel: Option<String>,
    #[arg(long)]
    graph: Option<String>,
    /// Maximum depth L.
    #[arg(long)]
    layers: Option<usize>,
    #[arg(long)]
    samples: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// CSV output path; the manifest goes next to it.
    #[arg(long)]
    out: Option<PathBuf>,
    /// JSON file with the same keys as the flags; flags take precedence.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    threads: Option<usize>,
    /// Tail probability of the Hoeffding band (toy-purity).
    #[arg(long)]
    p_max: Option<f64>,
    /// Layer of the differentiated parameter (variance-check).
    #[arg(long)]
    ell: Option<usize>,
}

fn main_inner(cli: Cli) -> Result<(), CliError> {
    let base = match &cli.config {
        Some(path) => Settings::from_json_file(path)?,
        None => Settings::default(),
    };
    if base.experiment.is_some_and(|k| k != cli.experiment) {
        return Err(CliError::Config("config file names a different experiment".into()));
    }
    let flags = Settings {
        experiment: Some(cli.experiment),
        n: cli.n,
        channel: cli.channel,
        graph: cli.graph,
        layers: cli.layers,
        samples: cli.samples,
        seed: cli.seed,
        out: cli.out,
        threads: cli.threads,
        p_max: cli.p_max,
        ell: cli.ell,
    };
    let cfg = ExperimentConfig::resolve(base.overridden_by(flags))?;
    emit(&run(&cfg)?)
}

fn main() -> ExitCode {
    match main_inner(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
