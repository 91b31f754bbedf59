//! Seeded experiment runner: parses channel and graph specs, runs one of the
//! library's experiments, and emits a CSV plus a JSON run manifest.

pub mod config;
pub mod error;
pub mod experiments;
pub mod manifest;
pub mod spec;

pub use config::{ExperimentConfig, ExperimentKind, Settings};
pub use error::CliError;
pub use experiments::{emit, run, RunOutput};
pub use manifest::{DerivedConstants, RunManifest};
pub use spec::{parse_channel_spec, parse_graph_spec, parse_problem_spec, Problem};
