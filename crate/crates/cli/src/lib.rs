//! Experiment orchestration for the online learning to rank simulator:
//! JSON configs, seeded repeated runs on a bounded worker pool, baseline
//! significance tests and CSV/JSON output.

pub mod config;
pub mod error;
pub mod experiment;
pub mod output;

pub use config::{load_config, save_config, Algorithm, Condition, DatasetSource, ExperimentConfig};
pub use error::{CliError, CliResult};
pub use experiment::{run_experiment, Experiment, ExperimentSummary, RunOptions};
pub use output::{emit_outputs, OutputPaths};

/// Environment variable holding the default worker count.
pub const WORKERS_ENV: &str = "OLTR_WORKERS";
