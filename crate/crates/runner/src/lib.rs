//! Experiment runner for the burgers3d verification harness.

// `!(x > 0.0)` style checks are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

use std::path::PathBuf;

pub mod artifacts;
pub mod config;
pub mod experiment;
pub mod experiments;
pub mod reanalysis;

pub use artifacts::{run_experiment, Artifacts, MemberReport, RunOptions, RunOutcome};
pub use config::{resolve_spec, validate_config, ExperimentSpec};
pub use experiment::{DynExperiment, Experiment, ExperimentRegistry};

#[derive(Debug, thiserror::Error)]
pub enum RunnerError {
    #[error("invalid configuration:\n  {}", .0.join("\n  "))]
    Config(Vec<String>),
    #[error("unknown experiment `{name}` (available: {available})")]
    UnknownExperiment { name: String, available: String },
    #[error(transparent)]
    Core(#[from] burgers3d::Error),
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: std::io::Error },
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
