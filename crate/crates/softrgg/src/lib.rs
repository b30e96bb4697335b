//! Experiment harness, file formats and command-line front end for
//! soft random geometric graphs. The algorithms live in `softrgg-core`.

pub mod config;
pub mod error;
pub mod harness;
pub mod io;

pub use config::{ExperimentConfig, GraphModel, PointModel, RegimeModel, RegimeShape, Statistic};
pub use error::{HarnessError, Result};
pub use harness::{load, merge, persist, run_experiment, ExperimentSummary, RunOutput, TrialRecord};
