//! Declarative experiments: TOML configuration in, `results.json`,
//! `levels.csv` and `report.txt` out.
//!
//! A configuration names the study, the model stack (crudest first), the
//! estimator and the controller settings. Costs can be measured or fixed per
//! level; with fixed costs and one worker a run is reproducible bit for bit.

mod compare;
mod config;
mod format;
mod record;
mod run;

pub use compare::{compare_runs, Comparison, ComparisonRow};
pub use config::{
    ControllerConfig, EstimatorKind, ExperimentConfig, StackModels, Study, CONFIG_SCHEMA_VERSION,
};
pub use format::estimate_format;
pub use record::{
    sha256_hex, EstimateRow, FileHash, LevelContribution, LevelKind, LevelRow, ResultsRecord, VersionInfo, WallClock,
    RESULTS_SCHEMA_VERSION,
};
pub use run::{build_stack, data_hashes, default_data_dir, run_experiment, RunOptions, DATA_DIR_ENV};

use std::path::PathBuf;

use thiserror::Error;

use crate::composite::CompositeError;
use crate::estimator::EstimatorError;
use crate::storage::StorageError;

#[derive(Debug, Error)]
pub enum ExperimentError {
    #[error("{0}")]
    Io(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("invalid `{field}`: {message}")]
    Config { field: String, message: String },
    #[error(transparent)]
    Composite(#[from] CompositeError),
    #[error(transparent)]
    Storage(#[from] StorageError),
    #[error(transparent)]
    Estimator(#[from] EstimatorError),
    #[error("model failed on level {level}, sample {sample_index}: {message}{}", dump_note(.dump))]
    ModelFailure { level: usize, sample_index: u64, message: String, dump: Option<PathBuf> },
    #[error("compare: {0}")]
    Compare(String),
}

fn dump_note(dump: &Option<PathBuf>) -> String {
    dump.as_ref().map_or_else(String::new, |p| format!(" (state dump: {})", p.display()))
}
