//! Year-long time-sequential adequacy with a storage fleet.
//!
//! All models consume the same sampled year (demand, wind and conventional
//! availability traces) and differ only in how storage is dispatched against
//! the resulting net margin.

mod convolution;
mod dispatch;
mod models;
mod peak_shave;
pub mod synthetic;
mod system;

pub use convolution::{convolve_level0, portfolio_table, AnnualRisk};
pub use dispatch::{
    curtail_trace, dispatch_average, dispatch_greedy, dispatch_greedy_detailed, dispatch_none, dispatch_optimal,
    dispatch_optimal_detailed, measure_outputs_annual, net_margin, time_to_go_order, UnitDispatch,
};
pub use models::{build_storage_stack, StorageModel, StorageModelId, YearSpace, EENS, LOLE};
pub use peak_shave::{mean_daily_profile, peak_shave_profile, PeakShaveProfile, HOURS_PER_DAY};
pub use system::{StorageSystem, StorageUnit, STORAGE_SCHEMA_VERSION};

use thiserror::Error;

use crate::sampling::SamplingError;
use crate::solvers::SolverError;

#[derive(Debug, Error)]
pub enum StorageError {
    #[error("{0}")]
    Io(String),
    #[error("format: {0}")]
    Format(String),
    #[error("invalid storage system: {0}")]
    Invalid(String),
    #[error("trace length {got}, expected {expected}")]
    Length { expected: usize, got: usize },
    #[error(transparent)]
    Sampling(#[from] SamplingError),
    #[error("peak-shaving program: {0}")]
    Solver(#[from] SolverError),
}
