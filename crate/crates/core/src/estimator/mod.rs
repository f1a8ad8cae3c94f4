//! Conventional and multilevel Monte Carlo estimation.
//!
//! The multilevel estimator writes the top-model expectation as a telescoping
//! sum of level contributions `E[X_l - X_{l-1}]`, each estimated from
//! independent level pairs. Sample counts per level are chosen to minimise
//! the estimator variance for a given computation time.

mod allocation;
mod controller;
mod estimate;
mod measures;
mod moments;
mod stack;

pub use allocation::{
    allocate, allocation_variance, optimal_allocation, optimal_variance, variance_floor, AllocationPlan,
};
pub use controller::{
    run_controller, ControllerOutput, ControllerSettings, LevelReport, RunRecord, Timing,
};
pub use estimate::{mc_estimate, mlmc_estimate, required_time, speed_metric, speedup, RiskEstimate};
pub use measures::{register_measures, MeasureId, MeasureSet};
pub use moments::{LevelStats, PairMoments};
pub use stack::{
    AnalyticLevel, JointSampler, LevelSampler, Model, ModelFailure, ModelStack, Pairing, StateSpace,
};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum EstimatorError {
    #[error("estimate undefined: no samples and no analytic term")]
    UndefinedEstimate,
    #[error("estimator variance unavailable (a sampled level has fewer than two samples)")]
    VarianceUnavailable,
    #[error("speed undefined: {0}")]
    UndefinedSpeed(&'static str),
    #[error("level {0} is missing from the level statistics")]
    MissingLevel(usize),
    #[error("allocation: {0}")]
    Allocation(String),
    #[error("every sampled level has zero variance; nothing to allocate")]
    ZeroVariance,
    #[error("duplicate measure identifier `{0}`")]
    DuplicateMeasure(MeasureId),
    #[error("no measures registered")]
    NoMeasures,
    #[error("unknown measure `{0}`")]
    UnknownMeasure(MeasureId),
    #[error("invalid controller settings: {0}")]
    InvalidSettings(String),
    #[error("model evaluation failed on level {level}, sample {sample_index}: {message}")]
    ModelFailure { level: usize, sample_index: u64, message: String },
}
