//! Random state generation for both case studies.

mod composite;
mod rng;
mod year;

pub use composite::{
    project_pattern1, sample_component_state, sample_hl1_state, sample_hl2_state, SystemStateHL1, SystemStateHL2,
};
pub use rng::{RngStream, StreamRng};
pub use year::{
    add_unit_trace, pattern2_pair, sample_year_state, ConventionalUnit, TraceLibrary, YearState, HOURS_PER_YEAR,
};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SamplingError {
    #[error("probability {0} outside [0, 1]")]
    Probability(f64),
    #[error("trace library is empty")]
    EmptyLibrary,
    #[error("trace {id} has {got} values, expected {expected}")]
    TraceLength { id: String, expected: usize, got: usize },
    #[error("{0}")]
    Io(String),
    #[error("format: {0}")]
    Format(String),
    #[error("{0}")]
    InvalidUnit(String),
}
