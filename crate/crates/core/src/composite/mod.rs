//! Snapshot adequacy of a transmission system.
//!
//! Two models share one sampled state (hour, generator and line statuses):
//! a network model that minimises curtailment under DC line-flow limits,
//! solved per electrical island, and a single-node model that ignores the
//! network. A capacity outage table gives the single-node expectations
//! exactly.

mod copt;
mod curtailment;
mod injection;
mod islands;
mod models;
mod network;

pub use copt::{copt_convolve, CapacityOutageTable, ConvolutionResult};
pub use curtailment::{
    evaluate_hl1, evaluate_hl2, measure_outputs, CurtailmentResult, Hl2Evaluator, IslandCurtailment,
    IslandMethod, CURTAILMENT_TOLERANCE,
};
pub use injection::{build_injection_matrix, InjectionMatrix};
pub use islands::island_decomposition;
pub use models::{build_composite_stack, CompositeModelId, CompositeSpace, Hl1Model, Hl2Model, EPNS, PLC};
pub use network::{Bus, Generator, Line, NetworkDescription, NETWORK_SCHEMA_VERSION};

pub(crate) use network::read_csv;

use std::path::PathBuf;

use thiserror::Error;

use crate::solvers::SolverError;

#[derive(Debug, Error)]
pub enum CompositeError {
    #[error("{0}: {1}")]
    Io(PathBuf, String),
    #[error("format: {0}")]
    Format(String),
    #[error("invalid network: {0}")]
    Invalid(String),
    #[error("island susceptance matrix is singular")]
    SingularNetwork,
    #[error("curtailment LP: {0}")]
    Solver(#[from] SolverError),
    #[error("curtailment LP returned {status} for hour {hour}")]
    Lp { status: String, hour: usize },
}
