//! Small dense LP and QP solvers.
//!
//! Both solvers work on dense row-major data and are sized for problems with
//! at most a few hundred variables. Every solve ends with an independent
//! residual computation against the original problem data, so callers can
//! rely on the reported feasibility figures.

mod lp;
mod qp;

pub use lp::{solve_lp, BoundedLp, LinearRow, LpSolution, LpStatus};
pub use qp::{solve_qp, BoxQp, QpSolution, QpStatus};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SolverError {
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("inconsistent bounds on variable {index}: {lower} > {upper}")]
    Bounds { index: usize, lower: f64, upper: f64 },
    #[error("quadratic term is not positive semidefinite (min eigenvalue {0:e})")]
    NotPsd(f64),
    #[error("linearly dependent equality rows")]
    DependentEqualities,
    #[error("iteration limit ({0}) reached")]
    IterationLimit(usize),
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}
