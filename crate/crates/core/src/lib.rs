//! Monte Carlo and multilevel Monte Carlo adequacy assessment for power systems.
//!
//! The crate is organised around a generic estimator ([`estimator`]) that
//! works on any hierarchy of models, plus two case studies built on it:
//!
//! * [`composite`]: snapshot adequacy of a transmission network (generation
//!   plus DC line-flow limits and line outages) paired with a single-node
//!   generation model;
//! * [`storage`]: year-long time-sequential simulation of a system with a
//!   heterogeneous storage fleet under several dispatch policies.
//!
//! [`experiment`] runs declarative experiment files and renders reports.

pub mod composite;
pub mod estimator;
pub mod experiment;
pub mod sampling;
pub mod solvers;
pub mod storage;
