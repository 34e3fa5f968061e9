//! Exact person-by-person dynamic programming for finite decentralized
//! stochastic control problems with T-step delayed sharing information
//! patterns.
//!
//! - [`model`]: problem instances, validation, random generation.
//! - [`info`]: common/private information components, canonical codes,
//!   strategies.
//! - [`filters`]: private and centralized information states and the
//!   brute-force joint-distribution oracle.
//! - [`solver`]: expected costs, best responses (DP and enumeration),
//!   person-by-person iteration and verification, grouped value tables.
//! - [`cli`]: the `pbp` command-line front end.

pub mod cli;
pub mod filters;
pub mod info;
pub mod model;
pub mod solver;

pub use filters::{CentralBeliefPi, CentralBeliefTheta, JointDistribution, PrivateBelief};
pub use info::{CommonInfo, InfoError, InfoSet, InfoStructure, JointStep, PrivateInfo, Strategy, StrategyTuple};
pub use model::{random_problem, validate_problem, Dims, ProblemSpec, ValidatedProblem, ValidationError};
pub use solver::{BestResponse, PbpResult, SolverError, ValueTable};

/// Tolerance used for every probability and value comparison.
pub const TOLERANCE: f64 = 1e-9;
