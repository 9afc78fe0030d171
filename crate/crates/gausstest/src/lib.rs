//! Truncated Fock-space simulation of bosonic states and property tests
//! of Gaussianity: copy-rotation tests, covariance-learning testers,
//! trace-distance bounds and a mixed-state hardness laboratory.

pub mod bounds;
pub mod estimators;
pub mod fock;
pub mod hardness;
pub mod linalg;
pub mod rotations;
pub mod sampling;
pub mod symplectic;

pub use fock::{FockIndex, MixedFockState, PureFockState};
pub use symplectic::GaussianState;

/// Library-wide error type.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid cutoff: {0}")]
    InvalidCutoff(String),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("invalid state: {0}")]
    InvalidState(String),
    #[error("leakage budget exceeded: achieved {achieved:.3e}, budget {budget:.3e}")]
    LeakageBudget { achieved: f64, budget: f64 },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("infeasible parameters: {0}")]
    Infeasible(String),
    #[error("dimension budget exceeded: requested {requested}, max {max}")]
    DimensionBudget { requested: usize, max: usize },
    #[error("numerical failure: {0}")]
    Numerical(String),
}

pub type Result<T> = std::result::Result<T, Error>;

/// Default leakage budget for operations that require accurate moments.
pub const LEAKAGE_BOUND: f64 = 1e-8;

/// Default cap on dense operator dimension (e.g. 16^3 for three copies of
/// one mode at cutoff 16).
pub const MAX_DENSE_DIM: usize = 4096;
