//! Error type shared by every module of the crate.

use thiserror::Error;

/// Everything that can go wrong in an index, calculus or transport computation.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum MaslovError {
    /// A structural invariant (symplectic, unitary, Lagrangian, ...) failed.
    #[error("invariant violated: {what} (residual {residual:.3e})")]
    InvariantViolation { what: &'static str, residual: f64 },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    Dimension { expected: usize, found: usize },

    /// The pair handed to the transverse Leray formula is not transverse.
    #[error("lagrangians are not transverse (intersection dimension {dim})")]
    NotTransverse { dim: usize },

    /// A quantity that must be an integer was not within tolerance of one.
    #[error("numerical conditioning: {0}")]
    Conditioning(String),

    #[error("sampling refinement exhausted: {0}")]
    Sampling(String),

    /// The B-block of a symplectic matrix is singular, so no free generating function exists.
    #[error("no free generating function: |det B| = {det_b:.3e}")]
    NotFree { det_b: f64 },

    /// A Gaussian state left the domain Re M > 0.
    #[error("state domain violated: {0}")]
    StateDomain(String),

    #[error("neither transverse nor tangent endpoint case applies: {0}")]
    Case(String),

    /// Half-integer where an integer index was required.
    #[error("parity violation: {0}")]
    Parity(String),

    #[error("chart is not an immersion at u = {at:?} (smallest singular value {sigma:.3e})")]
    Immersion { at: Vec<f64>, sigma: f64 },

    #[error("unsupported configuration: {0}")]
    Unsupported(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),
}

pub type Result<T> = std::result::Result<T, MaslovError>;
