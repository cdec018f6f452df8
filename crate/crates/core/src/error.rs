use num_complex::Complex64;
use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("singular block `{what}` (reciprocal condition {rcond:.3e})")]
    SingularBlock { what: String, rcond: f64 },

    #[error("coefficient {which}_{index} is singular")]
    SingularCoefficient { which: char, index: usize },

    #[error("eigenvalue {0} lies on the branch cut (-inf, 0]")]
    BranchCut(Complex64),

    #[error(
        "{what} did not converge after {iterations} iterations (last residual {residual:.3e})"
    )]
    NoConvergence {
        what: &'static str,
        iterations: usize,
        residual: f64,
    },

    #[error("fixed point at {0} is not the decaying branch")]
    WrongBranch(Complex64),

    #[error("matrix is not positive definite")]
    NotPositiveDefinite,

    #[error("point {point} lies inside the Gershgorin disk of radius {bound}")]
    InsideSpectrum { point: Complex64, bound: f64 },

    #[error("coefficients exceed {cap:e} within the probe depth and no tail is declared")]
    UnboundedCoefficients { cap: f64 },

    #[error("coefficient index {0} is beyond the explicit head and no tail is declared")]
    OutOfRange(usize),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("non-finite entry")]
    NonFinite,

    #[error("invalid coefficients: {0}")]
    InvalidCoefficients(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),
}

impl Error {
    /// Renames the block in a `SingularBlock` error; other variants pass through.
    pub fn named(self, name: &str) -> Self {
        match self {
            Error::SingularBlock { rcond, .. } => Error::SingularBlock {
                what: name.to_string(),
                rcond,
            },
            other => other,
        }
    }
}
