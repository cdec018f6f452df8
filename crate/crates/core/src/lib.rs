//! Matrix biorthogonal polynomials generated by three-term recurrences.
//!
//! The crate builds the polynomial families `V_n`, `G_n` and their associated
//! families from block recurrence coefficients, evaluates second-kind
//! functions outside the spectrum, checks the algebraic identities linking
//! them as residuals, computes zeros through block Jacobi truncations, and
//! runs convergence studies for ratio and product limits.

pub mod asymptotics;
pub mod error;
pub mod identities;
pub mod linalg;
pub mod par;
pub mod recurrence;
pub mod samples;
pub mod secondkind;
pub mod spectral;

pub use error::{Error, Result};
pub use linalg::SquareMatrix;
pub use num_complex::Complex64;
pub use par::Execution;
