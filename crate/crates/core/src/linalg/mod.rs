//! Dense complex linear algebra kernels.

mod block;
mod eigen;
mod lu;
mod matrix;
mod sqrt;

pub use block::{block_det, block_inverse, quasidet_last, BlockMatrix2x2};
pub use eigen::{eigenvalues, schur, sort_eigenvalues, Schur};
pub use lu::Lu;
pub use matrix::{SquareMatrix, DEFAULT_RCOND};
pub use sqrt::principal_sqrt;

use num_complex::Complex64;

/// Shorthand for a real complex number.
#[inline]
pub fn re(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}
