//! Principal matrix square root.

use num_complex::Complex64;

use super::eigen::{eigenvalues, schur};
use super::matrix::SquareMatrix;
use crate::error::{Error, Result};

const TOL: f64 = 1e-13;
const MAX_ITER: usize = 100;

/// The square root whose eigenvalues lie in the open right half-plane.
///
/// Normal matrices go through a unitary diagonalisation; everything else uses
/// the determinant-scaled Denman-Beavers iteration.
pub fn principal_sqrt(m: &SquareMatrix) -> Result<SquareMatrix> {
    let scale = m.norm();
    if scale == 0.0 {
        return Err(Error::BranchCut(Complex64::new(0.0, 0.0)));
    }
    let cut_tol = 1e-12 * scale;
    for lam in eigenvalues(m)? {
        if lam.im.abs() <= cut_tol && lam.re <= cut_tol {
            return Err(Error::BranchCut(lam));
        }
    }
    if m.is_normal(1e-13) {
        let s = schur(m)?;
        let n = m.dim();
        let d = SquareMatrix::from_diag(&(0..n).map(|i| s.t[(i, i)].sqrt()).collect::<Vec<_>>());
        let root = &(&s.z * &d) * &s.z.adjoint();
        if (&(&root * &root) - m).norm() <= 1e-12 * scale {
            return Ok(root);
        }
    }
    denman_beavers(m)
}

fn denman_beavers(m: &SquareMatrix) -> Result<SquareMatrix> {
    let n = m.dim();
    let mut y = m.clone();
    let mut z = SquareMatrix::identity(n);
    let mut scaling = true;
    let mut delta = f64::INFINITY;
    for _ in 0..MAX_ITER {
        let mu = if scaling {
            let d = (y.det() * z.det()).norm();
            if d.is_finite() && d > 0.0 {
                d.powf(-1.0 / (2.0 * n as f64))
            } else {
                1.0
            }
        } else {
            1.0
        };
        let ys = y.scale_re(mu);
        let zs = z.scale_re(mu);
        let yinv = ys.inverse_with(0.0)?;
        let zinv = zs.inverse_with(0.0)?;
        let y_next = (&ys + &zinv).scale_re(0.5);
        let z_next = (&zs + &yinv).scale_re(0.5);
        delta = y_next.dist(&y) / y_next.norm();
        y = y_next;
        z = z_next;
        if delta < 1e-2 {
            scaling = false;
        }
        if delta <= TOL {
            return Ok(y);
        }
    }
    // accept a stagnated iterate only if it is a genuine root
    if (&(&y * &y) - m).norm() <= 1e-10 * m.norm() {
        return Ok(y);
    }
    Err(Error::NoConvergence {
        what: "matrix square root",
        iterations: MAX_ITER,
        residual: delta,
    })
}
