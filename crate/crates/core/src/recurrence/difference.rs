//! Forward solution of k-th order matrix difference equations.

use crate::error::{Error, Result};
use crate::linalg::SquareMatrix;

/// Solves `y_{n+k} + c_{k-1}(n) y_{n+k-1} + ... + c_0(n) y_n = 0` forward from
/// `init = (y_0, ..., y_{k-1})`, returning `y_0..y_{n_max}`.
///
/// `coeff_fn(n)` yields `[c_0(n), ..., c_{k-1}(n)]`. Coefficients act on the
/// left, so the solution map is right-linear in the initial data.
pub fn solve_difference_equation<F>(
    order: usize,
    coeff_fn: F,
    init: &[SquareMatrix],
    n_max: usize,
) -> Result<Vec<SquareMatrix>>
where
    F: Fn(usize) -> Vec<SquareMatrix>,
{
    if order == 0 {
        return Err(Error::InvalidInput("order must be at least 1".into()));
    }
    if init.len() != order {
        return Err(Error::DimensionMismatch {
            expected: order,
            found: init.len(),
        });
    }
    let dim = init[0].dim();
    if let Some(bad) = init.iter().find(|m| m.dim() != dim) {
        return Err(Error::DimensionMismatch {
            expected: dim,
            found: bad.dim(),
        });
    }
    let mut y: Vec<SquareMatrix> = init.iter().take(n_max + 1).cloned().collect();
    let mut n = 0;
    while y.len() <= n_max {
        let cs = coeff_fn(n);
        if cs.len() != order {
            return Err(Error::DimensionMismatch {
                expected: order,
                found: cs.len(),
            });
        }
        let mut next = SquareMatrix::zeros(dim);
        for (i, c) in cs.iter().enumerate() {
            if c.dim() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: c.dim(),
                });
            }
            next -= &(c * &y[n + i]);
        }
        y.push(next);
        n += 1;
    }
    Ok(y)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;
    use proptest::prelude::*;

    fn s(v: f64) -> SquareMatrix {
        SquareMatrix::from_real_rows(&[&[v]])
    }

    #[test]
    fn fibonacci() {
        let y =
            solve_difference_equation(2, |_| vec![s(-1.0), s(-1.0)], &[s(1.0), s(1.0)], 5).unwrap();
        let got: Vec<f64> = y.iter().map(|m| m[(0, 0)].re).collect();
        assert_eq!(got, vec![1.0, 1.0, 2.0, 3.0, 5.0, 8.0]);
    }

    #[test]
    fn zero_coefficients_kill_the_tail() {
        let id = SquareMatrix::identity(2);
        let z = SquareMatrix::zeros(2);
        let y = solve_difference_equation(
            2,
            |_| vec![z.clone(), z.clone()],
            &[id.clone(), id.clone()],
            4,
        )
        .unwrap();
        assert_eq!(y, vec![id.clone(), id, z.clone(), z.clone(), z]);
    }

    #[test]
    fn shape_errors() {
        assert!(solve_difference_equation(2, |_| vec![s(1.0), s(1.0)], &[s(1.0)], 3).is_err());
        assert!(solve_difference_equation(2, |_| vec![s(1.0)], &[s(1.0), s(1.0)], 3).is_err());
        assert!(solve_difference_equation(0, |_| vec![], &[], 3).is_err());
    }

    fn mat2(v: &[f64]) -> SquareMatrix {
        SquareMatrix::from_fn(2, |i, j| {
            Complex64::new(v[4 * i + 2 * j], v[4 * i + 2 * j + 1])
        })
    }

    proptest! {
        #[test]
        fn superposition_and_right_linearity(
            coeffs in prop::collection::vec(-1.0f64..1.0, 24),
            init in prop::collection::vec(-1.0f64..1.0, 24),
            alpha in prop::collection::vec(-1.0f64..1.0, 8),
        ) {
            let k = 3;
            let cm: Vec<SquareMatrix> = coeffs.chunks(8).map(mat2).collect();
            let coeff_fn = |n: usize| cm.iter().map(|c| c.scale_re(1.0 + 0.1 * n as f64)).collect::<Vec<_>>();
            let c: Vec<SquareMatrix> = init.chunks(8).map(mat2).collect();
            let full = solve_difference_equation(k, coeff_fn, &c, 12).unwrap();
            // sum over unit initial data e_i c_i
            let mut sum = vec![SquareMatrix::zeros(2); 13];
            for i in 0..k {
                let mut e = vec![SquareMatrix::zeros(2); k];
                e[i] = SquareMatrix::identity(2);
                let sol = solve_difference_equation(k, coeff_fn, &e, 12).unwrap();
                for (acc, y) in sum.iter_mut().zip(&sol) {
                    *acc += &(y * &c[i]);
                }
            }
            for (a, b) in full.iter().zip(&sum) {
                prop_assert!(a.dist(b) <= 1e-10 * (1.0 + a.norm()));
            }
            // right multiplication of the data by a constant matrix
            let al = mat2(&alpha);
            let scaled: Vec<SquareMatrix> = c.iter().map(|m| m * &al).collect();
            let sol = solve_difference_equation(k, coeff_fn, &scaled, 12).unwrap();
            for (a, b) in sol.iter().zip(&full) {
                prop_assert!(a.dist(&(b * &al)) <= 1e-10 * (1.0 + a.norm()));
            }
            // determinism
            let again = solve_difference_equation(k, coeff_fn, &c, 12).unwrap();
            prop_assert_eq!(again, full);
        }
    }
}
