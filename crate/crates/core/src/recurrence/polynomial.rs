//! Matrix polynomials in a scalar variable.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::linalg::SquareMatrix;

/// `P(x) = sum_j coeffs[j] x^j` with `N x N` coefficients.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatrixPolynomial {
    dim: usize,
    coeffs: Vec<SquareMatrix>,
}

impl MatrixPolynomial {
    /// Panics if `coeffs` is empty or mixes dimensions.
    pub fn new(coeffs: Vec<SquareMatrix>) -> Self {
        assert!(
            !coeffs.is_empty(),
            "a polynomial needs at least one coefficient"
        );
        let dim = coeffs[0].dim();
        assert!(
            coeffs.iter().all(|c| c.dim() == dim),
            "coefficient dimensions differ"
        );
        MatrixPolynomial { dim, coeffs }
    }

    pub fn constant(c: SquareMatrix) -> Self {
        Self::new(vec![c])
    }

    pub fn zero(dim: usize) -> Self {
        Self::constant(SquareMatrix::zeros(dim))
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn coeffs(&self) -> &[SquareMatrix] {
        &self.coeffs
    }

    /// Index of the last nonzero coefficient (zero for the zero polynomial).
    pub fn degree(&self) -> usize {
        self.coeffs
            .iter()
            .rposition(|c| c.max_abs() > 0.0)
            .unwrap_or(0)
    }

    pub fn leading(&self) -> &SquareMatrix {
        &self.coeffs[self.degree()]
    }

    pub fn is_monic(&self, tol: f64) -> bool {
        self.leading()
            .approx_eq(&SquareMatrix::identity(self.dim), tol)
    }

    /// Horner evaluation `((c_n x + c_{n-1}) x + ...)`.
    pub fn eval(&self, x: Complex64) -> SquareMatrix {
        let mut acc = self.coeffs.last().expect("non-empty").clone();
        for c in self.coeffs.iter().rev().skip(1) {
            acc = acc.scale(x);
            acc += c;
        }
        acc
    }

    /// Power-sum evaluation, kept as a cross-check for Horner.
    pub fn eval_naive(&self, x: Complex64) -> SquareMatrix {
        let mut acc = SquareMatrix::zeros(self.dim);
        let mut p = Complex64::new(1.0, 0.0);
        for c in &self.coeffs {
            acc += &c.scale(p);
            p *= x;
        }
        acc
    }

    pub fn derivative(&self) -> MatrixPolynomial {
        if self.coeffs.len() == 1 {
            return Self::zero(self.dim);
        }
        Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(j, c)| c.scale_re(j as f64))
                .collect(),
        )
    }

    pub fn eval_derivative(&self, x: Complex64) -> SquareMatrix {
        self.derivative().eval(x)
    }

    /// `(P(x) - P(y)) / (x - y)` by synthetic division of `P` by `(t - y)`,
    /// exact at `x = y` where it equals `P'(y)`.
    pub fn divided_difference(&self, x: Complex64, y: Complex64) -> SquareMatrix {
        let n = self.coeffs.len();
        if n == 1 {
            return SquareMatrix::zeros(self.dim);
        }
        // quotient coefficients b_{j-1} = c_j + y b_j, from the top
        let mut quotient = vec![SquareMatrix::zeros(self.dim); n - 1];
        quotient[n - 2] = self.coeffs[n - 1].clone();
        for j in (1..n - 1).rev() {
            quotient[j - 1] = &self.coeffs[j] + &quotient[j].scale(y);
        }
        MatrixPolynomial::new(quotient).eval(x)
    }

    /// Coefficient-wise transpose.
    pub fn transpose(&self) -> MatrixPolynomial {
        Self::new(self.coeffs.iter().map(|c| c.transpose()).collect())
    }

    /// `x * P(x)`.
    pub fn shift_up(&self) -> MatrixPolynomial {
        let mut coeffs = Vec::with_capacity(self.coeffs.len() + 1);
        coeffs.push(SquareMatrix::zeros(self.dim));
        coeffs.extend(self.coeffs.iter().cloned());
        Self::new(coeffs)
    }

    pub fn left_mul(&self, m: &SquareMatrix) -> MatrixPolynomial {
        Self::new(self.coeffs.iter().map(|c| m * c).collect())
    }

    pub fn right_mul(&self, m: &SquareMatrix) -> MatrixPolynomial {
        Self::new(self.coeffs.iter().map(|c| c * m).collect())
    }

    pub fn add(&self, other: &MatrixPolynomial) -> MatrixPolynomial {
        let len = self.coeffs.len().max(other.coeffs.len());
        let zero = SquareMatrix::zeros(self.dim);
        Self::new(
            (0..len)
                .map(|j| {
                    let a = self.coeffs.get(j).unwrap_or(&zero);
                    let b = other.coeffs.get(j).unwrap_or(&zero);
                    a + b
                })
                .collect(),
        )
    }

    pub fn sub(&self, other: &MatrixPolynomial) -> MatrixPolynomial {
        self.add(&other.left_mul(&SquareMatrix::scalar(self.dim, Complex64::new(-1.0, 0.0))))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn scalar_poly(cs: &[f64]) -> MatrixPolynomial {
        MatrixPolynomial::new(
            cs.iter()
                .map(|&v| SquareMatrix::from_real_rows(&[&[v]]))
                .collect(),
        )
    }

    #[test]
    fn degree_and_leading() {
        let p = scalar_poly(&[-1.0, 0.0, 4.0, 0.0]);
        assert_eq!(p.degree(), 2);
        assert_eq!(p.leading()[(0, 0)], c(4.0, 0.0));
        assert!(!p.is_monic(1e-15));
        assert!(scalar_poly(&[3.0, 1.0]).is_monic(0.0));
        assert_eq!(MatrixPolynomial::zero(2).degree(), 0);
    }

    #[test]
    fn monomial_derivative_matches_finite_difference() {
        let x = c(1.1, 0.0);
        for n in 1..8usize {
            let mut cs = vec![SquareMatrix::zeros(2); n + 1];
            cs[n] = SquareMatrix::identity(2);
            let p = MatrixPolynomial::new(cs);
            let h = 1e-6;
            let fd = (&p.eval(x + h) - &p.eval(x - h)).scale_re(0.5 / h);
            assert!(fd.dist(&p.eval_derivative(x)) < 1e-7 * n as f64);
        }
    }

    #[test]
    fn divided_difference_is_exact_at_coincidence() {
        let p = scalar_poly(&[1.0, -2.0, 0.5, 3.0]);
        let y = c(0.7, 0.2);
        assert!(p.divided_difference(y, y).dist(&p.eval_derivative(y)) < 1e-14);
        let x = c(-1.3, 0.4);
        let direct = (&p.eval(x) - &p.eval(y)).scale(Complex64::new(1.0, 0.0) / (x - y));
        assert!(p.divided_difference(x, y).dist(&direct) < 1e-13);
    }

    fn arb_poly() -> impl Strategy<Value = MatrixPolynomial> {
        prop::collection::vec(prop::collection::vec(-2.0f64..2.0, 8), 1..7).prop_map(|cs| {
            MatrixPolynomial::new(
                cs.iter()
                    .map(|v| {
                        SquareMatrix::from_fn(2, |i, j| {
                            c(v[2 * (2 * i + j)], v[2 * (2 * i + j) + 1])
                        })
                    })
                    .collect(),
            )
        })
    }

    proptest! {
        #[test]
        fn horner_matches_power_sum(p in arb_poly(), xr in -1.5f64..1.5, xi in -1.5f64..1.5) {
            let x = c(xr, xi);
            let scale = p.coeffs().iter().map(|m| m.norm()).sum::<f64>() * 4f64.powi(p.coeffs().len() as i32);
            prop_assert!(p.eval(x).dist(&p.eval_naive(x)) <= 1e-12 * scale.max(1.0));
        }

        #[test]
        fn synthetic_division_reproduces_difference(p in arb_poly(), xr in -1.5f64..1.5, yr in -1.5f64..1.5) {
            prop_assume!((xr - yr).abs() > 1e-2);
            let (x, y) = (c(xr, 0.3), c(yr, -0.1));
            let lhs = p.divided_difference(x, y).scale(x - y);
            let rhs = &p.eval(x) - &p.eval(y);
            prop_assert!(lhs.dist(&rhs) <= 1e-11 * (1.0 + rhs.norm() + p.eval(x).norm()));
        }
    }
}
