//! Polynomial families generated by the recurrence.
//!
//! Everything runs through one left-multiplying engine. `G_n` satisfies
//! `x G_n^T = G_{n+1}^T C_{n+1} + G_n^T B_n + G_{n-1}^T A_{n-1}`, which after
//! transposition is the left recurrence of [`RecurrenceCoefficients::transposed`].

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::coefficients::RecurrenceCoefficients;
use super::polynomial::MatrixPolynomial;
use crate::error::{Error, Result};
use crate::linalg::SquareMatrix;

/// Which family to generate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum FamilyKind {
    V,
    G,
    /// `V^(k)`, the family of the recurrence shifted by `k`.
    VAssoc(usize),
    /// `G^(k)`.
    GAssoc(usize),
    /// `U` of the constant tail recurrence (left side).
    ChebyshevU,
    /// `T` of the constant tail recurrence (right side).
    ChebyshevT,
}

impl FamilyKind {
    pub fn shift(&self) -> usize {
        match *self {
            FamilyKind::VAssoc(k) | FamilyKind::GAssoc(k) => k,
            _ => 0,
        }
    }

    /// True for families whose recurrence multiplies on the right.
    pub fn is_right(&self) -> bool {
        matches!(
            self,
            FamilyKind::G | FamilyKind::GAssoc(_) | FamilyKind::ChebyshevT
        )
    }
}

/// Coefficients, in original orientation, of the recurrence defining `kind`.
pub fn defining_coefficients(
    rc: &RecurrenceCoefficients,
    kind: FamilyKind,
) -> Result<RecurrenceCoefficients> {
    match kind {
        FamilyKind::V | FamilyKind::G => Ok(rc.clone()),
        FamilyKind::VAssoc(k) | FamilyKind::GAssoc(k) => Ok(rc.shifted(k)),
        FamilyKind::ChebyshevU | FamilyKind::ChebyshevT => {
            let t = rc.tail().ok_or_else(|| {
                Error::InvalidInput("Chebyshev families need a constant tail".into())
            })?;
            RecurrenceCoefficients::constant(t.a.clone(), t.b.clone(), t.c.clone(), rc.mode())
        }
    }
}

fn engine_coefficients(
    rc: &RecurrenceCoefficients,
    kind: FamilyKind,
) -> Result<RecurrenceCoefficients> {
    let base = defining_coefficients(rc, kind)?;
    Ok(if kind.is_right() {
        base.transposed().clone()
    } else {
        base
    })
}

/// Generated polynomials `P_0..P_{n_max}` of one family. Right-side families
/// store `G_n` itself, not its transpose.
#[derive(Debug, Clone)]
pub struct FamilyTable {
    pub kind: FamilyKind,
    pub polys: Vec<MatrixPolynomial>,
    coeffs: RecurrenceCoefficients,
}

impl FamilyTable {
    pub fn shift(&self) -> usize {
        self.kind.shift()
    }

    pub fn n_max(&self) -> usize {
        self.polys.len() - 1
    }

    /// The recurrence (original orientation) the family satisfies.
    pub fn coefficients(&self) -> &RecurrenceCoefficients {
        &self.coeffs
    }

    pub fn eval(&self, n: usize, x: Complex64) -> SquareMatrix {
        self.polys[n].eval(x)
    }

    /// Residual and scale of the defining recurrence at `(n, x)`, for
    /// `0 <= n < n_max`.
    pub fn recurrence_residual(&self, n: usize, x: Complex64) -> Result<(f64, f64)> {
        let dim = self.coeffs.dim();
        let cur = self.eval(n, x);
        let next = self.eval(n + 1, x);
        let prev = if n == 0 {
            SquareMatrix::zeros(dim)
        } else {
            self.eval(n - 1, x)
        };
        let rc = &self.coeffs;
        let terms = if self.kind.is_right() {
            let (gt, gt_next, gt_prev) = (cur.transpose(), next.transpose(), prev.transpose());
            let a_prev = rc.a_signed(n as isize - 1)?;
            [
                gt.scale(x),
                &gt_next * rc.c(n + 1)?,
                &gt * rc.b(n)?,
                &gt_prev * &a_prev,
            ]
        } else {
            [
                cur.scale(x),
                rc.a(n)? * &next,
                rc.b(n)? * &cur,
                rc.c(n)? * &prev,
            ]
        };
        let residual = (&(&(&terms[0] - &terms[1]) - &terms[2]) - &terms[3]).norm();
        let scale = terms.iter().map(|t| t.norm()).fold(0.0, f64::max);
        Ok((residual, scale))
    }
}

/// Coefficient-form generation by `P_{n+1} = A_n^{-1} ((x - B_n) P_n - C_n P_{n-1})`.
pub fn generate_family(
    rc: &RecurrenceCoefficients,
    kind: FamilyKind,
    n_max: usize,
) -> Result<FamilyTable> {
    let engine = engine_coefficients(rc, kind)?;
    let dim = rc.dim();
    let mut polys = Vec::with_capacity(n_max + 1);
    polys.push(MatrixPolynomial::constant(SquareMatrix::identity(dim)));
    let mut prev = MatrixPolynomial::zero(dim);
    for n in 0..n_max {
        let cur = &polys[n];
        let rhs = cur
            .shift_up()
            .sub(&cur.left_mul(engine.b(n)?))
            .sub(&prev.left_mul(engine.c(n)?));
        let next = rhs.left_mul(engine.a_inv(n)?);
        prev = cur.clone();
        polys.push(next);
    }
    Ok(FamilyTable {
        kind,
        polys,
        coeffs: defining_coefficients(rc, kind)?,
    })
}

/// Values `P_0(x)..P_{n_max}(x)` of the left recurrence `rc`.
pub fn values(
    rc: &RecurrenceCoefficients,
    x: Complex64,
    n_max: usize,
) -> Result<Vec<SquareMatrix>> {
    let dim = rc.dim();
    let mut out = Vec::with_capacity(n_max + 1);
    out.push(SquareMatrix::identity(dim));
    let mut prev = SquareMatrix::zeros(dim);
    for n in 0..n_max {
        let cur = &out[n];
        let rhs = &(&cur.scale(x) - &(rc.b(n)? * cur)) - &(rc.c(n)? * &prev);
        let next = rc.a_inv(n)? * &rhs;
        prev = cur.clone();
        out.push(next);
    }
    Ok(out)
}

/// Values and `x`-derivatives of the left recurrence `rc`.
pub fn values_with_derivative(
    rc: &RecurrenceCoefficients,
    x: Complex64,
    n_max: usize,
) -> Result<(Vec<SquareMatrix>, Vec<SquareMatrix>)> {
    let dim = rc.dim();
    let vals = values(rc, x, n_max)?;
    let mut der = Vec::with_capacity(n_max + 1);
    der.push(SquareMatrix::zeros(dim));
    let mut prev = SquareMatrix::zeros(dim);
    for n in 0..n_max {
        let cur = &der[n];
        let rhs = &(&(&vals[n] + &cur.scale(x)) - &(rc.b(n)? * cur)) - &(rc.c(n)? * &prev);
        let next = rc.a_inv(n)? * &rhs;
        prev = cur.clone();
        der.push(next);
    }
    Ok((vals, der))
}

/// Values of the members of `kind` at `x`; right-side families return `G_n`.
pub fn family_values(
    rc: &RecurrenceCoefficients,
    kind: FamilyKind,
    x: Complex64,
    n_max: usize,
) -> Result<Vec<SquareMatrix>> {
    let engine = engine_coefficients(rc, kind)?;
    values(&engine, x, n_max)
}
