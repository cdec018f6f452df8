//! Second-kind functions `Q_n(x)`, `R_n(x)` and Stieltjes transforms.
//!
//! `Q_n` is the minimal solution of the recurrence off the spectrum, so it is
//! built from the backward ratio recursion
//! `S_k = (x - B_k - A_k S_{k+1} C_{k+1})^{-1}`, started at the tail transform,
//! with `Q_n = S_n C_n Q_{n-1}` and `Q_{-1} = I`. `R_n` is the same
//! construction on the transposed recurrence. The combination
//! `Q_n = V_n Q_0 - V^(1)_{n-1} A_0^{-1}` is exposed as a cross-check and as
//! the fallback for user supplied transforms.

use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{eigenvalues, principal_sqrt, SquareMatrix};
use crate::recurrence::{values, RecurrenceCoefficients, Triple};
use crate::spectral::gershgorin_bound;

const FP_TOL: f64 = 1e-12;
const FP_MAX_ITER: usize = 500;
const FP_RESIDUAL_TOL: f64 = 1e-11;

/// Which transform of a constant triple is meant.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    /// `F_{A,B,C}`: solves `A F C F + (B - x) F + I = 0`; the `Q_0` side.
    Left,
    /// `F_{C,B,A}`: solves `C F A F + (B - x) F + I = 0`; the polynomial-ratio side.
    Right,
}

type UserFn = Arc<dyn Fn(Complex64) -> Result<SquareMatrix> + Send + Sync>;

/// Where the tail transform comes from.
#[derive(Clone)]
pub enum StieltjesSource {
    /// Closed form for symmetric positive definite `A`, Hermitian `B`, `C = A^T`.
    ClosedFormChebyshev(Triple),
    /// Fixed-point iteration on the quadratic equation.
    FixedPoint(Triple),
    /// An arbitrary `x -> Q_0(x)`.
    UserSupplied(UserFn),
}

impl fmt::Debug for StieltjesSource {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StieltjesSource::ClosedFormChebyshev(t) => {
                f.debug_tuple("ClosedFormChebyshev").field(t).finish()
            }
            StieltjesSource::FixedPoint(t) => f.debug_tuple("FixedPoint").field(t).finish(),
            StieltjesSource::UserSupplied(_) => f.write_str("UserSupplied(..)"),
        }
    }
}

impl StieltjesSource {
    /// Fixed-point source for the tail of `rc`.
    pub fn fixed_point_from_tail(rc: &RecurrenceCoefficients) -> Result<Self> {
        rc.tail()
            .cloned()
            .map(StieltjesSource::FixedPoint)
            .ok_or_else(|| Error::InvalidInput("the recurrence has no constant tail".into()))
    }

    /// Closed-form source for the tail of `rc`.
    pub fn closed_form_from_tail(rc: &RecurrenceCoefficients) -> Result<Self> {
        rc.tail()
            .cloned()
            .map(StieltjesSource::ClosedFormChebyshev)
            .ok_or_else(|| Error::InvalidInput("the recurrence has no constant tail".into()))
    }

    pub fn user(f: impl Fn(Complex64) -> Result<SquareMatrix> + Send + Sync + 'static) -> Self {
        StieltjesSource::UserSupplied(Arc::new(f))
    }

    pub fn label(&self) -> &'static str {
        match self {
            StieltjesSource::ClosedFormChebyshev(_) => "closed_form",
            StieltjesSource::FixedPoint(_) => "fixed_point",
            StieltjesSource::UserSupplied(_) => "user_supplied",
        }
    }

    pub fn triple(&self) -> Option<&Triple> {
        match self {
            StieltjesSource::ClosedFormChebyshev(t) | StieltjesSource::FixedPoint(t) => Some(t),
            StieltjesSource::UserSupplied(_) => None,
        }
    }

    /// The transform at `x`. User sources ignore `side`.
    pub fn evaluate(&self, x: Complex64, side: Side) -> Result<SquareMatrix> {
        match self {
            StieltjesSource::FixedPoint(t) => stieltjes_fixed_point(&t.a, &t.b, &t.c, x, side),
            StieltjesSource::ClosedFormChebyshev(t) => {
                if t.c.dist(&t.a.transpose()) > 1e-12 * t.a.norm() {
                    return Err(Error::InvalidInput("the closed form needs C = A^T".into()));
                }
                constant_tail_closed_form(&t.a, &t.b, x)
            }
            StieltjesSource::UserSupplied(f) => {
                let m = f(x)?;
                if !m.is_finite() {
                    return Err(Error::NonFinite);
                }
                Ok(m)
            }
        }
    }

    /// Source for the transposed recurrence.
    pub fn transposed(&self) -> Self {
        match self {
            StieltjesSource::ClosedFormChebyshev(t) => {
                StieltjesSource::ClosedFormChebyshev(t.transposed())
            }
            StieltjesSource::FixedPoint(t) => StieltjesSource::FixedPoint(t.transposed()),
            StieltjesSource::UserSupplied(f) => {
                let f = f.clone();
                StieltjesSource::user(move |x| f(x).map(|m| m.transpose()))
            }
        }
    }
}

/// `(residual, scale)` of the quadratic equation for `side`.
pub fn quadratic_residual(
    a: &SquareMatrix,
    b: &SquareMatrix,
    c: &SquareMatrix,
    f: &SquareMatrix,
    x: Complex64,
    side: Side,
) -> (f64, f64) {
    let (l, r) = match side {
        Side::Left => (a, c),
        Side::Right => (c, a),
    };
    let quad = &(&(l * f) * r) * f;
    let lin = &b.shift(-x) * f;
    let id = SquareMatrix::identity(f.dim());
    let res = (&(&quad + &lin) + &id).norm();
    let scale = quad.norm().max(lin.norm()).max(id.norm());
    (res, scale)
}

fn iterate_fixed_point(
    a: &SquareMatrix,
    b: &SquareMatrix,
    c: &SquareMatrix,
    x: Complex64,
    side: Side,
) -> Result<SquareMatrix> {
    let (l, r) = match side {
        Side::Left => (a, c),
        Side::Right => (c, a),
    };
    let base = (-b).shift(x);
    let mut f = base.inverse().map_err(|e| e.named("x - B"))?;
    let mut damping = false;
    let mut last_res = f64::INFINITY;
    let mut step = f64::INFINITY;
    for _ in 0..FP_MAX_ITER {
        let g = (&base - &(&(l * &f) * r))
            .inverse()
            .map_err(|e| e.named("x - B - A F C in the fixed-point iteration"))?;
        let next = if damping { (&f + &g).scale_re(0.5) } else { g };
        step = next.dist(&f) / next.norm().max(f64::MIN_POSITIVE);
        f = next;
        let (res, _) = quadratic_residual(a, b, c, &f, x, side);
        if res > last_res {
            damping = true;
        }
        last_res = res;
        if step <= FP_TOL {
            let (res, scale) = quadratic_residual(a, b, c, &f, x, side);
            if res <= FP_RESIDUAL_TOL * scale {
                return Ok(f);
            }
        }
    }
    Err(Error::NoConvergence {
        what: "Stieltjes fixed point",
        iterations: FP_MAX_ITER,
        residual: step,
    })
}

/// Decaying solution of the quadratic matrix equation for `side` by the
/// iteration `F <- (x - B - A F C)^{-1}` (left) or `(x - B - C F A)^{-1}`
/// (right) from `(x - B)^{-1}`. The branch is certified by requiring the
/// fixed point to be attracting, `rho(F A) rho(C F) < 1` (left) or
/// `rho(F C) rho(A F) < 1` (right), which singles out the decaying solution.
pub fn stieltjes_fixed_point(
    a: &SquareMatrix,
    b: &SquareMatrix,
    c: &SquareMatrix,
    x: Complex64,
    side: Side,
) -> Result<SquareMatrix> {
    let f = iterate_fixed_point(a, b, c, x, side)?;
    let (l, r) = match side {
        Side::Left => (a, c),
        Side::Right => (c, a),
    };
    let rho = |m: SquareMatrix| -> Result<f64> {
        Ok(eigenvalues(&m)?
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max))
    };
    if rho(&f * l)? * rho(r * &f)? >= 1.0 {
        return Err(Error::WrongBranch(x));
    }
    Ok(f)
}

/// Closed-form transform for real symmetric positive definite `A` and
/// Hermitian `B`: with `W = A^{-1/2} (B - z) A^{-1/2}`,
/// `F = -1/2 A^{-1/2} (W - W sqrt(I - 4 W^{-2})) A^{-1/2}`, which solves
/// `A F A^T F + (B - z) F + I = 0` on the decaying branch for every `z`
/// off the support.
pub fn constant_tail_closed_form(
    a: &SquareMatrix,
    b: &SquareMatrix,
    z: Complex64,
) -> Result<SquareMatrix> {
    let tol = 1e-12 * a.norm().max(1.0);
    if !a.is_real(tol) || a.dist(&a.transpose()) > tol {
        return Err(Error::NotPositiveDefinite);
    }
    if eigenvalues(a)?.iter().any(|l| l.re <= 0.0) {
        return Err(Error::NotPositiveDefinite);
    }
    if !b.is_hermitian(1e-12 * b.norm().max(1.0)) {
        return Err(Error::InvalidInput(
            "the closed form needs a Hermitian B".into(),
        ));
    }
    let a_mhalf = principal_sqrt(a)?.inverse()?;
    let w = &(&a_mhalf * &b.shift(-z)) * &a_mhalf;
    let w_inv = w.inverse()?;
    let radicand = (&w_inv * &w_inv)
        .scale_re(-4.0)
        .shift(Complex64::new(1.0, 0.0));
    let s = -(&w * &principal_sqrt(&radicand)?);
    Ok((&(&a_mhalf * &(&w + &s)) * &a_mhalf).scale_re(-0.5))
}

/// How a second-kind sequence was produced.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SecondKindMethod {
    /// Backward ratio recursion from the tail transform.
    MinimalRatio,
    /// `V_n Q_0 - V^(1)_{n-1} A_0^{-1}` from a supplied `Q_0`.
    Associated,
}

/// `Q_n(x)` and `R_n(x)` for `n = 0..=n_max`.
#[derive(Debug, Clone)]
pub struct SecondKindSequence {
    pub x: Complex64,
    pub q: Vec<SquareMatrix>,
    pub r: Vec<SquareMatrix>,
    pub method: SecondKindMethod,
    pub source: &'static str,
    /// Set when `x` lies inside the Gershgorin disk.
    pub note: Option<String>,
}

impl SecondKindSequence {
    pub fn n_max(&self) -> usize {
        self.q.len() - 1
    }

    /// `Q_n` for `n >= -1`, with `Q_{-1} = C_0^{-1} = I`.
    pub fn q_at(&self, n: isize) -> SquareMatrix {
        if n < 0 {
            SquareMatrix::identity(self.q[0].dim())
        } else {
            self.q[n as usize].clone()
        }
    }

    /// `R_n^T` for `n >= -1`, with `R_{-1}^T = A_{-1}^{-1} = I`.
    pub fn rt_at(&self, n: isize) -> SquareMatrix {
        if n < 0 {
            SquareMatrix::identity(self.r[0].dim())
        } else {
            self.r[n as usize].transpose()
        }
    }
}

/// `S_0..S_{k_max}` with `S_k` the transform of the `k`-shifted recurrence,
/// from `S_k = f_tail` for `k >= head_len`.
pub fn transform_sequence(
    rc: &RecurrenceCoefficients,
    f_tail: &SquareMatrix,
    x: Complex64,
    k_max: usize,
) -> Result<Vec<SquareMatrix>> {
    let k0 = rc.head_len();
    let top = k0.max(k_max);
    let mut s = vec![f_tail.clone(); top + 1];
    for k in (0..k0).rev() {
        let lhs = (-rc.b(k)?).shift(x);
        let rhs = &(rc.a(k)? * &s[k + 1]) * rc.c(k + 1)?;
        let m = &lhs - &rhs;
        s[k] = m
            .inverse()
            .map_err(|e| e.named(&format!("x - B_{k} - A_{k} S_{} C_{}", k + 1, k + 1)))?;
    }
    s.truncate(k_max + 1);
    Ok(s)
}

fn minimal_ratio(
    rc: &RecurrenceCoefficients,
    f_tail: &SquareMatrix,
    x: Complex64,
    n_max: usize,
) -> Result<Vec<SquareMatrix>> {
    let s = transform_sequence(rc, f_tail, x, n_max)?;
    let mut q: Vec<SquareMatrix> = Vec::with_capacity(n_max + 1);
    let mut prev = SquareMatrix::identity(rc.dim());
    for (n, sn) in s.iter().enumerate() {
        let next = &(sn * rc.c(n)?) * &prev;
        q.push(next.clone());
        prev = next;
    }
    Ok(q)
}

/// `Q_n = V_n Q_0 - V^(1)_{n-1} A_0^{-1}` for `n = 0..=n_max`.
pub fn associated_reconstruction(
    rc: &RecurrenceCoefficients,
    q0: &SquareMatrix,
    x: Complex64,
    n_max: usize,
) -> Result<Vec<SquareMatrix>> {
    let v = values(rc, x, n_max)?;
    let v1 = if n_max >= 1 {
        values(&rc.shifted(1), x, n_max - 1)?
    } else {
        Vec::new()
    };
    let a0_inv = rc.a_inv(0)?;
    Ok((0..=n_max)
        .map(|n| {
            let lead = &v[n] * q0;
            if n == 0 {
                lead
            } else {
                &lead - &(&v1[n - 1] * a0_inv)
            }
        })
        .collect())
}

fn inside_note(rc: &RecurrenceCoefficients, x: Complex64) -> Option<String> {
    let bound = gershgorin_bound(rc, rc.head_len() + 1).ok()?;
    (x.norm() <= bound.m).then(|| {
        format!(
            "point lies inside the Gershgorin disk of radius {}",
            bound.m
        )
    })
}

/// Second-kind sequences at `x`. Points inside the Gershgorin disk are
/// computed anyway and flagged in `note`.
pub fn second_kind(
    rc: &RecurrenceCoefficients,
    src: &StieltjesSource,
    x: Complex64,
    n_max: usize,
) -> Result<SecondKindSequence> {
    let note = inside_note(rc, x);
    match src.triple() {
        Some(t) => {
            match rc.tail_distance(t) {
                None => {
                    return Err(Error::InvalidInput(
                        "the recurrence has no constant tail".into(),
                    ))
                }
                Some(d) if d > 1e-12 => {
                    return Err(Error::InvalidInput(
                        "source triple differs from the recurrence tail".into(),
                    ))
                }
                _ => {}
            }
            let f = src.evaluate(x, Side::Left)?;
            let ft = src.transposed().evaluate(x, Side::Left)?;
            Ok(SecondKindSequence {
                x,
                q: minimal_ratio(rc, &f, x, n_max)?,
                r: minimal_ratio(rc.transposed(), &ft, x, n_max)?,
                method: SecondKindMethod::MinimalRatio,
                source: src.label(),
                note,
            })
        }
        None => {
            let q0 = src.evaluate(x, Side::Left)?;
            Ok(SecondKindSequence {
                x,
                q: associated_reconstruction(rc, &q0, x, n_max)?,
                r: associated_reconstruction(rc.transposed(), &q0.transpose(), x, n_max)?,
                method: SecondKindMethod::Associated,
                source: src.label(),
                note,
            })
        }
    }
}

/// Relative residuals of the second-kind cross-checks up to `horizon`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SecondKindConsistency {
    /// Worst associated-family reconstruction mismatch of `Q` and `R`, relative
    /// to the size of their terms.
    pub associated: f64,
    /// Worst three-term recurrence residual of `Q` and `R^T`, relative to the largest term.
    pub recurrence: f64,
    pub horizon: usize,
}

pub fn check_second_kind(
    rc: &RecurrenceCoefficients,
    seq: &SecondKindSequence,
    horizon: usize,
) -> Result<SecondKindConsistency> {
    let horizon = horizon.min(seq.n_max());
    let x = seq.x;
    let mut associated = 0.0f64;
    for (side_rc, vals) in [(rc, &seq.q), (rc.transposed(), &seq.r)] {
        let v = values(side_rc, x, horizon)?;
        let v1 = if horizon >= 1 {
            values(&side_rc.shifted(1), x, horizon - 1)?
        } else {
            Vec::new()
        };
        let a0_inv = side_rc.a_inv(0)?;
        for n in 0..=horizon {
            let t1 = &v[n] * &vals[0];
            let t2 = if n == 0 {
                SquareMatrix::zeros(rc.dim())
            } else {
                &v1[n - 1] * a0_inv
            };
            let scale = t1.norm().max(t2.norm()).max(vals[n].norm());
            associated = associated.max((&(&t1 - &t2) - &vals[n]).norm() / scale);
        }
    }
    let mut recurrence = 0.0f64;
    for n in 0..horizon.min(seq.n_max().saturating_sub(1)) {
        let ni = n as isize;
        let (q, qn, qp) = (seq.q_at(ni), seq.q_at(ni + 1), seq.q_at(ni - 1));
        let terms = [q.scale(x), rc.a(n)? * &qn, rc.b(n)? * &q, rc.c(n)? * &qp];
        recurrence = recurrence.max(rel_residual(&terms));
        let (r, rn, rp) = (seq.rt_at(ni), seq.rt_at(ni + 1), seq.rt_at(ni - 1));
        let terms = [
            r.scale(x),
            &rn * rc.c(n + 1)?,
            &r * rc.b(n)?,
            &rp * &rc.a_signed(ni - 1)?,
        ];
        recurrence = recurrence.max(rel_residual(&terms));
    }
    Ok(SecondKindConsistency {
        associated,
        recurrence,
        horizon,
    })
}

fn rel_residual(terms: &[SquareMatrix; 4]) -> f64 {
    let res = (&(&(&terms[0] - &terms[1]) - &terms[2]) - &terms[3]).norm();
    let scale = terms.iter().map(|t| t.norm()).fold(0.0, f64::max);
    if scale == 0.0 {
        0.0
    } else {
        res / scale
    }
}

/// The transform of the `k`-th associated functional, estimated as
/// `A_{k-1}^{-1} R_{k-1}^{-T} R_k^T` and as `Q_k Q_{k-1}^{-1} C_k^{-1}`.
pub fn associated_transform(
    rc: &RecurrenceCoefficients,
    src: &StieltjesSource,
    k: usize,
    x: Complex64,
) -> Result<(SquareMatrix, SquareMatrix)> {
    let seq = second_kind(rc, src, x, k)?;
    let ki = k as isize;
    let a_prev_inv = rc.a_signed(ki - 1)?.inverse()?;
    let rt_prev_inv = seq
        .rt_at(ki - 1)
        .inverse()
        .map_err(|e| e.named(&format!("R_{}", ki - 1)))?;
    let from_r = &(&a_prev_inv * &rt_prev_inv) * &seq.rt_at(ki);
    let q_prev_inv = seq
        .q_at(ki - 1)
        .inverse()
        .map_err(|e| e.named(&format!("Q_{}", ki - 1)))?;
    let from_q = &(&seq.q_at(ki) * &q_prev_inv) * rc.c_inv(k)?;
    Ok((from_r, from_q))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::re;
    use crate::recurrence::Mode;

    fn s(v: f64) -> SquareMatrix {
        SquareMatrix::from_real_rows(&[&[v]])
    }

    const Q0_AT_2: f64 = 0.535_898_384_862_245_4; // 4 - 2 sqrt(3)

    #[test]
    fn scalar_fixed_point_picks_decaying_root() {
        for side in [Side::Left, Side::Right] {
            let f = stieltjes_fixed_point(&s(0.5), &s(0.0), &s(0.5), re(2.0), side).unwrap();
            assert!((f[(0, 0)] - re(Q0_AT_2)).norm() < 1e-12);
        }
    }

    #[test]
    fn diagonal_fixed_point_matches_scalar_formula() {
        let half = SquareMatrix::scalar(2, re(0.5));
        let f = stieltjes_fixed_point(&half, &SquareMatrix::zeros(2), &half, re(3.0), Side::Left)
            .unwrap();
        // 0.25 F^2 - 3 F + 1 = 0, decaying root 2 (3 - sqrt 8)
        let want = 2.0 * (3.0 - 8f64.sqrt());
        assert!(f.approx_eq(&SquareMatrix::scalar(2, re(want)), 1e-12));
        let (res, _) = quadratic_residual(
            &half,
            &SquareMatrix::zeros(2),
            &half,
            &f,
            re(3.0),
            Side::Left,
        );
        assert!(res < 1e-11);
    }

    #[test]
    fn dominant_diagonal_is_near_resolvent() {
        let eps = 1e-3;
        let b = s(5.0);
        let x = re(9.0);
        let f = stieltjes_fixed_point(&s(eps), &b, &s(eps), x, Side::Left).unwrap();
        assert!((f[(0, 0)] - re(0.25)).norm() < 1e-6);
        let (res, _) = quadratic_residual(&s(eps), &b, &s(eps), &f, x, Side::Left);
        assert!(res < 1e-11);
    }

    #[test]
    fn closed_form_examples() {
        let f = constant_tail_closed_form(&s(0.5), &s(0.0), re(2.0)).unwrap();
        assert!((f[(0, 0)] - re(Q0_AT_2)).norm() < 1e-12);
        let f = constant_tail_closed_form(&s(0.5), &s(0.0), re(-2.0)).unwrap();
        assert!((f[(0, 0)] + re(Q0_AT_2)).norm() < 1e-12);

        let id = SquareMatrix::identity(2);
        let f = constant_tail_closed_form(&id, &SquareMatrix::zeros(2), re(3.0)).unwrap();
        let want = (3.0 - 5f64.sqrt()) / 2.0;
        assert!(f.approx_eq(&SquareMatrix::scalar(2, re(want)), 1e-12));

        let a = SquareMatrix::scalar(2, re(0.5));
        let b = SquareMatrix::from_real_diag(&[1.0, -1.0]);
        let z = re(4.0);
        let f = constant_tail_closed_form(&a, &b, z).unwrap();
        let (res, _) = quadratic_residual(&a, &b, &a, &f, z, Side::Left);
        assert!(res < 1e-9);
        let fp = stieltjes_fixed_point(&a, &b, &a, z, Side::Left).unwrap();
        assert!(f.approx_eq(&fp, 1e-10));
    }

    #[test]
    fn closed_form_rejects_bad_input() {
        assert_eq!(
            constant_tail_closed_form(&s(-1.0), &s(0.0), re(3.0)).unwrap_err(),
            Error::NotPositiveDefinite
        );
        let a = SquareMatrix::from_real_rows(&[&[1.0, 0.5], &[0.0, 1.0]]);
        assert_eq!(
            constant_tail_closed_form(&a, &SquareMatrix::zeros(2), re(3.0)).unwrap_err(),
            Error::NotPositiveDefinite
        );
        // z on the support: radicand has a negative eigenvalue
        assert!(matches!(
            constant_tail_closed_form(&s(0.5), &s(0.0), re(0.3)),
            Err(Error::BranchCut(_))
        ));
    }

    #[test]
    fn scalar_chebyshev_second_kind() {
        let rc = RecurrenceCoefficients::scalar_chebyshev(0.5, 0.0);
        let src = StieltjesSource::fixed_point_from_tail(&rc).unwrap();
        let seq = second_kind(&rc, &src, re(2.0), 30).unwrap();
        assert_eq!(seq.method, SecondKindMethod::MinimalRatio);
        assert!(seq.note.is_none());
        assert!((seq.q[0][(0, 0)] - re(Q0_AT_2)).norm() < 1e-12);
        assert!((seq.q[1][(0, 0)] - re(4.0 * Q0_AT_2 - 2.0)).norm() < 1e-12);
        assert_eq!(seq.q_at(-1), SquareMatrix::identity(1));
        assert_eq!(seq.rt_at(-1), SquareMatrix::identity(1));
        // minimal solution: Q_n = Q_0^{n+1} (2 - sqrt 3)^n scaled
        let rho = 2.0 - 3f64.sqrt();
        for n in 0..30 {
            let want = Q0_AT_2 * rho.powi(n as i32);
            assert!((seq.q[n][(0, 0)].re - want).abs() < 1e-12 * want);
        }
        let cons = check_second_kind(&rc, &seq, 25).unwrap();
        assert!(
            cons.associated < 1e-12 && cons.recurrence < 1e-12,
            "{cons:?}"
        );
    }

    #[test]
    fn inside_points_are_flagged() {
        let rc = RecurrenceCoefficients::scalar_chebyshev(0.5, 0.0);
        let src =
            StieltjesSource::user(|x| Ok(SquareMatrix::scalar(1, Complex64::new(1.0, 0.0) / x)));
        let seq = second_kind(&rc, &src, re(0.5), 3).unwrap();
        assert!(seq.note.is_some());
        assert_eq!(seq.method, SecondKindMethod::Associated);
    }

    #[test]
    fn block_diagonal_decouples() {
        let a = SquareMatrix::from_real_diag(&[0.5, 0.3]);
        let b = SquareMatrix::from_real_diag(&[0.0, 0.2]);
        let rc =
            RecurrenceCoefficients::constant(a.clone(), b.clone(), a, Mode::Orthonormal).unwrap();
        let src = StieltjesSource::fixed_point_from_tail(&rc).unwrap();
        let x = Complex64::new(2.0, 0.5);
        let seq = second_kind(&rc, &src, x, 12).unwrap();
        for (i, (ai, bi)) in [(0.5, 0.0), (0.3, 0.2)].into_iter().enumerate() {
            let sc = RecurrenceCoefficients::scalar_chebyshev(ai, bi);
            let ss = second_kind(
                &sc,
                &StieltjesSource::fixed_point_from_tail(&sc).unwrap(),
                x,
                12,
            )
            .unwrap();
            for n in 0..=12 {
                let err = (seq.q[n][(i, i)] - ss.q[n][(0, 0)]).norm() / ss.q[n][(0, 0)].norm();
                assert!(err < 1e-13 * (n + 1) as f64, "i={i} n={n}: {err}");
                assert_eq!(seq.q[n][(i, 1 - i)], re(0.0));
            }
        }
    }

    #[test]
    fn mismatched_source_is_rejected() {
        let rc = RecurrenceCoefficients::scalar_chebyshev(0.5, 0.0);
        let src = StieltjesSource::FixedPoint(Triple::new(s(0.4), s(0.0), s(0.4)));
        assert!(matches!(
            second_kind(&rc, &src, re(2.0), 3),
            Err(Error::InvalidInput(_))
        ));
    }

    #[test]
    fn associated_transform_base_cases() {
        let rc = RecurrenceCoefficients::scalar_chebyshev(0.5, 0.0);
        let src = StieltjesSource::closed_form_from_tail(&rc).unwrap();
        for k in 0..3 {
            let (r, q) = associated_transform(&rc, &src, k, re(2.0)).unwrap();
            assert!((r[(0, 0)] - re(Q0_AT_2)).norm() < 1e-12, "k={k}");
            assert!((q[(0, 0)] - re(Q0_AT_2)).norm() < 1e-12, "k={k}");
        }
    }
}
