//! Connection coefficients expressing associated families in other bases.
//!
//! Each coefficient pair comes from a dense `2N x 2N` solve of the Casorati
//! system at indices `k - 1, k`, which also covers `k = 1` where some of the
//! Schur-complement forms involve the singular `V^(1)_{-1} = 0`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::casorati::Sequence;
use super::coefficients::RecurrenceCoefficients;
use super::family::values;
use crate::error::{Error, Result};
use crate::linalg::SquareMatrix;
use crate::secondkind::{second_kind, SecondKindSequence, StieltjesSource};

/// Coefficients at a point `x` for shift `k`:
///
/// * `V^(k)_{n-k} = V_n gamma + V^(1)_{n-1} eta`
/// * `G^(k)T_{n-k} = gamma_t G^T_n + eta_t G^(1)T_{n-1}`
/// * `V^(k)_{n-k} = V_n alpha - Q_n beta`
/// * `G^(k)T_{n-k} = alpha_t G^T_n - beta_t R^T_n`
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConnectionCoefficients {
    pub k: usize,
    pub x: Complex64,
    pub gamma: SquareMatrix,
    pub eta: SquareMatrix,
    pub gamma_t: SquareMatrix,
    pub eta_t: SquareMatrix,
    pub alpha: SquareMatrix,
    pub beta: SquareMatrix,
    pub alpha_t: SquareMatrix,
    pub beta_t: SquareMatrix,
}

/// Solves `[[f_{k-1}, g_{k-1}], [f_k, g_k]] [p; q] = [0; I]`.
fn solve_pair(
    f_prev: &SquareMatrix,
    g_prev: &SquareMatrix,
    f: &SquareMatrix,
    g: &SquareMatrix,
    what: &str,
) -> Result<(SquareMatrix, SquareMatrix)> {
    let m = SquareMatrix::assemble(&[
        vec![f_prev.clone(), g_prev.clone()],
        vec![f.clone(), g.clone()],
    ]);
    let inv = m.inverse().map_err(|e| e.named(what))?;
    let n = f.dim();
    Ok((inv.block(0, 1, n), inv.block(1, 1, n)))
}

fn basis_pair(
    rc: &RecurrenceCoefficients,
    k: usize,
    x: Complex64,
) -> Result<(SquareMatrix, SquareMatrix)> {
    let v = Sequence::polynomials(rc, x, k)?;
    let v1 = Sequence::associated(rc, 1, x, k)?;
    let ki = k as isize;
    let get = |s: &Sequence, m: isize| {
        s.get(m)
            .cloned()
            .ok_or(Error::OutOfRange(m.max(0) as usize))
    };
    solve_pair(
        &get(&v, ki - 1)?,
        &get(&v1, ki - 1)?,
        &get(&v, ki)?,
        &get(&v1, ki)?,
        "W(V, V^(1))",
    )
}

fn second_kind_pair(
    rc: &RecurrenceCoefficients,
    q_prev: &SquareMatrix,
    q: &SquareMatrix,
    k: usize,
    x: Complex64,
) -> Result<(SquareMatrix, SquareMatrix)> {
    let v = values(rc, x, k)?;
    // V_n alpha - Q_n beta: solve with -Q as the second column
    solve_pair(&v[k - 1], &-q_prev, &v[k], &-q, "W(V, Q)")
}

pub fn connection_coefficients(
    rc: &RecurrenceCoefficients,
    src: &StieltjesSource,
    k: usize,
    x: Complex64,
) -> Result<ConnectionCoefficients> {
    let sk = second_kind(rc, src, x, k)?;
    connection_coefficients_with(rc, &sk, k)
}

/// As [`connection_coefficients`] with precomputed second-kind values
/// (which must reach index `k`).
pub fn connection_coefficients_with(
    rc: &RecurrenceCoefficients,
    sk: &SecondKindSequence,
    k: usize,
) -> Result<ConnectionCoefficients> {
    if k == 0 {
        return Err(Error::InvalidInput(
            "connection coefficients need k >= 1".into(),
        ));
    }
    let x = sk.x;
    let rt = rc.transposed();
    let (gamma, eta) = basis_pair(rc, k, x)?;
    let (g_gamma, g_eta) = basis_pair(rt, k, x)?;
    let (alpha, beta) = second_kind_pair(rc, &sk.q_at(k as isize - 1), &sk.q_at(k as isize), k, x)?;
    let r_prev = sk.rt_at(k as isize - 1).transpose();
    let r_k = sk.rt_at(k as isize).transpose();
    let (g_alpha, g_beta) = second_kind_pair(rt, &r_prev, &r_k, k, x)?;
    Ok(ConnectionCoefficients {
        k,
        x,
        gamma,
        eta,
        gamma_t: g_gamma.transpose(),
        eta_t: g_eta.transpose(),
        alpha,
        beta,
        alpha_t: g_alpha.transpose(),
        beta_t: g_beta.transpose(),
    })
}

/// Worst relative reconstruction error of all four expansions over `ns`
/// (each `n >= k`), against directly generated associated families.
pub fn connection_residual(
    rc: &RecurrenceCoefficients,
    sk: &SecondKindSequence,
    cc: &ConnectionCoefficients,
    ns: &[usize],
) -> Result<f64> {
    let k = cc.k;
    let x = cc.x;
    let n_max = ns.iter().copied().max().unwrap_or(k);
    if n_max > sk.n_max() {
        return Err(Error::InvalidInput(
            "second-kind values do not reach the requested n".into(),
        ));
    }
    let rt = rc.transposed();
    let v = values(rc, x, n_max)?;
    let v1 = values(&rc.shifted(1), x, n_max)?;
    let vk = values(&rc.shifted(k), x, n_max)?;
    let g = values(rt, x, n_max)?;
    let g1 = values(&rt.shifted(1), x, n_max)?;
    let gk = values(&rt.shifted(k), x, n_max)?;
    let mut worst = 0.0f64;
    let mut record = |target: &SquareMatrix, t1: SquareMatrix, t2: SquareMatrix| {
        let scale = target.norm().max(t1.norm()).max(t2.norm());
        worst = worst.max((&(&t1 + &t2) - target).norm() / scale);
    };
    for &n in ns {
        if n < k {
            continue;
        }
        let target_v = &vk[n - k];
        let target_g = gk[n - k].transpose();
        record(target_v, &v[n] * &cc.gamma, &v1[n - 1] * &cc.eta);
        record(
            &target_g,
            &cc.gamma_t * &g[n].transpose(),
            &cc.eta_t * &g1[n - 1].transpose(),
        );
        record(target_v, &v[n] * &cc.alpha, -(&sk.q[n] * &cc.beta));
        record(
            &target_g,
            &cc.alpha_t * &g[n].transpose(),
            -(&cc.beta_t * &sk.r[n].transpose()),
        );
    }
    Ok(worst)
}

/// Residuals of the shift relations linking `V^(k-1)`, `V^(k)`, `V^(k+1)`:
/// `x V^(k)_{n-1} = V^(k-1)_n A_{k-1} + V^(k)_{n-1} A_{k-1}^{-1} B_{k-1} A_{k-1}
/// + V^(k+1)_{n-2} A_k^{-1} C_k A_{k-1}` and its transposed `G` analogue.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ShiftRelationResidual {
    pub v_residual: f64,
    pub v_scale: f64,
    pub g_residual: f64,
    pub g_scale: f64,
}

impl ShiftRelationResidual {
    /// Larger of the two relative residuals.
    pub fn relative(&self) -> f64 {
        let r = |res: f64, s: f64| if s == 0.0 { 0.0 } else { res / s };
        r(self.v_residual, self.v_scale).max(r(self.g_residual, self.g_scale))
    }
}

fn shift_relation_terms(
    rc: &RecurrenceCoefficients,
    k: usize,
    x: Complex64,
    n: usize,
) -> Result<[SquareMatrix; 4]> {
    let prev = values(&rc.shifted(k - 1), x, n)?;
    let cur = values(&rc.shifted(k), x, n - 1)?;
    let next_fam = if n >= 2 {
        Some(values(&rc.shifted(k + 1), x, n - 2)?)
    } else {
        None
    };
    let a_prev = rc.a(k - 1)?;
    let a_prev_inv = rc.a_inv(k - 1)?;
    let t0 = cur[n - 1].scale(x);
    let t1 = &prev[n] * a_prev;
    let t2 = &(&(&cur[n - 1] * a_prev_inv) * rc.b(k - 1)?) * a_prev;
    let t3 = match next_fam {
        Some(f) => &(&(&f[n - 2] * rc.a_inv(k)?) * rc.c(k)?) * a_prev,
        None => SquareMatrix::zeros(rc.dim()),
    };
    Ok([t0, t1, t2, t3])
}

pub fn associated_shift_relation_check(
    rc: &RecurrenceCoefficients,
    k: usize,
    x: Complex64,
    n: usize,
) -> Result<ShiftRelationResidual> {
    if k == 0 || n == 0 {
        return Err(Error::InvalidInput(
            "the shift relation needs k >= 1 and n >= 1".into(),
        ));
    }
    let eval = |rc: &RecurrenceCoefficients| -> Result<(f64, f64)> {
        let t = shift_relation_terms(rc, k, x, n)?;
        let res = (&(&(&t[0] - &t[1]) - &t[2]) - &t[3]).norm();
        let scale = t.iter().map(|m| m.norm()).fold(0.0, f64::max);
        Ok((res, scale))
    };
    let (v_residual, v_scale) = eval(rc)?;
    // the transposed recurrence turns the G relation into the V one
    let (g_residual, g_scale) = eval(rc.transposed())?;
    Ok(ShiftRelationResidual {
        v_residual,
        v_scale,
        g_residual,
        g_scale,
    })
}
