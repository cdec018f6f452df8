//! Block Jacobi truncations, zero sets and the Gershgorin bound.
//!
//! The limit sets of zeros are not computable; this module exposes the finite
//! proxies: zero sets of truncations and the disk `|z| <= M`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{eigenvalues, SquareMatrix};
use crate::recurrence::{generate_family, FamilyKind, RecurrenceCoefficients};

/// Coefficient size above which a tail-less recurrence counts as unbounded.
pub const UNBOUNDED_CAP: f64 = 1e12;

/// The leading `nN x nN` block of the shifted block Jacobi operator: block
/// `(i, i)` is `B_{k+i}`, `(i, i+1)` is `A_{k+i}` and `(i+1, i)` is `C_{k+i+1}`.
pub fn truncate(rc: &RecurrenceCoefficients, k: usize, n: usize) -> Result<SquareMatrix> {
    if n == 0 {
        return Err(Error::InvalidInput(
            "truncation depth must be at least 1".into(),
        ));
    }
    let dim = rc.dim();
    let mut m = SquareMatrix::zeros(n * dim);
    let mut put = |bi: usize, bj: usize, blk: &SquareMatrix| {
        for i in 0..dim {
            for j in 0..dim {
                m[(bi * dim + i, bj * dim + j)] = blk[(i, j)];
            }
        }
    };
    for i in 0..n {
        put(i, i, rc.b(k + i)?);
        if i + 1 < n {
            put(i, i + 1, rc.a(k + i)?);
            put(i + 1, i, rc.c(k + i + 1)?);
        }
    }
    Ok(m)
}

/// Zeros of `V^(k)_n` (or `G^(k)_n`) with multiplicity, sorted by `(re, im)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ZeroSet {
    pub k: usize,
    pub n: usize,
    pub zeros: Vec<Complex64>,
}

/// Zeros of `V^(k)_n` as eigenvalues of the truncation.
pub fn zeros(rc: &RecurrenceCoefficients, k: usize, n: usize) -> Result<ZeroSet> {
    Ok(ZeroSet {
        k,
        n,
        zeros: eigenvalues(&truncate(rc, k, n)?)?,
    })
}

/// Zeros of `G^(k)_n`, from the truncation of the transposed recurrence.
pub fn g_zeros(rc: &RecurrenceCoefficients, k: usize, n: usize) -> Result<ZeroSet> {
    Ok(ZeroSet {
        k,
        n,
        zeros: eigenvalues(&truncate(rc.transposed(), k, n)?)?,
    })
}

/// `|det P(z)| / (sum_j |c_j| |z|^j)^N` for `P = V^(k)_n`; small at a zero.
pub fn relative_determinant(
    rc: &RecurrenceCoefficients,
    k: usize,
    n: usize,
    zs: &[Complex64],
) -> Result<Vec<f64>> {
    let table = generate_family(rc, FamilyKind::VAssoc(k), n)?;
    let p = &table.polys[n];
    let dim = rc.dim() as i32;
    Ok(zs
        .iter()
        .map(|&z| {
            let size: f64 = p
                .coeffs()
                .iter()
                .enumerate()
                .map(|(j, c)| c.norm() * z.norm().powi(j as i32))
                .sum();
            p.eval(z).det().norm() / size.powi(dim)
        })
        .collect())
}

/// Radius of a disk about the origin containing every truncation spectrum.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GershgorinBound {
    pub m: f64,
    pub probe_depth: usize,
    /// True when no tail is declared, so the bound covers only the probed rows.
    pub probe_only: bool,
}

/// Largest absolute row sum of the block Jacobi operator over rows
/// `0..probe_depth`, plus the tail rows when a tail exists.
pub fn gershgorin_bound(
    rc: &RecurrenceCoefficients,
    probe_depth: usize,
) -> Result<GershgorinBound> {
    let dim = rc.dim();
    let depth = if rc.has_tail() {
        probe_depth.max(rc.head_len() + 1)
    } else {
        probe_depth.min(rc.head_len())
    };
    let zero = SquareMatrix::zeros(dim);
    let row_bound = |a: &SquareMatrix, b: &SquareMatrix, c: &SquareMatrix| {
        let (ra, rb, rcs) = (a.row_abs_sums(), b.row_abs_sums(), c.row_abs_sums());
        (0..dim).map(|i| ra[i] + rb[i] + rcs[i]).fold(0.0, f64::max)
    };
    let mut m = 0.0f64;
    for j in 0..depth {
        let c = if j == 0 { &zero } else { rc.c(j)? };
        // the last probed row of a tail-less recurrence may lack A_j
        let a = match rc.a(j) {
            Ok(a) => a,
            Err(_) => &zero,
        };
        let row = row_bound(a, rc.b(j)?, c);
        if !rc.has_tail() && row > UNBOUNDED_CAP {
            return Err(Error::UnboundedCoefficients { cap: UNBOUNDED_CAP });
        }
        m = m.max(row);
    }
    if let Some(t) = rc.tail() {
        m = m.max(row_bound(&t.a, &t.b, &t.c));
    }
    Ok(GershgorinBound {
        m,
        probe_depth: depth,
        probe_only: !rc.has_tail(),
    })
}

/// Greedy nearest-neighbour matching of two multisets; returns the largest
/// matched distance, or `None` when the sizes differ.
pub fn pair_multisets(a: &[Complex64], b: &[Complex64]) -> Option<f64> {
    if a.len() != b.len() {
        return None;
    }
    let mut used = vec![false; b.len()];
    let mut worst = 0.0f64;
    for za in a {
        let (idx, d) = b
            .iter()
            .enumerate()
            .filter(|(i, _)| !used[*i])
            .map(|(i, zb)| (i, (za - zb).norm()))
            .min_by(|x, y| x.1.total_cmp(&y.1))?;
        used[idx] = true;
        worst = worst.max(d);
    }
    Some(worst)
}

/// True when the zero sets coincide within `tol` under greedy pairing.
pub fn same_zeros(a: &[Complex64], b: &[Complex64], tol: f64) -> bool {
    pair_multisets(a, b).is_some_and(|d| d <= tol)
}

/// Strict interlacing of sorted real zero sets with `outer.len() = inner.len() + 1`.
pub fn strictly_interlace(inner: &[f64], outer: &[f64]) -> bool {
    outer.len() == inner.len() + 1
        && inner
            .iter()
            .enumerate()
            .all(|(i, &z)| outer[i] < z && z < outer[i + 1])
}
