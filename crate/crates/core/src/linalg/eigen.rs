//! Eigenvalues of general complex matrices by Hessenberg reduction and
//! shifted QR with deflation.

use num_complex::Complex64;

use super::matrix::SquareMatrix;
use crate::error::{Error, Result};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// A complex Schur decomposition `m = z t z^H` with `t` upper triangular.
#[derive(Debug, Clone)]
pub struct Schur {
    pub z: SquareMatrix,
    pub t: SquareMatrix,
}

/// All eigenvalues with multiplicity, sorted by `(re, im)`.
pub fn eigenvalues(m: &SquareMatrix) -> Result<Vec<Complex64>> {
    if !m.is_finite() {
        return Err(Error::NonFinite);
    }
    let mut h = m.clone();
    balance(&mut h);
    hessenberg(&mut h, None);
    qr_iterate(&mut h, None, false)?;
    let mut ev = h.diag();
    sort_eigenvalues(&mut ev);
    Ok(ev)
}

/// Complex Schur form (no balancing, so `z` stays unitary).
pub fn schur(m: &SquareMatrix) -> Result<Schur> {
    if !m.is_finite() {
        return Err(Error::NonFinite);
    }
    let mut t = m.clone();
    let mut z = SquareMatrix::identity(m.dim());
    hessenberg(&mut t, Some(&mut z));
    qr_iterate(&mut t, Some(&mut z), true)?;
    Ok(Schur { z, t })
}

pub fn sort_eigenvalues(ev: &mut [Complex64]) {
    ev.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
}

/// Row/column scaling by powers of two to equalise norms.
fn balance(a: &mut SquareMatrix) {
    let n = a.dim();
    let l1 = |z: Complex64| z.re.abs() + z.im.abs();
    loop {
        let mut done = true;
        for i in 0..n {
            let mut c = 0.0;
            let mut r = 0.0;
            for j in 0..n {
                if j != i {
                    c += l1(a[(j, i)]);
                    r += l1(a[(i, j)]);
                }
            }
            if c == 0.0 || r == 0.0 {
                continue;
            }
            let s = c + r;
            let mut f = 1.0;
            let mut g = r / 2.0;
            while c < g {
                f *= 2.0;
                c *= 4.0;
            }
            g = r * 2.0;
            while c >= g {
                f /= 2.0;
                c /= 4.0;
            }
            if (c + r) / f < 0.95 * s {
                done = false;
                for j in 0..n {
                    a[(i, j)] /= f;
                    a[(j, i)] *= f;
                }
            }
        }
        if done {
            break;
        }
    }
}

/// Householder reduction to upper Hessenberg form, accumulating into `z`.
fn hessenberg(a: &mut SquareMatrix, mut z: Option<&mut SquareMatrix>) {
    let n = a.dim();
    if n < 3 {
        return;
    }
    for k in 0..n - 2 {
        let norm: f64 = (k + 1..n).map(|i| a[(i, k)].norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 {
            continue;
        }
        let x0 = a[(k + 1, k)];
        let phase = if x0.norm() == 0.0 {
            Complex64::new(1.0, 0.0)
        } else {
            x0 / x0.norm()
        };
        let alpha = -phase * norm;
        let mut v: Vec<Complex64> = (k + 1..n).map(|i| a[(i, k)]).collect();
        v[0] -= alpha;
        let vnorm: f64 = v.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
        if vnorm == 0.0 {
            continue;
        }
        v.iter_mut().for_each(|c| *c /= vnorm);
        // a <- (I - 2 v v^H) a
        for j in 0..n {
            let dot: Complex64 = v
                .iter()
                .enumerate()
                .map(|(i, vi)| vi.conj() * a[(k + 1 + i, j)])
                .sum();
            for (i, vi) in v.iter().enumerate() {
                a[(k + 1 + i, j)] -= *vi * dot * 2.0;
            }
        }
        // a <- a (I - 2 v v^H)
        for i in 0..n {
            let dot: Complex64 = v
                .iter()
                .enumerate()
                .map(|(j, vj)| a[(i, k + 1 + j)] * vj)
                .sum();
            for (j, vj) in v.iter().enumerate() {
                a[(i, k + 1 + j)] -= dot * vj.conj() * 2.0;
            }
        }
        if let Some(z) = z.as_deref_mut() {
            for i in 0..n {
                let dot: Complex64 = v
                    .iter()
                    .enumerate()
                    .map(|(j, vj)| z[(i, k + 1 + j)] * vj)
                    .sum();
                for (j, vj) in v.iter().enumerate() {
                    z[(i, k + 1 + j)] -= dot * vj.conj() * 2.0;
                }
            }
        }
        for i in k + 2..n {
            a[(i, k)] = ZERO;
        }
    }
}

/// Rotation `[[c, s], [-conj(s), c]]` mapping `(x, y)` to `(r, 0)`.
fn givens(x: Complex64, y: Complex64) -> (f64, Complex64) {
    let ax = x.norm();
    let r = ax.hypot(y.norm());
    if r == 0.0 {
        return (1.0, ZERO);
    }
    if ax == 0.0 {
        return (0.0, Complex64::new(1.0, 0.0));
    }
    (ax / r, (x / ax) * y.conj() / r)
}

/// Shifted QR on a Hessenberg matrix until it is upper triangular.
/// With `full`, rotations touch the whole matrix so the result is a Schur form.
fn qr_iterate(h: &mut SquareMatrix, mut z: Option<&mut SquareMatrix>, full: bool) -> Result<()> {
    let n = h.dim();
    let cap = 30 * n.max(2);
    let eps = f64::EPSILON;
    let hnorm = h.norm().max(f64::MIN_POSITIVE);
    let mut hi = n - 1;
    let mut total = 0usize;
    let mut since_deflation = 0usize;
    let mut rots: Vec<(f64, Complex64)> = Vec::with_capacity(n);
    while hi > 0 {
        let mut l = hi;
        while l > 0 {
            let sub = h[(l, l - 1)].norm();
            let local = h[(l - 1, l - 1)].norm() + h[(l, l)].norm();
            if sub <= eps * local || sub <= eps * 1e-3 * hnorm {
                h[(l, l - 1)] = ZERO;
                break;
            }
            l -= 1;
        }
        if l == hi {
            hi -= 1;
            since_deflation = 0;
            continue;
        }
        total += 1;
        since_deflation += 1;
        if total > cap {
            return Err(Error::NoConvergence {
                what: "eigenvalue QR iteration",
                iterations: total,
                residual: h[(hi, hi - 1)].norm(),
            });
        }
        let mu = if since_deflation % 11 == 10 {
            // exceptional shift to break cycles
            h[(hi, hi)] + Complex64::new(0.75 * h[(hi, hi - 1)].norm(), 0.0)
        } else {
            wilkinson(
                h[(hi - 1, hi - 1)],
                h[(hi - 1, hi)],
                h[(hi, hi - 1)],
                h[(hi, hi)],
            )
        };
        let (col_end, row_start) = if full { (n, 0) } else { (hi + 1, l) };
        for i in l..=hi {
            h[(i, i)] -= mu;
        }
        rots.clear();
        for k in l..hi {
            let (c, s) = givens(h[(k, k)], h[(k + 1, k)]);
            rots.push((c, s));
            for j in k..col_end {
                let (x, y) = (h[(k, j)], h[(k + 1, j)]);
                h[(k, j)] = x * c + s * y;
                h[(k + 1, j)] = -s.conj() * x + y * c;
            }
            h[(k + 1, k)] = ZERO;
        }
        for (idx, &(c, s)) in rots.iter().enumerate() {
            let k = l + idx;
            let row_end = (k + 2).min(hi + 1);
            for i in row_start..row_end {
                let (x, y) = (h[(i, k)], h[(i, k + 1)]);
                h[(i, k)] = x * c + s.conj() * y;
                h[(i, k + 1)] = -s * x + y * c;
            }
            if let Some(z) = z.as_deref_mut() {
                for i in 0..n {
                    let (x, y) = (z[(i, k)], z[(i, k + 1)]);
                    z[(i, k)] = x * c + s.conj() * y;
                    z[(i, k + 1)] = -s * x + y * c;
                }
            }
        }
        for i in l..=hi {
            h[(i, i)] += mu;
        }
    }
    Ok(())
}

/// Eigenvalue of the trailing 2x2 block closest to its last diagonal entry.
fn wilkinson(a: Complex64, b: Complex64, c: Complex64, d: Complex64) -> Complex64 {
    let half = (a - d) * 0.5;
    let disc = (half * half + b * c).sqrt();
    let m = (a + d) * 0.5;
    let (r1, r2) = (m + disc, m - disc);
    if (r1 - d).norm() <= (r2 - d).norm() {
        r1
    } else {
        r2
    }
}
