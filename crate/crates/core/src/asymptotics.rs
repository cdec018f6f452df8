//! Convergence studies for ratio, product and decay limits of recurrences
//! with a constant tail.
//!
//! Every limit comes from a closed form or from the tail transforms
//! `F_{A,B,C}` (left) and `F_{C,B,A}` (right); nothing is extrapolated.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::SquareMatrix;
use crate::par::Execution;
use crate::recurrence::{
    generate_family, values, FamilyKind, FamilyTable, MatrixPolynomial, RecurrenceCoefficients,
};
use crate::secondkind::{
    associated_transform, second_kind, transform_sequence, Side, StieltjesSource,
};
use crate::spectral::gershgorin_bound;

/// Quantities with a known limit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum TargetId {
    /// `p_n / p_{n-1}` at `N = 1`, limit the dominant root.
    ScalarPRatio,
    /// `q_n / q_{n-1}` at `N = 1`, limit the minimal root.
    ScalarQRatio,
    /// `p_n q_n` at `N = 1`, limit `1 / sqrt((z-b)^2 - 4ac)`.
    ScalarPqProduct,
    /// `V_n^{-1} V^(1)_{n-1} -> Q_0 A_0`.
    MarkovV,
    /// `G^(1)T_{n-1} G_n^{-T} -> C_1 Q_0`.
    MarkovG,
    /// `V_{n-1} V_n^{-1} A_{n-1}^{-1} -> F_{C,B,A}`.
    RatioV,
    /// `C_n^{-1} G_n^{-T} G^T_{n-1} -> F_{C,B,A}`.
    RatioG,
    /// `V_n^{-1} Q_n -> 0`.
    DecayVq,
    /// `G_n^{-1} R_n -> 0`.
    DecayGr,
    /// `V_{n-1}^{-1} C_n^{-1} G_n^{-T}` and `V_n^{-1} A_{n-1}^{-1} G_{n-1}^{-T}`, both `-> 0`;
    /// the error is the larger norm.
    DecayCross,
    /// `Q_n Q_{n-1}^{-1} C_n^{-1} -> F_{A,B,C}`.
    RatioQ,
    /// `A_{n-1}^{-1} R_{n-1}^{-T} R^T_n -> F_{A,B,C}`.
    RatioR,
    /// `R_n^{-T} V_n^{-1} -> F_{C,B,A}^{-1} - A F_{A,B,C} C`.
    ProductRv,
    /// `G_n^{-T} Q_n^{-1}`, same limit as [`TargetId::ProductRv`].
    ProductGq,
    /// `V_n^{-1} V^(k)_{n-k} -> R^T_{k-1} A_{k-1}`.
    KAssocV,
    /// `G^(k)T_{n-k} G_n^{-T} -> C_k Q_{k-1}`.
    KAssocG,
    /// Transform of the `k`-th associated functional `-> F_{A,B,C}`; the grid indexes `k`.
    UkTransform,
}

impl TargetId {
    pub const ALL: [TargetId; 17] = [
        TargetId::ScalarPRatio,
        TargetId::ScalarQRatio,
        TargetId::ScalarPqProduct,
        TargetId::MarkovV,
        TargetId::MarkovG,
        TargetId::RatioV,
        TargetId::RatioG,
        TargetId::DecayVq,
        TargetId::DecayGr,
        TargetId::DecayCross,
        TargetId::RatioQ,
        TargetId::RatioR,
        TargetId::ProductRv,
        TargetId::ProductGq,
        TargetId::KAssocV,
        TargetId::KAssocG,
        TargetId::UkTransform,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            TargetId::ScalarPRatio => "SCALAR_P_RATIO",
            TargetId::ScalarQRatio => "SCALAR_Q_RATIO",
            TargetId::ScalarPqProduct => "SCALAR_PQ_PRODUCT",
            TargetId::MarkovV => "MARKOV_V",
            TargetId::MarkovG => "MARKOV_G",
            TargetId::RatioV => "RATIO_V",
            TargetId::RatioG => "RATIO_G",
            TargetId::DecayVq => "DECAY_VQ",
            TargetId::DecayGr => "DECAY_GR",
            TargetId::DecayCross => "DECAY_CROSS",
            TargetId::RatioQ => "RATIO_Q",
            TargetId::RatioR => "RATIO_R",
            TargetId::ProductRv => "PRODUCT_RV",
            TargetId::ProductGq => "PRODUCT_GQ",
            TargetId::KAssocV => "K_ASSOC_V",
            TargetId::KAssocG => "K_ASSOC_G",
            TargetId::UkTransform => "UK_TRANSFORM",
        }
    }

    pub fn parse(s: &str) -> Option<TargetId> {
        TargetId::ALL
            .into_iter()
            .find(|t| t.name().eq_ignore_ascii_case(s))
    }

    pub fn is_scalar(&self) -> bool {
        matches!(
            self,
            TargetId::ScalarPRatio | TargetId::ScalarQRatio | TargetId::ScalarPqProduct
        )
    }

    pub fn is_decay(&self) -> bool {
        matches!(
            self,
            TargetId::DecayVq | TargetId::DecayGr | TargetId::DecayCross
        )
    }
}

/// Trend summary of an error sequence.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Trend {
    /// Non-increasing over the last half of the grid (ties at round-off count).
    pub decreasing: bool,
    /// `decreasing` with final error below `1e-3` of the initial one, or
    /// `converged_by` set.
    pub converged: bool,
    /// First grid index from which every error sits at round-off level.
    pub converged_by: Option<usize>,
}

/// Round-off floor relative to `scale`.
const FLOOR: f64 = 1e-12;

/// Classifies `errors` on `grid`; `floors[i]` is the round-off level at `grid[i]`.
pub fn assess(grid: &[usize], errors: &[f64], floors: &[f64]) -> Trend {
    let len = errors.len();
    if len == 0 {
        return Trend {
            decreasing: false,
            converged: false,
            converged_by: None,
        };
    }
    let at_floor = |i: usize| errors[i] <= floors[i];
    let start = len / 2;
    let decreasing = (start.max(1)..len).all(|i| errors[i] <= errors[i - 1] || at_floor(i));
    let converged_by = (0..len).find(|&i| (i..len).all(at_floor)).map(|i| grid[i]);
    let shrink = errors[len - 1] < 1e-3 * errors[0];
    Trend {
        decreasing,
        converged: converged_by.is_some() || (decreasing && shrink),
        converged_by,
    }
}

/// Values of one target on an index grid with their distance to the limit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceStudy {
    pub target_id: TargetId,
    pub x: Complex64,
    /// Shift for the k-associated targets.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub k: Option<usize>,
    pub n_grid: Vec<usize>,
    pub values: Vec<SquareMatrix>,
    pub limit: SquareMatrix,
    pub errors: Vec<f64>,
    pub trend: Trend,
    /// Largest relative disagreement of the two transform estimates
    /// ([`TargetId::UkTransform`] only).
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub cross_check: Option<f64>,
}

impl ConvergenceStudy {
    pub fn converged(&self) -> bool {
        self.trend.converged
    }
}

/// Options for [`run_study_with`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StudyOptions {
    /// Shift for `K_ASSOC_V` / `K_ASSOC_G`.
    pub k: usize,
    /// Skip the Gershgorin exclusion check.
    pub force_inside_spectrum: bool,
    /// Rows probed for the Gershgorin bound.
    pub probe_depth: usize,
}

impl Default for StudyOptions {
    fn default() -> Self {
        StudyOptions {
            k: 2,
            force_inside_spectrum: false,
            probe_depth: 64,
        }
    }
}

/// Geometric default grid.
pub fn default_grid() -> Vec<usize> {
    vec![5, 10, 20, 40, 80, 160]
}

fn ensure_outside(rc: &RecurrenceCoefficients, x: Complex64, opts: &StudyOptions) -> Result<()> {
    if opts.force_inside_spectrum {
        return Ok(());
    }
    let bound = gershgorin_bound(rc, opts.probe_depth)?;
    if x.norm() <= bound.m {
        return Err(Error::InsideSpectrum {
            point: x,
            bound: bound.m,
        });
    }
    Ok(())
}

/// Dominant and minimal roots of `a r^2 - (z - b) r + c = 0` and the
/// matching square root `s` with `|z - b + s| >= |z - b - s|`.
pub fn scalar_roots(
    a: Complex64,
    b: Complex64,
    c: Complex64,
    z: Complex64,
) -> (Complex64, Complex64, Complex64) {
    let w = z - b;
    let mut s = (w * w - 4.0 * a * c).sqrt();
    if (w + s).norm() < (w - s).norm() {
        s = -s;
    }
    ((w + s) / (2.0 * a), (w - s) / (2.0 * a), s)
}

fn inv(m: &SquareMatrix, what: &str) -> Result<SquareMatrix> {
    m.inverse().map_err(|e| e.named(what))
}

/// `V_{n-1} V_n^{-1} A_{n-1}^{-1}` for `n = 1..=n_max` (index 0 unused) by
/// the forward continued fraction `(x - B_{n-1} - C_{n-1} r_{n-1} A_{n-2})^{-1}`.
/// Inverting `V_n` directly loses the subdominant directions once the
/// growth rates of the modes separate.
pub fn forward_ratios(
    rc: &RecurrenceCoefficients,
    x: Complex64,
    n_max: usize,
) -> Result<Vec<SquareMatrix>> {
    let dim = rc.dim();
    let mut out = vec![SquareMatrix::zeros(dim)];
    for n in 1..=n_max {
        let mut m = (-rc.b(n - 1)?).shift(x);
        if n >= 2 {
            m = &m - &(&(rc.c(n - 1)? * &out[n - 1]) * rc.a(n - 2)?);
        }
        out.push(inv(&m, &format!("x - B_{} - C_{} r A", n - 1, n - 1))?);
    }
    Ok(out)
}

/// Ratio sequences of the four families, all computed without inverting a
/// growing or decaying block.
struct Ratios {
    /// `V_{n-1} V_n^{-1} A_{n-1}^{-1}`.
    v: Vec<SquareMatrix>,
    /// `C_n^{-1} G_n^{-T} G^T_{n-1}`.
    g: Vec<SquareMatrix>,
    /// `Q_n Q_{n-1}^{-1} C_n^{-1}`.
    q: Vec<SquareMatrix>,
    /// `A_{n-1}^{-1} R_{n-1}^{-T} R^T_n`.
    r: Vec<SquareMatrix>,
}

impl Ratios {
    fn new(
        rc: &RecurrenceCoefficients,
        src: &StieltjesSource,
        x: Complex64,
        n_max: usize,
    ) -> Result<Ratios> {
        let t = rc.transposed();
        let fl = src.evaluate(x, Side::Left)?;
        let ft = src.transposed().evaluate(x, Side::Left)?;
        Ok(Ratios {
            v: forward_ratios(rc, x, n_max)?,
            g: forward_ratios(t, x, n_max)?
                .iter()
                .map(|m| m.transpose())
                .collect(),
            q: transform_sequence(rc, &fl, x, n_max)?,
            r: transform_sequence(t, &ft, x, n_max)?
                .iter()
                .map(|m| m.transpose())
                .collect(),
        })
    }

    /// `(V_n R^T_n)^{-1} = r^V_{n+1}^{-1} - A_n r^Q_{n+1} C_{n+1}`, from the
    /// mixed Wronskian `V_{n+1} R^T_n - Q_{n+1} G^T_n = A_n^{-1}` and
    /// `Q_n G^T_n = V_n R^T_n`.
    fn product_rv(&self, rc: &RecurrenceCoefficients, n: usize) -> Result<SquareMatrix> {
        Ok(&inv(&self.v[n + 1], "V_n V_{n+1}^{-1}")?
            - &(&(rc.a(n)? * &self.q[n + 1]) * rc.c(n + 1)?))
    }

    /// `(Q_n G^T_n)^{-1}`, the same matrix computed from the `G` and `R` sides.
    fn product_gq(&self, rc: &RecurrenceCoefficients, n: usize) -> Result<SquareMatrix> {
        Ok(&inv(&self.g[n + 1], "G^T_{n+1}^{-1} G^T_n")?
            - &(&(rc.a(n)? * &self.r[n + 1]) * rc.c(n + 1)?))
    }
}

pub fn run_study(
    rc: &RecurrenceCoefficients,
    src: &StieltjesSource,
    target: TargetId,
    x: Complex64,
    n_grid: &[usize],
) -> Result<ConvergenceStudy> {
    run_study_with(rc, src, target, x, n_grid, &StudyOptions::default())
}

pub fn run_study_with(
    rc: &RecurrenceCoefficients,
    src: &StieltjesSource,
    target: TargetId,
    x: Complex64,
    n_grid: &[usize],
    opts: &StudyOptions,
) -> Result<ConvergenceStudy> {
    let tail = rc
        .tail()
        .ok_or_else(|| Error::InvalidInput("limit studies need a constant tail".into()))?
        .clone();
    if n_grid.is_empty() {
        return Err(Error::InvalidInput("empty grid".into()));
    }
    ensure_outside(rc, x, opts)?;
    if target.is_scalar() && rc.dim() != 1 {
        return Err(Error::InvalidInput(format!(
            "{} needs N = 1",
            target.name()
        )));
    }
    let k = opts.k;
    let min_n = match target {
        TargetId::KAssocV | TargetId::KAssocG => k.max(1),
        TargetId::UkTransform => 0,
        _ => 1,
    };
    if let Some(&bad) = n_grid.iter().find(|&&n| n < min_n) {
        return Err(Error::InvalidInput(format!(
            "grid index {bad} below {min_n} for {}",
            target.name()
        )));
    }
    let n_max = *n_grid.iter().max().expect("non-empty grid");

    if target == TargetId::UkTransform {
        return uk_transform_study(rc, src, x, n_grid, tail.a.dim());
    }

    let rt_rc = rc.transposed();
    let v = values(rc, x, n_max)?;
    let gt: Vec<SquareMatrix> = values(rt_rc, x, n_max)?
        .iter()
        .map(|m| m.transpose())
        .collect();
    let sk = second_kind(rc, src, x, n_max.max(k))?;
    let q = |n: usize| sk.q_at(n as isize);
    let rt = |n: usize| sk.rt_at(n as isize);
    let f_left = src.evaluate(x, Side::Left)?;
    let f_right = src.evaluate(x, Side::Right)?;
    let ratios = match target {
        TargetId::RatioV
        | TargetId::RatioG
        | TargetId::RatioQ
        | TargetId::RatioR
        | TargetId::ProductRv
        | TargetId::ProductGq => Some(Ratios::new(rc, src, x, n_max + 1)?),
        _ => None,
    };
    let ratio = || ratios.as_ref().expect("ratio targets");

    let assoc_shift = match target {
        TargetId::MarkovV | TargetId::MarkovG => Some(1),
        TargetId::KAssocV | TargetId::KAssocG => Some(k),
        _ => None,
    };
    let (vk, gkt) = match assoc_shift {
        Some(s) => {
            let shifted = rc.shifted(s);
            let vk = values(&shifted, x, n_max - s)?;
            let gkt: Vec<SquareMatrix> = values(shifted.transposed(), x, n_max - s)?
                .iter()
                .map(|m| m.transpose())
                .collect();
            (vk, gkt)
        }
        None => (Vec::new(), Vec::new()),
    };

    let one = Complex64::new(1.0, 0.0);
    let limit = match target {
        TargetId::ScalarPRatio | TargetId::ScalarQRatio | TargetId::ScalarPqProduct => {
            let (p, m, s) = scalar_roots(tail.a[(0, 0)], tail.b[(0, 0)], tail.c[(0, 0)], x);
            let l = match target {
                TargetId::ScalarPRatio => p,
                TargetId::ScalarQRatio => m,
                _ => one / s,
            };
            SquareMatrix::scalar(1, l)
        }
        TargetId::MarkovV => &q(0) * rc.a(0)?,
        TargetId::MarkovG => rc.c(1)? * &q(0),
        TargetId::RatioV | TargetId::RatioG => f_right.clone(),
        TargetId::RatioQ | TargetId::RatioR => f_left.clone(),
        TargetId::ProductRv | TargetId::ProductGq => {
            &inv(&f_right, "F_{C,B,A}")? - &(&(&tail.a * &f_left) * &tail.c)
        }
        TargetId::DecayVq | TargetId::DecayGr | TargetId::DecayCross => {
            SquareMatrix::zeros(rc.dim())
        }
        TargetId::KAssocV => &rt(k - 1) * rc.a(k - 1)?,
        TargetId::KAssocG => rc.c(k)? * &q(k - 1),
        TargetId::UkTransform => unreachable!("handled above"),
    };

    let mut vals = Vec::with_capacity(n_grid.len());
    let mut errors = Vec::with_capacity(n_grid.len());
    let mut floors = Vec::with_capacity(n_grid.len());
    for &n in n_grid {
        let (value, err) = match target {
            TargetId::ScalarPRatio => {
                let val = &v[n] * &inv(&v[n - 1], "p_{n-1}")?;
                (val, None)
            }
            TargetId::ScalarQRatio => (&q(n) * &inv(&q(n - 1), "q_{n-1}")?, None),
            TargetId::ScalarPqProduct => (&v[n] * &q(n), None),
            TargetId::MarkovV => (&inv(&v[n], "V_n")? * &vk[n - 1], None),
            TargetId::MarkovG => (&gkt[n - 1] * &inv(&gt[n], "G^T_n")?, None),
            TargetId::RatioV => (ratio().v[n].clone(), None),
            TargetId::RatioG => (ratio().g[n].clone(), None),
            TargetId::RatioQ => (ratio().q[n].clone(), None),
            TargetId::RatioR => (ratio().r[n].clone(), None),
            TargetId::ProductRv => (ratio().product_rv(rc, n)?, None),
            TargetId::ProductGq => (ratio().product_gq(rc, n)?, None),
            TargetId::DecayVq => (&inv(&v[n], "V_n")? * &q(n), None),
            TargetId::DecayGr => (&inv(&gt[n].transpose(), "G_n")? * &rt(n).transpose(), None),
            TargetId::DecayCross => {
                let first = &(&inv(&v[n - 1], "V_{n-1}")? * rc.c_inv(n)?) * &inv(&gt[n], "G^T_n")?;
                let second =
                    &(&inv(&v[n], "V_n")? * rc.a_inv(n - 1)?) * &inv(&gt[n - 1], "G^T_{n-1}")?;
                let e = first.norm().max(second.norm());
                (first, Some(e))
            }
            TargetId::KAssocV => (&inv(&v[n], "V_n")? * &vk[n - k], None),
            TargetId::KAssocG => (&gkt[n - k] * &inv(&gt[n], "G^T_n")?, None),
            TargetId::UkTransform => unreachable!("handled above"),
        };
        if !value.is_finite() {
            return Err(Error::NonFinite);
        }
        let err = err.unwrap_or_else(|| value.dist(&limit));
        floors.push(if target.is_decay() {
            0.0
        } else {
            FLOOR * limit.norm().max(value.norm())
        });
        errors.push(err);
        vals.push(value);
    }
    let trend = assess(n_grid, &errors, &floors);
    Ok(ConvergenceStudy {
        target_id: target,
        x,
        k: assoc_shift,
        n_grid: n_grid.to_vec(),
        values: vals,
        limit,
        errors,
        trend,
        cross_check: None,
    })
}

fn uk_transform_study(
    rc: &RecurrenceCoefficients,
    src: &StieltjesSource,
    x: Complex64,
    k_grid: &[usize],
    dim: usize,
) -> Result<ConvergenceStudy> {
    let limit = src.evaluate(x, Side::Left)?;
    let mut vals = Vec::with_capacity(k_grid.len());
    let mut errors = Vec::with_capacity(k_grid.len());
    let mut floors = Vec::with_capacity(k_grid.len());
    let mut cross = 0.0f64;
    for &k in k_grid {
        let value = if k == 0 {
            let sk = second_kind(rc, src, x, 0)?;
            sk.q[0].clone()
        } else {
            let (from_r, from_q) = associated_transform(rc, src, k, x)?;
            cross = cross.max(from_r.rel_dist(&from_q));
            from_q
        };
        debug_assert_eq!(value.dim(), dim);
        errors.push(value.dist(&limit));
        floors.push(FLOOR * limit.norm().max(value.norm()));
        vals.push(value);
    }
    let trend = assess(k_grid, &errors, &floors);
    Ok(ConvergenceStudy {
        target_id: TargetId::UkTransform,
        x,
        k: None,
        n_grid: k_grid.to_vec(),
        values: vals,
        limit,
        errors,
        trend,
        cross_check: Some(cross),
    })
}

/// Studies for every `(target, x)` pair, run in parallel under `exec`.
pub fn run_studies(
    rc: &RecurrenceCoefficients,
    src: &StieltjesSource,
    targets: &[TargetId],
    points: &[Complex64],
    n_grid: &[usize],
    opts: &StudyOptions,
    exec: Execution,
) -> Vec<Result<ConvergenceStudy>> {
    let jobs: Vec<(TargetId, Complex64)> = targets
        .iter()
        .flat_map(|&t| points.iter().map(move |&x| (t, x)))
        .collect();
    exec.map(&jobs, |&(t, x)| run_study_with(rc, src, t, x, n_grid, opts))
}

/// `DECAY_VQ` together with `DECAY_CROSS`; `DECAY_GR` is available through
/// [`run_study`].
pub fn decay_study(
    rc: &RecurrenceCoefficients,
    src: &StieltjesSource,
    x: Complex64,
    n_grid: &[usize],
) -> Result<[ConvergenceStudy; 2]> {
    Ok([
        run_study(rc, src, TargetId::DecayVq, x, n_grid)?,
        run_study(rc, src, TargetId::DecayCross, x, n_grid)?,
    ])
}

/// Constant-coefficient families `U` (left, `x U_n = A U_{n+1} + B U_n + C U_{n-1}`)
/// and `T` (right, `x T_n = T_{n+1} C + T_n B + T_{n-1} A`). The second
/// table stores `T_n^T` in the convention of [`FamilyKind::G`].
pub fn chebyshev_reference(
    a: &SquareMatrix,
    b: &SquareMatrix,
    c: &SquareMatrix,
    n_max: usize,
) -> Result<(FamilyTable, FamilyTable)> {
    let rc = RecurrenceCoefficients::constant_unchecked(a.clone(), b.clone(), c.clone())?;
    Ok((
        generate_family(&rc, FamilyKind::V, n_max)?,
        generate_family(&rc, FamilyKind::G, n_max)?,
    ))
}

/// Right coefficients `M_j` with `p = sum_j basis[j] M_j`, by matching
/// coefficients from the top degree down. `basis[j]` must have degree `j`
/// and a nonsingular leading coefficient.
pub fn expand_in_basis(
    p: &MatrixPolynomial,
    basis: &[MatrixPolynomial],
) -> Result<Vec<SquareMatrix>> {
    let deg = p.degree();
    if basis.len() <= deg {
        return Err(Error::InvalidInput(
            "basis shorter than the polynomial degree".into(),
        ));
    }
    let mut rem = p.clone();
    let mut out = vec![SquareMatrix::zeros(p.dim()); deg + 1];
    for j in (0..=deg).rev() {
        let lead = basis[j].leading();
        let top = rem
            .coeffs()
            .get(j)
            .cloned()
            .unwrap_or_else(|| SquareMatrix::zeros(p.dim()));
        let m = lead
            .solve(&top)
            .map_err(|e| e.named("leading coefficient"))?;
        rem = rem.sub(&basis[j].right_mul(&m));
        out[j] = m;
    }
    Ok(out)
}

/// `Delta_{0,l,k}`: the constant coefficient of `U_l` (family of the constant
/// tail recurrence) in the `V^(k)` basis.
pub fn delta_0(rc: &RecurrenceCoefficients, ell: usize, k: usize) -> Result<SquareMatrix> {
    if ell == 0 {
        return Ok(SquareMatrix::identity(rc.dim()));
    }
    let u = generate_family(rc, FamilyKind::ChebyshevU, ell)?;
    let basis = generate_family(rc, FamilyKind::VAssoc(k), ell)?;
    Ok(expand_in_basis(&u.polys[ell], &basis.polys)?.swap_remove(0))
}

/// Deviation of `Delta_{0,l,k}` from `I delta_{l,0}` along a `k` grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OrthogonalityStudy {
    pub ell: usize,
    pub k_grid: Vec<usize>,
    pub deltas: Vec<SquareMatrix>,
    pub deviations: Vec<f64>,
    pub trend: Trend,
}

pub fn orthogonality_study(
    rc: &RecurrenceCoefficients,
    ell: usize,
    k_grid: &[usize],
) -> Result<OrthogonalityStudy> {
    let target = if ell == 0 {
        SquareMatrix::identity(rc.dim())
    } else {
        SquareMatrix::zeros(rc.dim())
    };
    let deltas = k_grid
        .iter()
        .map(|&k| delta_0(rc, ell, k))
        .collect::<Result<Vec<_>>>()?;
    let deviations: Vec<f64> = deltas.iter().map(|d| d.dist(&target)).collect();
    let floors: Vec<f64> = deltas
        .iter()
        .map(|d| FLOOR * d.norm().max(target.norm()))
        .collect();
    let trend = assess(k_grid, &deviations, &floors);
    Ok(OrthogonalityStudy {
        ell,
        k_grid: k_grid.to_vec(),
        deltas,
        deviations,
        trend,
    })
}
