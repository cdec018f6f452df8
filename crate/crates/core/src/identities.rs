//! Residual checkers for the algebraic identities linking `V`, `G`, `Q`, `R`
//! and the associated families.
//!
//! Every identity is arranged as `sum of terms = 0`. The residual is the
//! Frobenius norm of that sum and the scale is the largest term norm, so a
//! check passes when `residual < tol * scale`.
//!
//! Conventions at negative indices: `V_{-1} = G_{-1} = 0`,
//! `Q_{-1} = R^T_{-1} = I`, `A_{-1} = I`.

use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{quasidet_last, BlockMatrix2x2, SquareMatrix};
use crate::par::Execution;
use crate::recurrence::{
    associated_shift_relation_check, generate_family, values, values_with_derivative, FamilyKind,
    RecurrenceCoefficients,
};
use crate::secondkind::{second_kind, SecondKindSequence, StieltjesSource};

/// Named identities.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum IdentityId {
    /// `(x-y) sum G^T_m(y) Q_m(x) = G^T_n(y) A_n Q_{n+1}(x) - G^T_{n+1}(y) C_{n+1} Q_n(x) + I`
    CdGq,
    /// `sum G^T_m Q_m = (G^T_{n+1})' C_{n+1} Q_n - (G^T_n)' A_n Q_{n+1}`
    ConfluentGq,
    /// `(x-y) sum R^T_m(y) V_m(x) = R^T_n(y) A_n V_{n+1}(x) - R^T_{n+1}(y) C_{n+1} V_n(x) - I`
    CdRv,
    /// `sum R^T_m V_m = R^T_n A_n V'_{n+1} - R^T_{n+1} C_{n+1} V'_n`
    ConfluentRv,
    /// `Q_{n-1} G^T_{n-1} - V_{n-1} R^T_{n-1} = 0`
    LemmaQgVr,
    /// `Q_{n-1} G^T_n - V_{n-1} R^T_n = C_n^{-1}`
    #[serde(rename = "LO_1")]
    Lo1,
    /// `V_n R^T_{n-1} - Q_n G^T_{n-1} = A_{n-1}^{-1}`
    #[serde(rename = "LO_2")]
    Lo2,
    /// `I = G^T_{n+1} C_{n+1} Q_n - G^T_n A_n Q_{n+1}`
    Ide,
    /// The variant with `A_{n+1}` in place of `A_n`; reported, never gated.
    IdePrinted,
    /// `G^T_n (x - B_n) = G^T_{n+1} C_{n+1} + G^T_{n-1} A_{n-1}`
    E1,
    /// `(x - B_n) Q_n = A_n Q_{n+1} + C_n Q_{n-1}`
    E2,
    /// `sum_{k=1}^n V^(k)_{n-k}(y) A_{k-1}^{-1} V_{k-1}(x) = (V_n(x) - V_n(y)) / (x - y)`
    CdAssocV,
    /// `sum_{k=1}^n G^T_{k-1}(x) C_k^{-1} G^(k)T_{n-k}(y) = (G^T_n(x) - G^T_n(y)) / (x - y)`
    CdAssocG,
    /// `sum_{k=1}^n V^(k)_{n-k} A_{k-1}^{-1} V_{k-1} = V'_n`
    ConfluentAssocV,
    /// `sum_{k=1}^n G^T_{k-1} C_k^{-1} G^(k)T_{n-k} = (G^T_n)'`
    ConfluentAssocG,
    /// `V^(k)_{n-k} A_{k-1}^{-1} = V_n R^T_{k-1} - Q_n G^T_{k-1}`
    KrepV,
    /// `C_k^{-1} G^(k)T_{n-k} = Q_{k-1} G^T_n - V_{k-1} R^T_n`
    KrepG,
    /// `R^T_{k-1} A_{k-1} = (V_k - Q_k Q_{k-1}^{-1} V_{k-1})^{-1}`
    QuasidetR,
    /// `G^T_{k-1} A_{k-1} = -(Q_k - V_k V_{k-1}^{-1} Q_{k-1})^{-1}`
    QuasidetG,
    /// `C_k Q_{k-1} = (G^T_k - G^T_{k-1} R^{-T}_{k-1} R^T_k)^{-1}`
    QuasidetQ,
    /// `C_k V_{k-1} = -(R^T_k - R^T_{k-1} G^{-T}_{k-1} G^T_k)^{-1}`
    QuasidetV,
    /// Shift relation between `V^(k-1)`, `V^(k)` and `V^(k+1)`.
    ShiftV,
    /// Shift relation between `G^(k-1)`, `G^(k)` and `G^(k+1)`.
    ShiftG,
}

impl IdentityId {
    pub const ALL: [IdentityId; 23] = [
        IdentityId::CdGq,
        IdentityId::ConfluentGq,
        IdentityId::CdRv,
        IdentityId::ConfluentRv,
        IdentityId::LemmaQgVr,
        IdentityId::Lo1,
        IdentityId::Lo2,
        IdentityId::Ide,
        IdentityId::IdePrinted,
        IdentityId::E1,
        IdentityId::E2,
        IdentityId::CdAssocV,
        IdentityId::CdAssocG,
        IdentityId::ConfluentAssocV,
        IdentityId::ConfluentAssocG,
        IdentityId::KrepV,
        IdentityId::KrepG,
        IdentityId::QuasidetR,
        IdentityId::QuasidetG,
        IdentityId::QuasidetQ,
        IdentityId::QuasidetV,
        IdentityId::ShiftV,
        IdentityId::ShiftG,
    ];

    /// Whether a failure of this identity counts as a failure of the battery.
    pub fn gated(&self) -> bool {
        *self != IdentityId::IdePrinted
    }

    pub fn name(&self) -> &'static str {
        match self {
            IdentityId::CdGq => "CD_GQ",
            IdentityId::ConfluentGq => "CONFLUENT_GQ",
            IdentityId::CdRv => "CD_RV",
            IdentityId::ConfluentRv => "CONFLUENT_RV",
            IdentityId::LemmaQgVr => "LEMMA_QG_VR",
            IdentityId::Lo1 => "LO_1",
            IdentityId::Lo2 => "LO_2",
            IdentityId::Ide => "IDE",
            IdentityId::IdePrinted => "IDE_PRINTED",
            IdentityId::E1 => "E1",
            IdentityId::E2 => "E2",
            IdentityId::CdAssocV => "CD_ASSOC_V",
            IdentityId::CdAssocG => "CD_ASSOC_G",
            IdentityId::ConfluentAssocV => "CONFLUENT_ASSOC_V",
            IdentityId::ConfluentAssocG => "CONFLUENT_ASSOC_G",
            IdentityId::KrepV => "KREP_V",
            IdentityId::KrepG => "KREP_G",
            IdentityId::QuasidetR => "QUASIDET_R",
            IdentityId::QuasidetG => "QUASIDET_G",
            IdentityId::QuasidetQ => "QUASIDET_Q",
            IdentityId::QuasidetV => "QUASIDET_V",
            IdentityId::ShiftV => "SHIFT_V",
            IdentityId::ShiftG => "SHIFT_G",
        }
    }
}

impl fmt::Display for IdentityId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Tolerances by identity and index.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TolerancePolicy {
    pub default: f64,
    /// Used for `n <= small_n_max`.
    pub small_n: f64,
    pub small_n_max: usize,
    pub overrides: Vec<(IdentityId, f64)>,
}

impl Default for TolerancePolicy {
    fn default() -> Self {
        TolerancePolicy {
            default: 1e-9,
            small_n: 1e-12,
            small_n_max: 5,
            overrides: Vec::new(),
        }
    }
}

impl TolerancePolicy {
    /// A flat tolerance for every identity and index.
    pub fn uniform(tol: f64) -> Self {
        TolerancePolicy {
            default: tol,
            small_n: tol,
            small_n_max: 0,
            overrides: Vec::new(),
        }
    }

    pub fn tol(&self, id: IdentityId, n: usize) -> f64 {
        if let Some(&(_, t)) = self.overrides.iter().find(|(i, _)| *i == id) {
            return t;
        }
        if n <= self.small_n_max {
            self.small_n
        } else {
            self.default
        }
    }
}

/// One evaluated identity.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IdentityReport {
    pub identity_id: IdentityId,
    pub n: usize,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub k: Option<usize>,
    pub x: Complex64,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub y: Option<Complex64>,
    pub residual: f64,
    pub scale: f64,
    pub tol: f64,
    pub pass: bool,
}

impl IdentityReport {
    /// `residual / scale`, or the raw residual when the scale vanishes.
    pub fn relative(&self) -> f64 {
        if self.scale > 0.0 {
            self.residual / self.scale
        } else {
            self.residual
        }
    }

    fn from_terms(
        id: IdentityId,
        n: usize,
        k: Option<usize>,
        x: Complex64,
        y: Option<Complex64>,
        terms: &[SquareMatrix],
        policy: &TolerancePolicy,
    ) -> Self {
        let dim = terms[0].dim();
        let mut sum = SquareMatrix::zeros(dim);
        for t in terms {
            sum += t;
        }
        let scale = terms.iter().map(|t| t.norm()).fold(0.0, f64::max);
        Self::from_residual(id, n, k, x, y, sum.norm(), scale, policy)
    }

    #[allow(clippy::too_many_arguments)]
    fn from_residual(
        id: IdentityId,
        n: usize,
        k: Option<usize>,
        x: Complex64,
        y: Option<Complex64>,
        residual: f64,
        scale: f64,
        policy: &TolerancePolicy,
    ) -> Self {
        let tol = policy.tol(id, n);
        let pass = residual.is_finite() && scale.is_finite() && residual <= tol * scale;
        IdentityReport {
            identity_id: id,
            n,
            k,
            x,
            y,
            residual,
            scale,
            tol,
            pass,
        }
    }
}

/// Everything the checkers need at one point, for indices up to `n_max + 1`.
#[derive(Debug, Clone)]
pub struct PointData {
    pub x: Complex64,
    /// `V_n` and `V'_n`.
    pub v: Vec<SquareMatrix>,
    pub vd: Vec<SquareMatrix>,
    /// `G^T_n` and `(G^T_n)'`.
    pub gt: Vec<SquareMatrix>,
    pub gtd: Vec<SquareMatrix>,
    /// `vk[k][m] = V^(k)_m` and `gkt[k][m] = G^(k)T_m` for `k + m <= n_max + 1`.
    pub vk: Vec<Vec<SquareMatrix>>,
    pub gkt: Vec<Vec<SquareMatrix>>,
    pub second_kind: Option<SecondKindSequence>,
}

impl PointData {
    /// Polynomial data up to `n_max + 1`, plus second-kind functions when a
    /// source is given.
    pub fn new(
        rc: &RecurrenceCoefficients,
        src: Option<&StieltjesSource>,
        x: Complex64,
        n_max: usize,
    ) -> Result<Self> {
        let top = n_max + 1;
        let (v, vd) = values_with_derivative(rc, x, top)?;
        let (g, gd) = values_with_derivative(rc.transposed(), x, top)?;
        let gt = g.iter().map(|m| m.transpose()).collect();
        let gtd = gd.iter().map(|m| m.transpose()).collect();
        let mut vk = Vec::with_capacity(top + 1);
        let mut gkt = Vec::with_capacity(top + 1);
        for k in 0..=top {
            let shifted = rc.shifted(k);
            vk.push(values(&shifted, x, top - k)?);
            gkt.push(
                values(shifted.transposed(), x, top - k)?
                    .iter()
                    .map(|m| m.transpose())
                    .collect(),
            );
        }
        let second_kind = src.map(|s| second_kind(rc, s, x, top)).transpose()?;
        Ok(PointData {
            x,
            v,
            vd,
            gt,
            gtd,
            vk,
            gkt,
            second_kind,
        })
    }

    /// Largest `n` the checkers can use.
    pub fn n_max(&self) -> usize {
        self.v.len() - 2
    }

    fn zeros(&self) -> SquareMatrix {
        SquareMatrix::zeros(self.v[0].dim())
    }

    fn v_at(&self, n: isize) -> SquareMatrix {
        if n < 0 {
            self.zeros()
        } else {
            self.v[n as usize].clone()
        }
    }

    fn gt_at(&self, n: isize) -> SquareMatrix {
        if n < 0 {
            self.zeros()
        } else {
            self.gt[n as usize].clone()
        }
    }

    fn sk(&self) -> Result<&SecondKindSequence> {
        self.second_kind.as_ref().ok_or_else(|| {
            Error::InvalidInput("point data built without second-kind functions".into())
        })
    }

    fn q_at(&self, n: isize) -> Result<SquareMatrix> {
        Ok(self.sk()?.q_at(n))
    }

    fn rt_at(&self, n: isize) -> Result<SquareMatrix> {
        Ok(self.sk()?.rt_at(n))
    }

    fn check_n(&self, n: usize) -> Result<()> {
        if n > self.n_max() {
            Err(Error::OutOfRange(n))
        } else {
            Ok(())
        }
    }
}

fn distinct(x: Complex64, y: Complex64) -> Result<Complex64> {
    let d = x - y;
    if d.norm() == 0.0 {
        Err(Error::InvalidInput(
            "the divided-difference forms need x != y".into(),
        ))
    } else {
        Ok(d)
    }
}

/// The two Christoffel-Darboux sums from data at `x` (for `Q`, `V`) and `y`
/// (for `G`, `R`).
pub fn check_cd_with(
    rc: &RecurrenceCoefficients,
    px: &PointData,
    py: &PointData,
    n: usize,
    policy: &TolerancePolicy,
) -> Result<[IdentityReport; 2]> {
    px.check_n(n)?;
    py.check_n(n)?;
    let (x, y) = (px.x, py.x);
    let d = distinct(x, y)?;
    let id = SquareMatrix::identity(rc.dim());
    let (a, c) = (rc.a(n)?, rc.c(n + 1)?);
    let ni = n as isize;

    let mut gq: Vec<SquareMatrix> = (0..=n)
        .map(|m| Ok((&py.gt[m] * &px.q_at(m as isize)?).scale(d)))
        .collect::<Result<_>>()?;
    gq.push(-(&(&py.gt[n] * a) * &px.q_at(ni + 1)?));
    gq.push(&(&py.gt[n + 1] * c) * &px.q_at(ni)?);
    gq.push(-&id);

    let mut rv: Vec<SquareMatrix> = (0..=n)
        .map(|m| Ok((&py.rt_at(m as isize)? * &px.v[m]).scale(d)))
        .collect::<Result<_>>()?;
    rv.push(-(&(&py.rt_at(ni)? * a) * &px.v[n + 1]));
    rv.push(&(&py.rt_at(ni + 1)? * c) * &px.v[n]);
    rv.push(id);

    Ok([
        IdentityReport::from_terms(IdentityId::CdGq, n, None, x, Some(y), &gq, policy),
        IdentityReport::from_terms(IdentityId::CdRv, n, None, x, Some(y), &rv, policy),
    ])
}

pub fn check_cd(
    rc: &RecurrenceCoefficients,
    src: &StieltjesSource,
    n: usize,
    x: Complex64,
    y: Complex64,
) -> Result<[IdentityReport; 2]> {
    distinct(x, y)?;
    let px = PointData::new(rc, Some(src), x, n)?;
    let py = PointData::new(rc, Some(src), y, n)?;
    check_cd_with(rc, &px, &py, n, &TolerancePolicy::default())
}

pub fn check_confluent_with(
    rc: &RecurrenceCoefficients,
    p: &PointData,
    n: usize,
    policy: &TolerancePolicy,
) -> Result<[IdentityReport; 2]> {
    p.check_n(n)?;
    let (a, c) = (rc.a(n)?, rc.c(n + 1)?);
    let ni = n as isize;

    let mut gq: Vec<SquareMatrix> = (0..=n)
        .map(|m| Ok(&p.gt[m] * &p.q_at(m as isize)?))
        .collect::<Result<_>>()?;
    gq.push(-(&(&p.gtd[n + 1] * c) * &p.q_at(ni)?));
    gq.push(&(&p.gtd[n] * a) * &p.q_at(ni + 1)?);

    let mut rv: Vec<SquareMatrix> = (0..=n)
        .map(|m| Ok(&p.rt_at(m as isize)? * &p.v[m]))
        .collect::<Result<_>>()?;
    rv.push(-(&(&p.rt_at(ni)? * a) * &p.vd[n + 1]));
    rv.push(&(&p.rt_at(ni + 1)? * c) * &p.vd[n]);

    Ok([
        IdentityReport::from_terms(IdentityId::ConfluentGq, n, None, p.x, None, &gq, policy),
        IdentityReport::from_terms(IdentityId::ConfluentRv, n, None, p.x, None, &rv, policy),
    ])
}

pub fn check_confluent(
    rc: &RecurrenceCoefficients,
    src: &StieltjesSource,
    n: usize,
    x: Complex64,
) -> Result<[IdentityReport; 2]> {
    let p = PointData::new(rc, Some(src), x, n)?;
    check_confluent_with(rc, &p, n, &TolerancePolicy::default())
}

/// The orthogonality lemma, both Liouville-Ostrogradski formulas, and the
/// constant pairing in its corrected and printed index forms.
pub fn check_lo_with(
    rc: &RecurrenceCoefficients,
    p: &PointData,
    n: usize,
    policy: &TolerancePolicy,
) -> Result<[IdentityReport; 5]> {
    p.check_n(n)?;
    let ni = n as isize;
    let x = p.x;
    let report = |id, terms: &[SquareMatrix]| {
        IdentityReport::from_terms(id, n, None, x, None, terms, policy)
    };

    let lemma = [
        &p.q_at(ni - 1)? * &p.gt_at(ni - 1),
        -(&p.v_at(ni - 1) * &p.rt_at(ni - 1)?),
    ];
    let lo1 = [
        &p.q_at(ni - 1)? * &p.gt[n],
        -(&p.v_at(ni - 1) * &p.rt_at(ni)?),
        rc.c_inv(n)?.scale_re(-1.0),
    ];
    let lo2 = [
        &p.v[n] * &p.rt_at(ni - 1)?,
        -(&p.q_at(ni)? * &p.gt_at(ni - 1)),
        -rc.a_signed(ni - 1)?.inverse()?,
    ];
    let id = SquareMatrix::identity(rc.dim());
    let left = &(&p.gt[n + 1] * rc.c(n + 1)?) * &p.q_at(ni)?;
    let ide = [
        left.clone(),
        -(&(&p.gt[n] * rc.a(n)?) * &p.q_at(ni + 1)?),
        -&id,
    ];
    let ide_printed = [left, -(&(&p.gt[n] * rc.a(n + 1)?) * &p.q_at(ni + 1)?), -&id];
    Ok([
        report(IdentityId::LemmaQgVr, &lemma),
        report(IdentityId::Lo1, &lo1),
        report(IdentityId::Lo2, &lo2),
        report(IdentityId::Ide, &ide),
        report(IdentityId::IdePrinted, &ide_printed),
    ])
}

pub fn check_lo(
    rc: &RecurrenceCoefficients,
    src: &StieltjesSource,
    n: usize,
    x: Complex64,
) -> Result<[IdentityReport; 5]> {
    let p = PointData::new(rc, Some(src), x, n)?;
    check_lo_with(rc, &p, n, &TolerancePolicy::default())
}

/// The right recurrence of `G^T` and the left recurrence of `Q`, read off
/// generated values.
pub fn check_recovered_recurrences_with(
    rc: &RecurrenceCoefficients,
    p: &PointData,
    n: usize,
    policy: &TolerancePolicy,
) -> Result<[IdentityReport; 2]> {
    p.check_n(n)?;
    let ni = n as isize;
    let x = p.x;
    let xb = (-rc.b(n)?).shift(x);
    let e1 = [
        &p.gt[n] * &xb,
        -(&p.gt[n + 1] * rc.c(n + 1)?),
        -(&p.gt_at(ni - 1) * &rc.a_signed(ni - 1)?),
    ];
    let e2 = [
        &xb * &p.q_at(ni)?,
        -(rc.a(n)? * &p.q_at(ni + 1)?),
        -(rc.c(n)? * &p.q_at(ni - 1)?),
    ];
    Ok([
        IdentityReport::from_terms(IdentityId::E1, n, None, x, None, &e1, policy),
        IdentityReport::from_terms(IdentityId::E2, n, None, x, None, &e2, policy),
    ])
}

/// Divided difference `(P(x) - P(y)) / (x - y)` from values, switching to
/// synthetic division on coefficients when the points nearly coincide.
fn divided_difference(
    rc: &RecurrenceCoefficients,
    kind: FamilyKind,
    n: usize,
    px_val: &SquareMatrix,
    py_val: &SquareMatrix,
    x: Complex64,
    y: Complex64,
) -> Result<SquareMatrix> {
    if (x - y).norm() < 1e-4 {
        let table = generate_family(rc, kind, n)?;
        Ok(table.polys[n].divided_difference(x, y))
    } else {
        Ok((px_val - py_val).scale(Complex64::new(1.0, 0.0) / (x - y)))
    }
}

/// Christoffel-Darboux sums over the associated families, in divided
/// difference form (`x != y`) and confluent form (at `x`).
pub fn check_assoc_cd_with(
    rc: &RecurrenceCoefficients,
    px: &PointData,
    py: &PointData,
    n: usize,
    policy: &TolerancePolicy,
) -> Result<[IdentityReport; 4]> {
    px.check_n(n)?;
    py.check_n(n)?;
    let (x, y) = (px.x, py.x);
    distinct(x, y)?;

    let v_sum = |pl: &PointData| -> Result<Vec<SquareMatrix>> {
        (1..=n)
            .map(|k| Ok(&(&pl.vk[k][n - k] * rc.a_inv(k - 1)?) * &px.v[k - 1]))
            .collect()
    };
    let g_sum = |pl: &PointData| -> Result<Vec<SquareMatrix>> {
        (1..=n)
            .map(|k| Ok(&(&px.gt[k - 1] * rc.c_inv(k)?) * &pl.gkt[k][n - k]))
            .collect()
    };

    let mut cd_v = v_sum(py)?;
    cd_v.push(-divided_difference(
        rc,
        FamilyKind::V,
        n,
        &px.v[n],
        &py.v[n],
        x,
        y,
    )?);
    let mut cd_g = g_sum(py)?;
    let g_dd = divided_difference(
        rc,
        FamilyKind::G,
        n,
        &px.gt[n].transpose(),
        &py.gt[n].transpose(),
        x,
        y,
    )?;
    cd_g.push(-g_dd.transpose());
    let mut conf_v = v_sum(px)?;
    conf_v.push(-&px.vd[n]);
    let mut conf_g = g_sum(px)?;
    conf_g.push(-&px.gtd[n]);

    let report = |id, y, terms: &[SquareMatrix]| {
        IdentityReport::from_terms(id, n, None, x, y, terms, policy)
    };
    Ok([
        report(IdentityId::CdAssocV, Some(y), &cd_v),
        report(IdentityId::CdAssocG, Some(y), &cd_g),
        report(IdentityId::ConfluentAssocV, None, &conf_v),
        report(IdentityId::ConfluentAssocG, None, &conf_g),
    ])
}

pub fn check_assoc_cd(
    rc: &RecurrenceCoefficients,
    n: usize,
    x: Complex64,
    y: Complex64,
) -> Result<[IdentityReport; 4]> {
    distinct(x, y)?;
    let px = PointData::new(rc, None, x, n)?;
    let py = PointData::new(rc, None, y, n)?;
    check_assoc_cd_with(rc, &px, &py, n, &TolerancePolicy::default())
}

fn quasidet_inverse(
    a: SquareMatrix,
    b: SquareMatrix,
    c: SquareMatrix,
    d: SquareMatrix,
    what: &str,
) -> Result<SquareMatrix> {
    let m = BlockMatrix2x2::new(a, b, c, d)?;
    quasidet_last(&m)
        .and_then(|s| s.inverse())
        .map_err(|e| e.named(what))
}

/// Representations of `V^(k)` and `G^(k)` through `V, Q` and `G, R`, and the
/// four quasideterminant expressions for their coefficients.
pub fn check_k_representation_with(
    rc: &RecurrenceCoefficients,
    p: &PointData,
    n: usize,
    k: usize,
    policy: &TolerancePolicy,
) -> Result<[IdentityReport; 6]> {
    p.check_n(n)?;
    if k == 0 || k > n {
        return Err(Error::InvalidInput(format!(
            "k-representations need 1 <= k <= n, got k={k}, n={n}"
        )));
    }
    let (ni, ki) = (n as isize, k as isize);
    let x = p.x;
    let a_prev = rc.a(k - 1)?;
    let c_k = rc.c(k)?;

    let krep_v = [
        &p.vk[k][n - k] * rc.a_inv(k - 1)?,
        -(&p.v[n] * &p.rt_at(ki - 1)?),
        &p.q_at(ni)? * &p.gt[k - 1],
    ];
    let krep_g = [
        rc.c_inv(k)? * &p.gkt[k][n - k],
        -(&p.q_at(ki - 1)? * &p.gt[n]),
        &p.v[k - 1] * &p.rt_at(ni)?,
    ];

    let (qp, qk) = (p.q_at(ki - 1)?, p.q_at(ki)?);
    let (rp, rk) = (p.rt_at(ki - 1)?, p.rt_at(ki)?);
    let (vp, vk) = (p.v[k - 1].clone(), p.v[k].clone());
    let (gp, gk) = (p.gt[k - 1].clone(), p.gt[k].clone());
    let qd_r = [
        &rp * a_prev,
        -quasidet_inverse(qp.clone(), vp.clone(), qk.clone(), vk.clone(), "Q_{k-1}")?,
    ];
    let qd_g = [
        &gp * a_prev,
        quasidet_inverse(vp.clone(), qp.clone(), vk, qk, "V_{k-1}")?,
    ];
    let qd_q = [
        c_k * &qp,
        -quasidet_inverse(rp.clone(), rk.clone(), gp.clone(), gk.clone(), "R^T_{k-1}")?,
    ];
    let qd_v = [c_k * &vp, quasidet_inverse(gp, gk, rp, rk, "G^T_{k-1}")?];

    let report = |id, terms: &[SquareMatrix]| {
        IdentityReport::from_terms(id, n, Some(k), x, None, terms, policy)
    };
    Ok([
        report(IdentityId::KrepV, &krep_v),
        report(IdentityId::KrepG, &krep_g),
        report(IdentityId::QuasidetR, &qd_r),
        report(IdentityId::QuasidetG, &qd_g),
        report(IdentityId::QuasidetQ, &qd_q),
        report(IdentityId::QuasidetV, &qd_v),
    ])
}

pub fn check_k_representation(
    rc: &RecurrenceCoefficients,
    src: &StieltjesSource,
    n: usize,
    k: usize,
    x: Complex64,
) -> Result<[IdentityReport; 6]> {
    let p = PointData::new(rc, Some(src), x, n)?;
    check_k_representation_with(rc, &p, n, k, &TolerancePolicy::default())
}

/// Shift relations linking consecutive associated families.
pub fn check_shift_relations(
    rc: &RecurrenceCoefficients,
    n: usize,
    k: usize,
    x: Complex64,
    policy: &TolerancePolicy,
) -> Result<[IdentityReport; 2]> {
    let r = associated_shift_relation_check(rc, k, x, n)?;
    Ok([
        IdentityReport::from_residual(
            IdentityId::ShiftV,
            n,
            Some(k),
            x,
            None,
            r.v_residual,
            r.v_scale,
            policy,
        ),
        IdentityReport::from_residual(
            IdentityId::ShiftG,
            n,
            Some(k),
            x,
            None,
            r.g_residual,
            r.g_scale,
            policy,
        ),
    ])
}

/// Grid for [`run_battery`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BatteryConfig {
    pub points: Vec<Complex64>,
    pub n_max: usize,
    /// Largest `k` for the k-representation and shift-relation checks.
    pub k_max: usize,
    pub policy: TolerancePolicy,
    #[serde(default)]
    pub execution: Execution,
}

impl BatteryConfig {
    pub fn new(points: Vec<Complex64>, n_max: usize, k_max: usize) -> Self {
        BatteryConfig {
            points,
            n_max,
            k_max,
            policy: TolerancePolicy::default(),
            execution: Execution::default(),
        }
    }
}

/// Every identity over `n = 0..=n_max` (and `1 <= k <= min(n, k_max)`),
/// at every point and every ordered pair of distinct points.
pub fn run_battery(
    rc: &RecurrenceCoefficients,
    src: &StieltjesSource,
    cfg: &BatteryConfig,
) -> Result<Vec<IdentityReport>> {
    run_battery_against(rc, rc, src, cfg)
}

/// [`run_battery`] with families generated from `families` but identities
/// evaluated with the coefficients of `rc`. A mismatch between the two shows
/// up as failing reports, which is how coefficient faults are detected.
pub fn run_battery_against(
    families: &RecurrenceCoefficients,
    rc: &RecurrenceCoefficients,
    src: &StieltjesSource,
    cfg: &BatteryConfig,
) -> Result<Vec<IdentityReport>> {
    let data: Vec<PointData> = cfg
        .execution
        .map(&cfg.points, |&x| {
            PointData::new(families, Some(src), x, cfg.n_max)
        })
        .into_iter()
        .collect::<Result<_>>()?;
    let jobs: Vec<(usize, Option<usize>, usize)> = (0..data.len())
        .flat_map(|i| {
            let pairs = (0..data.len()).filter(move |&j| j != i).map(Some);
            std::iter::once(None).chain(pairs).map(move |j| (i, j))
        })
        .flat_map(|(i, j)| (0..=cfg.n_max).map(move |n| (i, j, n)))
        .collect();
    let chunks = cfg
        .execution
        .map(&jobs, |&(i, j, n)| -> Result<Vec<IdentityReport>> {
            let p = &data[i];
            let mut out = Vec::new();
            match j {
                Some(j) => {
                    let q = &data[j];
                    if p.x == q.x {
                        return Ok(out);
                    }
                    out.extend(check_cd_with(rc, p, q, n, &cfg.policy)?);
                    out.extend(check_assoc_cd_with(rc, p, q, n, &cfg.policy)?);
                }
                None => {
                    out.extend(check_confluent_with(rc, p, n, &cfg.policy)?);
                    out.extend(check_lo_with(rc, p, n, &cfg.policy)?);
                    out.extend(check_recovered_recurrences_with(rc, p, n, &cfg.policy)?);
                    for k in 1..=n.min(cfg.k_max) {
                        out.extend(check_k_representation_with(rc, p, n, k, &cfg.policy)?);
                        out.extend(check_shift_relations(rc, n, k, p.x, &cfg.policy)?);
                    }
                }
            }
            Ok(out)
        });
    let mut reports = Vec::new();
    for c in chunks {
        reports.extend(c?);
    }
    Ok(reports)
}

/// Gated reports that failed.
pub fn failures(reports: &[IdentityReport]) -> Vec<&IdentityReport> {
    reports
        .iter()
        .filter(|r| r.identity_id.gated() && !r.pass)
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::re;
    use crate::samples::random_biorthogonal;

    const Q0: f64 = 0.535_898_384_862_245_4;

    fn chebyshev() -> (RecurrenceCoefficients, StieltjesSource) {
        let rc = RecurrenceCoefficients::scalar_chebyshev(0.5, 0.0);
        let src = StieltjesSource::fixed_point_from_tail(&rc).unwrap();
        (rc, src)
    }

    #[test]
    fn cd_at_zero_and_for_chebyshev() {
        let (rc, src) = chebyshev();
        for r in check_cd(&rc, &src, 0, re(2.0), re(3.0)).unwrap() {
            assert!(r.residual < 1e-13, "{r:?}");
        }
        for r in check_cd(&rc, &src, 10, re(2.0), re(1.5)).unwrap() {
            assert!(r.relative() < 1e-10, "{r:?}");
        }
    }

    #[test]
    fn confluent_at_zero_by_hand() {
        let (rc, src) = chebyshev();
        let p = PointData::new(&rc, Some(&src), re(2.0), 0).unwrap();
        let lhs = &p.gt[0] * &p.q_at(0).unwrap();
        assert!((lhs[(0, 0)].re - Q0).abs() < 1e-12);
        assert!((p.gtd[1][(0, 0)] - re(2.0)).norm() < 1e-15);
        let [gq, rv] = check_confluent(&rc, &src, 0, re(2.0)).unwrap();
        assert!(gq.pass && rv.pass, "{gq:?} {rv:?}");
    }

    #[test]
    fn liouville_ostrogradski() {
        let (rc, src) = chebyshev();
        let reports = check_lo(&rc, &src, 0, re(2.0)).unwrap();
        assert!(reports[1].residual < 1e-15);
        for r in &check_lo(&rc, &src, 6, re(2.0)).unwrap()[..4] {
            assert!(r.residual < 1e-11, "{r:?}");
        }
        let rc = random_biorthogonal(3, 5, 11).unwrap();
        let src = StieltjesSource::fixed_point_from_tail(&rc).unwrap();
        let x = Complex64::new(3.0, 0.5);
        let p = PointData::new(&rc, Some(&src), x, 10).unwrap();
        for n in 0..=10 {
            let reps = check_lo_with(&rc, &p, n, &TolerancePolicy::uniform(1e-9)).unwrap();
            for r in &reps[..4] {
                assert!(r.pass, "{r:?}");
            }
        }
    }

    #[test]
    fn printed_pairing_index_fails_on_a_varying_recurrence() {
        let rc = random_biorthogonal(2, 6, 2).unwrap();
        let src = StieltjesSource::fixed_point_from_tail(&rc).unwrap();
        let reps = check_lo(&rc, &src, 2, re(2.5)).unwrap();
        assert!(reps[3].pass);
        assert!(!reps[4].pass);
        assert!(!IdentityId::IdePrinted.gated());
    }

    #[test]
    fn assoc_cd_cases() {
        let rc = random_biorthogonal(2, 4, 5).unwrap();
        let x = Complex64::new(0.4, 0.1);
        let y = re(-1.2);
        let reps = check_assoc_cd(&rc, 1, x, y).unwrap();
        assert!(reps.iter().all(|r| r.relative() < 1e-14), "{reps:?}");
        let (rc, _) = chebyshev();
        for r in check_assoc_cd(&rc, 5, re(2.0), re(-2.0)).unwrap() {
            assert!(r.residual < 1e-11, "{r:?}");
        }
        let rc = random_biorthogonal(2, 6, 7).unwrap();
        for r in check_assoc_cd(&rc, 8, re(1.3), re(1.3 + 1e-6)).unwrap() {
            assert!(r.relative() < 1e-9, "{r:?}");
        }
    }

    #[test]
    fn k_representation_cases() {
        let (rc, src) = chebyshev();
        for r in check_k_representation(&rc, &src, 7, 2, re(2.0)).unwrap() {
            assert!(r.residual < 1e-10, "{r:?}");
        }
        let p = PointData::new(&rc, Some(&src), re(2.0), 1).unwrap();
        let c1q0 = rc.c(1).unwrap() * &p.q_at(0).unwrap();
        assert!((c1q0[(0, 0)].re - 0.267_949_192_431_122_7).abs() < 1e-12);
        let reps = check_k_representation_with(&rc, &p, 1, 1, &TolerancePolicy::default()).unwrap();
        assert!(reps.iter().all(|r| r.pass), "{reps:?}");
        assert!(check_k_representation(&rc, &src, 3, 4, re(2.0)).is_err());
    }

    #[test]
    fn battery_on_a_random_set() {
        let rc = random_biorthogonal(2, 6, 1).unwrap();
        let src = StieltjesSource::fixed_point_from_tail(&rc).unwrap();
        let cfg = BatteryConfig::new(vec![re(2.0), Complex64::new(3.0, 0.5), re(-4.0)], 8, 4);
        let reports = run_battery(&rc, &src, &cfg).unwrap();
        let bad = failures(&reports);
        assert!(
            bad.is_empty(),
            "{:?}",
            bad.iter().take(5).collect::<Vec<_>>()
        );
        for id in IdentityId::ALL {
            assert!(reports.iter().any(|r| r.identity_id == id), "{id} missing");
        }
    }

    #[test]
    fn corrupted_coefficient_is_caught() {
        // families from the clean recurrence, checked against a corrupted C_2
        let clean = random_biorthogonal(2, 6, 1).unwrap();
        let bad = clean.with_scaled_c(2, 1.01).unwrap();
        let src = StieltjesSource::fixed_point_from_tail(&clean).unwrap();
        let p = PointData::new(&clean, Some(&src), re(2.0), 3).unwrap();
        let policy = TolerancePolicy::default();
        assert!(!check_lo_with(&bad, &p, 2, &policy).unwrap()[1].pass);
        assert!(check_lo_with(&bad, &p, 3, &policy).unwrap()[1].pass);
        assert!(check_lo_with(&clean, &p, 2, &policy).unwrap()[1].pass);
    }

    #[test]
    fn report_serialization_names() {
        let r = IdentityReport::from_residual(
            IdentityId::Lo1,
            3,
            None,
            re(2.0),
            None,
            0.0,
            1.0,
            &TolerancePolicy::default(),
        );
        let s = serde_json::to_string(&r).unwrap();
        assert!(s.contains("\"LO_1\""), "{s}");
        assert!(serde_json::to_string(&IdentityId::CdGq)
            .unwrap()
            .contains("CD_GQ"));
        assert!(serde_json::to_string(&IdentityId::LemmaQgVr)
            .unwrap()
            .contains("LEMMA_QG_VR"));
        for id in IdentityId::ALL {
            let s = serde_json::to_string(&id).unwrap();
            assert_eq!(s, format!("\"{}\"", id.name()));
        }
    }
}
