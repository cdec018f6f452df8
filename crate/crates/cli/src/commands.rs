//! The four subcommands.

use std::path::Path;

use mbop::asymptotics::{
    default_grid, run_studies, ConvergenceStudy, StudyOptions, TargetId, Trend,
};
use mbop::identities::{failures, run_battery_against, BatteryConfig, IdentityReport};
use mbop::recurrence::{generate_family, FamilyKind, Mode, RecurrenceCoefficients, Triple};
use mbop::spectral::{gershgorin_bound, zeros};
use mbop::{Complex64, Error, Execution, SquareMatrix};
use serde::Serialize;

use crate::output::{write_atomic, write_json};
use crate::spec::ProblemSpec;
use crate::{CliError, Outcome};

/// Options shared by every subcommand.
pub struct Options {
    pub seed: u64,
    pub force_inside_spectrum: bool,
    pub tol: Option<f64>,
    pub corrupt_c: Option<(usize, f64)>,
}

/// Library errors caused by the input map to validation failures, the rest
/// to numerical failures.
pub fn classify(e: Error) -> CliError {
    match e {
        Error::InvalidCoefficients(_)
        | Error::InvalidInput(_)
        | Error::DimensionMismatch { .. }
        | Error::InsideSpectrum { .. }
        | Error::SingularCoefficient { .. }
        | Error::NotPositiveDefinite
        | Error::OutOfRange(_)
        | Error::UnboundedCoefficients { .. } => CliError::Validation(e.to_string()),
        _ => CliError::Numerical(e.to_string()),
    }
}

fn probe_depth(rc: &RecurrenceCoefficients, spec: &ProblemSpec) -> usize {
    rc.head_len() + spec.n_max + spec.k_max + 2
}

fn ensure_outside(
    rc: &RecurrenceCoefficients,
    spec: &ProblemSpec,
    points: &[Complex64],
    opts: &Options,
) -> Result<(), CliError> {
    if opts.force_inside_spectrum {
        return Ok(());
    }
    let bound = gershgorin_bound(rc, probe_depth(rc, spec)).map_err(classify)?;
    match points.iter().find(|z| z.norm() <= bound.m) {
        Some(&point) => Err(classify(Error::InsideSpectrum {
            point,
            bound: bound.m,
        })),
        None => Ok(()),
    }
}

#[derive(Serialize)]
struct FamilyOut {
    family: &'static str,
    k: usize,
    /// `polynomials[n][p]` is the coefficient of `x^p` in the n-th member.
    polynomials: Vec<Vec<SquareMatrix>>,
}

#[derive(Serialize)]
struct CoefficientsOut {
    head: Vec<Triple>,
    tail: Option<Triple>,
}

#[derive(Serialize)]
struct GenerateOut {
    dim: usize,
    mode: Mode,
    n_max: usize,
    k_max: usize,
    coefficients: CoefficientsOut,
    families: Vec<FamilyOut>,
}

pub fn generate(spec: &ProblemSpec, out: &Path, opts: &Options) -> Result<Outcome, CliError> {
    let rc = spec.recurrence(opts.seed)?;
    let mut kinds = vec![("V", 0, FamilyKind::V), ("G", 0, FamilyKind::G)];
    for k in 1..=spec.k_max {
        kinds.push(("V", k, FamilyKind::VAssoc(k)));
        kinds.push(("G", k, FamilyKind::GAssoc(k)));
    }
    let mut families = Vec::with_capacity(kinds.len());
    for (name, k, kind) in kinds {
        let table = generate_family(&rc, kind, spec.n_max).map_err(classify)?;
        families.push(FamilyOut {
            family: name,
            k,
            polynomials: table.polys.iter().map(|p| p.coeffs().to_vec()).collect(),
        });
    }
    let len = rc.head_len().max(spec.n_max + spec.k_max + 2);
    let report = GenerateOut {
        dim: rc.dim(),
        mode: rc.mode(),
        n_max: spec.n_max,
        k_max: spec.k_max,
        coefficients: CoefficientsOut {
            head: rc.materialize(len).map_err(classify)?,
            tail: rc.tail().cloned(),
        },
        families,
    };
    write_json(out, &report)?;
    Ok(Outcome::Pass)
}

pub fn identities(spec: &ProblemSpec, out: &Path, opts: &Options) -> Result<Outcome, CliError> {
    let rc = spec.recurrence(opts.seed)?;
    let points = spec.require_points()?;
    ensure_outside(&rc, spec, &points, opts)?;
    let src = spec.source(&rc)?;
    let mut cfg = BatteryConfig::new(points, spec.n_max, spec.k_max);
    cfg.policy = spec.policy(opts.tol)?;
    let checked = match opts.corrupt_c {
        Some((index, factor)) => rc.with_scaled_c(index, factor).map_err(classify)?,
        None => rc.clone(),
    };
    let reports: Vec<IdentityReport> =
        run_battery_against(&rc, &checked, &src, &cfg).map_err(classify)?;
    write_json(out, &reports)?;
    let failed = failures(&reports);
    eprintln!("{} reports, {} failing", reports.len(), failed.len());
    for r in failed.iter().take(10) {
        eprintln!(
            "  {} n={}{} x={} residual {:.3e} scale {:.3e} tol {:.1e}",
            r.identity_id,
            r.n,
            r.k.map(|k| format!(" k={k}")).unwrap_or_default(),
            r.x,
            r.residual,
            r.scale,
            r.tol
        );
    }
    Ok(if failed.is_empty() {
        Outcome::Pass
    } else {
        Outcome::Fail
    })
}

pub fn zeros_cmd(spec: &ProblemSpec, out: &Path, opts: &Options) -> Result<Outcome, CliError> {
    let rc = spec.recurrence(opts.seed)?;
    let ns = if spec.zeros.n.is_empty() {
        vec![spec.n_max]
    } else {
        spec.zeros.n.clone()
    };
    let ks = if spec.zeros.k.is_empty() {
        vec![0]
    } else {
        spec.zeros.k.clone()
    };
    if ns.contains(&0) {
        return Err(CliError::Validation(
            "zeros.n: truncation orders must be positive".into(),
        ));
    }
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["k", "n", "re", "im"])
        .map_err(CliError::io)?;
    for &k in &ks {
        for &n in &ns {
            let mut zs = zeros(&rc, k, n).map_err(classify)?.zeros;
            zs.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
            for z in zs {
                w.write_record([
                    k.to_string(),
                    n.to_string(),
                    format!("{:e}", z.re),
                    format!("{:e}", z.im),
                ])
                .map_err(CliError::io)?;
            }
        }
    }
    let bytes = w.into_inner().map_err(|e| CliError::io(e.into_error()))?;
    write_atomic(out, &bytes)?;
    Ok(Outcome::Pass)
}

#[derive(Serialize)]
struct StudySummary<'a> {
    target: &'static str,
    x: Complex64,
    #[serde(skip_serializing_if = "Option::is_none")]
    k: Option<usize>,
    n_grid: &'a [usize],
    errors: &'a [f64],
    limit: &'a SquareMatrix,
    converged: bool,
    trend: &'a Trend,
    #[serde(skip_serializing_if = "Option::is_none")]
    cross_check: Option<f64>,
}

fn summary(s: &ConvergenceStudy) -> StudySummary<'_> {
    StudySummary {
        target: s.target_id.name(),
        x: s.x,
        k: s.k,
        n_grid: &s.n_grid,
        errors: &s.errors,
        limit: &s.limit,
        converged: s.converged(),
        trend: &s.trend,
        cross_check: s.cross_check,
    }
}

/// Sibling path `<out>.summary.json`.
pub fn summary_path(out: &Path) -> std::path::PathBuf {
    let mut name = out
        .file_name()
        .map(|n| n.to_os_string())
        .unwrap_or_default();
    name.push(".summary.json");
    out.with_file_name(name)
}

pub fn asymptotics(spec: &ProblemSpec, out: &Path, opts: &Options) -> Result<Outcome, CliError> {
    let rc = spec.recurrence(opts.seed)?;
    let points = spec.require_points()?;
    let targets: Vec<TargetId> = spec.targets()?;
    let grid = if spec.n_grid.is_empty() {
        default_grid()
    } else {
        spec.n_grid.clone()
    };
    let src = spec.source(&rc)?;
    let study_opts = StudyOptions {
        k: spec.k.unwrap_or(StudyOptions::default().k),
        force_inside_spectrum: opts.force_inside_spectrum,
        probe_depth: probe_depth(&rc, spec).max(StudyOptions::default().probe_depth),
    };
    let studies = run_studies(
        &rc,
        &src,
        &targets,
        &points,
        &grid,
        &study_opts,
        Execution::default(),
    )
    .into_iter()
    .collect::<Result<Vec<_>, _>>()
    .map_err(classify)?;

    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["target", "x_re", "x_im", "n", "error"])
        .map_err(CliError::io)?;
    for s in &studies {
        for (n, e) in s.n_grid.iter().zip(&s.errors) {
            w.write_record([
                s.target_id.name().to_string(),
                format!("{:e}", s.x.re),
                format!("{:e}", s.x.im),
                n.to_string(),
                format!("{e:e}"),
            ])
            .map_err(CliError::io)?;
        }
    }
    let bytes = w.into_inner().map_err(|e| CliError::io(e.into_error()))?;
    write_atomic(out, &bytes)?;
    let summaries: Vec<StudySummary> = studies.iter().map(summary).collect();
    write_json(&summary_path(out), &summaries)?;

    let stalled: Vec<&ConvergenceStudy> = studies.iter().filter(|s| !s.converged()).collect();
    for s in &stalled {
        eprintln!(
            "{} at {} did not converge (errors {:?})",
            s.target_id.name(),
            s.x,
            s.errors
        );
    }
    Ok(if stalled.is_empty() {
        Outcome::Pass
    } else {
        Outcome::Fail
    })
}
