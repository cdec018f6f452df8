//! Problem specification files.

use std::collections::BTreeMap;
use std::path::Path;

use mbop::asymptotics::TargetId;
use mbop::identities::{IdentityId, TolerancePolicy};
use mbop::recurrence::{Mode, RecurrenceCoefficients, Triple};
use mbop::samples::{random_biorthogonal, random_orthonormal};
use mbop::secondkind::StieltjesSource;
use mbop::{Complex64, SquareMatrix};
use serde::{Deserialize, Serialize};

use crate::CliError;

/// A complex number written either as a bare real or as `[re, im]`.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Point {
    Real(f64),
    Pair([f64; 2]),
}

impl Point {
    pub fn value(self) -> Complex64 {
        match self {
            Point::Real(re) => Complex64::new(re, 0.0),
            Point::Pair([re, im]) => Complex64::new(re, im),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TripleSpec {
    pub a: SquareMatrix,
    pub b: SquareMatrix,
    pub c: SquareMatrix,
}

impl From<TripleSpec> for Triple {
    fn from(t: TripleSpec) -> Triple {
        Triple::new(t.a, t.b, t.c)
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RandomSpec {
    pub head_length: usize,
}

/// Coefficients as an explicit head, an optional constant tail, or a seeded
/// random set.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CoefficientSpec {
    #[serde(default)]
    pub explicit: Vec<TripleSpec>,
    pub tail: Option<TripleSpec>,
    /// Repeats the tail this many times as the head (with `C_0 = I`).
    pub head_length: Option<usize>,
    pub random: Option<RandomSpec>,
}

/// How the tail transform is evaluated.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TransformSpec {
    #[default]
    FixedPoint,
    ClosedForm,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ZerosSpec {
    /// Truncation orders; defaults to `[n_max]`.
    #[serde(default)]
    pub n: Vec<usize>,
    /// Associated shifts; defaults to `[0]`.
    #[serde(default)]
    pub k: Vec<usize>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemSpec {
    pub dim: usize,
    pub mode: Mode,
    pub coefficients: CoefficientSpec,
    #[serde(default)]
    pub points: Vec<Point>,
    pub n_max: usize,
    #[serde(default)]
    pub k_max: usize,
    #[serde(default)]
    pub tolerances: BTreeMap<String, f64>,
    #[serde(default)]
    pub transform: TransformSpec,
    #[serde(default)]
    pub targets: Vec<String>,
    #[serde(default)]
    pub n_grid: Vec<usize>,
    /// Shift for the k-associated limit targets.
    pub k: Option<usize>,
    #[serde(default)]
    pub zeros: ZerosSpec,
}

fn invalid(msg: impl Into<String>) -> CliError {
    CliError::Validation(msg.into())
}

impl ProblemSpec {
    pub fn load(path: &Path) -> Result<ProblemSpec, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| invalid(format!("cannot read {}: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| invalid(format!("spec: {e}")))
    }

    pub fn points(&self) -> Vec<Complex64> {
        self.points.iter().map(|p| p.value()).collect()
    }

    pub fn require_points(&self) -> Result<Vec<Complex64>, CliError> {
        if self.points.is_empty() {
            return Err(invalid("points: at least one evaluation point is required"));
        }
        let pts = self.points();
        if pts.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(invalid("points: entries must be finite"));
        }
        Ok(pts)
    }

    fn check_dims(&self, name: &str, t: &TripleSpec) -> Result<(), CliError> {
        for (m, which) in [(&t.a, "a"), (&t.b, "b"), (&t.c, "c")] {
            if m.dim() != self.dim {
                return Err(invalid(format!(
                    "{name}.{which} has dimension {}, expected dim = {}",
                    m.dim(),
                    self.dim
                )));
            }
        }
        Ok(())
    }

    /// Builds and validates the recurrence.
    pub fn recurrence(&self, seed: u64) -> Result<RecurrenceCoefficients, CliError> {
        if self.dim == 0 {
            return Err(invalid("dim must be positive"));
        }
        let c = &self.coefficients;
        if let Some(r) = &c.random {
            if !c.explicit.is_empty() || c.tail.is_some() {
                return Err(invalid(
                    "coefficients.random cannot be combined with explicit or tail",
                ));
            }
            let rc = match self.mode {
                Mode::Biorthogonal => random_biorthogonal(self.dim, r.head_length, seed),
                Mode::Orthonormal => random_orthonormal(self.dim, r.head_length, seed),
            };
            return rc.map_err(|e| invalid(format!("coefficients.random: {e}")));
        }
        for (i, t) in c.explicit.iter().enumerate() {
            self.check_dims(&format!("coefficients.explicit[{i}]"), t)?;
        }
        if let Some(t) = &c.tail {
            self.check_dims("coefficients.tail", t)?;
        }
        let tail: Option<Triple> = c.tail.clone().map(Into::into);
        let mut head: Vec<Triple> = c.explicit.iter().cloned().map(Into::into).collect();
        if let Some(h) = c.head_length {
            let t = tail
                .as_ref()
                .ok_or_else(|| invalid("coefficients.head_length needs coefficients.tail"))?;
            if !head.is_empty() {
                return Err(invalid(
                    "coefficients.head_length cannot be combined with explicit",
                ));
            }
            head = (0..h).map(|_| t.clone()).collect();
            if let Some(first) = head.first_mut() {
                first.c = SquareMatrix::identity(self.dim);
            }
        }
        if head.is_empty() && tail.is_none() {
            return Err(invalid("coefficients: give explicit, tail or random"));
        }
        RecurrenceCoefficients::new(self.dim, self.mode, head, tail)
            .map_err(|e| invalid(format!("coefficients: {e}")))
    }

    pub fn source(&self, rc: &RecurrenceCoefficients) -> Result<StieltjesSource, CliError> {
        if !rc.has_tail() {
            return Err(invalid(
                "coefficients.tail is required for second-kind functions",
            ));
        }
        let src = match self.transform {
            TransformSpec::FixedPoint => StieltjesSource::fixed_point_from_tail(rc),
            TransformSpec::ClosedForm => StieltjesSource::closed_form_from_tail(rc),
        };
        src.map_err(|e| invalid(format!("transform: {e}")))
    }

    /// Tolerance policy from the spec, replaced wholesale by `--tol`.
    pub fn policy(&self, tol: Option<f64>) -> Result<TolerancePolicy, CliError> {
        if let Some(t) = tol {
            if !(t > 0.0 && t.is_finite()) {
                return Err(invalid("--tol must be a positive number"));
            }
            return Ok(TolerancePolicy::uniform(t));
        }
        let mut policy = TolerancePolicy::default();
        for (name, &t) in &self.tolerances {
            if !(t > 0.0 && t.is_finite()) {
                return Err(invalid(format!(
                    "tolerances.{name} must be a positive number"
                )));
            }
            if name == "default" {
                policy.default = t;
                continue;
            }
            let id: IdentityId = serde_json::from_value(serde_json::Value::String(name.clone()))
                .map_err(|_| invalid(format!("tolerances.{name}: unknown identity")))?;
            policy.overrides.push((id, t));
        }
        Ok(policy)
    }

    pub fn targets(&self) -> Result<Vec<TargetId>, CliError> {
        if self.targets.is_empty() {
            return Err(invalid("targets: at least one target is required"));
        }
        self.targets
            .iter()
            .map(|t| {
                TargetId::parse(t).ok_or_else(|| invalid(format!("targets: unknown target {t}")))
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(json: &str) -> ProblemSpec {
        serde_json::from_str(json).unwrap()
    }

    #[test]
    fn points_accept_reals_and_pairs() {
        let s = parse(
            r#"{"dim":1,"mode":"biorthogonal","coefficients":{"tail":{"a":[[[0.5,0]]],"b":[[[0,0]]],"c":[[[0.5,0]]]}},"points":[2,[3,1]],"n_max":3}"#,
        );
        assert_eq!(
            s.points(),
            vec![Complex64::new(2.0, 0.0), Complex64::new(3.0, 1.0)]
        );
        assert!(s.recurrence(0).unwrap().is_constant());
    }

    #[test]
    fn dimension_errors_name_the_field() {
        let s = parse(
            r#"{"dim":2,"mode":"biorthogonal","coefficients":{"explicit":[{"a":[[[1,0]]],"b":[[[0,0]]],"c":[[[1,0]]]}]},"n_max":3}"#,
        );
        let err = s.recurrence(0).unwrap_err().to_string();
        assert!(err.contains("coefficients.explicit[0].a"), "{err}");
    }

    #[test]
    fn tolerance_names_are_checked() {
        let s = parse(
            r#"{"dim":1,"mode":"biorthogonal","coefficients":{"random":{"head_length":2}},"n_max":3,"tolerances":{"LO_1":1e-8,"default":1e-10}}"#,
        );
        let p = s.policy(None).unwrap();
        assert_eq!(p.default, 1e-10);
        assert_eq!(p.overrides, vec![(IdentityId::Lo1, 1e-8)]);
        let bad = parse(
            r#"{"dim":1,"mode":"biorthogonal","coefficients":{"random":{"head_length":2}},"n_max":3,"tolerances":{"NOPE":1e-8}}"#,
        );
        assert!(bad.policy(None).is_err());
        assert_eq!(
            bad.policy(Some(1e-6)).unwrap(),
            TolerancePolicy::uniform(1e-6)
        );
    }
}
