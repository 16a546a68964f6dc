//! Certificate types and their canonical JSON form.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use super::PipelineError;
use crate::algebra::Rational;
use crate::curve::{FactoredSextic, Genus2Curve, LemmaConditions, TwoTorsionBasis};
use crate::ellrank::{DescentBounds, DescentResult};
use crate::localpoints::LocalReport;
use crate::mudescent::{KernelReport, KernelVerdict, NamedClass, Relation, SaturationReport};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    Certified,
    FailedLocal,
    FailedLemma,
    FailedRank,
    FailedIndependence,
    Inconclusive,
}

impl Status {
    pub fn as_str(self) -> &'static str {
        match self {
            Status::Certified => "certified",
            Status::FailedLocal => "failed-local",
            Status::FailedLemma => "failed-lemma",
            Status::FailedRank => "failed-rank",
            Status::FailedIndependence => "failed-independence",
            Status::Inconclusive => "inconclusive",
        }
    }
}

impl std::fmt::Display for Status {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A rational point on `C` found by the small search.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum RationalPoint {
    Affine {
        #[serde(with = "crate::algebra::serde_rational")]
        x: Rational,
        #[serde(with = "crate::algebra::serde_rational")]
        y: Rational,
    },
    /// `f6` is a square, so both points at infinity are rational.
    Infinity {
        #[serde(with = "crate::algebra::serde_rational")]
        sqrt_leading: Rational,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CurveSection {
    pub model: Genus2Curve,
    pub equation: String,
    pub factorization: Option<FactoredSextic>,
    /// Why the factorization is unavailable.
    pub error: Option<String>,
    /// `x = m/n` with `|m|, n <= point_bound` were tried.
    pub point_bound: i64,
    pub rational_point: Option<RationalPoint>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LocalSection {
    pub everywhere_locally_solvable: bool,
    /// The real place and every relevant prime, in order.
    pub reports: Vec<LocalReport>,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct QuotientsSection {
    pub bounds: DescentBounds,
    pub e1: Option<DescentResult>,
    pub e2: Option<DescentResult>,
    /// `rank E1 + rank E2`, when both are pinned.
    pub jacobian_rank: Option<u32>,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct KernelSection {
    /// `rank J(Q) + dim J(Q)[2]`.
    pub expected: usize,
    pub f2_rank: usize,
    pub relations: Vec<Relation>,
    pub saturation: Option<SaturationReport>,
    pub verdict: KernelVerdict,
}

impl KernelSection {
    pub(crate) fn split(report: KernelReport) -> (Vec<NamedClass>, Self) {
        let KernelReport { generators, expected, f2_rank, relations, saturation, verdict } = report;
        (generators, Self { expected, f2_rank, relations, saturation, verdict })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Verdicts {
    pub everywhere_locally_solvable: bool,
    /// Shown, not merely unrefuted.
    pub no_rational_deg1_class: bool,
    /// Everywhere locally solvable, no rational divisor class of degree one,
    /// and both quotients of rank one; conditional on `assumptions`.
    pub qualifies: bool,
    pub status: Status,
    pub reason: String,
    /// JSON pointers to the sections each verdict rests on.
    pub evidence: BTreeMap<String, Vec<String>>,
}

/// An input taken from the literature rather than computed.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Assumption {
    pub id: String,
    pub statement: String,
    /// Verdicts whose meaning depends on it.
    pub used_by: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Meta {
    pub tool: String,
    pub version: String,
    /// Wall-clock time of the analysis; the only nondeterministic field.
    pub elapsed_ms: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CurveCertificate {
    pub schema_version: u32,
    pub curve: CurveSection,
    pub local: LocalSection,
    pub lemma: Option<LemmaConditions>,
    pub torsion: Option<TwoTorsionBasis>,
    pub quotients: Option<QuotientsSection>,
    /// Generators of `J(Q)/2J(Q)` as divisor classes, with their images.
    pub mu: Option<Vec<NamedClass>>,
    pub kernel: Option<KernelSection>,
    pub verdicts: Verdicts,
    pub assumptions: Vec<Assumption>,
    pub meta: Meta,
}

pub fn cited_assumptions() -> Vec<Assumption> {
    vec![
        Assumption {
            id: "finite-sha".into(),
            statement: "Each elliptic quotient has finite Tate-Shafarevich group. For a quotient of rank one \
                        this follows from Kolyvagin's theorem once its analytic rank is one; analytic ranks \
                        are not computed here."
                .into(),
            used_by: vec!["qualifies".into()],
        },
        Assumption {
            id: "sections-criterion".into(),
            statement: "If the Jacobian of a curve over Q is isogenous to a product of elliptic curves with \
                        finite Tate-Shafarevich groups and positive rank, and the curve has points everywhere \
                        locally but no rational divisor class of degree one, then the fundamental exact \
                        sequence of the curve has sections everywhere locally but not globally."
                .into(),
            used_by: vec!["qualifies".into()],
        },
    ]
}

impl CurveCertificate {
    /// Canonical JSON: sorted keys, two-space indentation, trailing newline.
    pub fn to_canonical_json(&self) -> String {
        let v = serde_json::to_value(self).expect("certificate serializes");
        let mut s = serde_json::to_string_pretty(&sort_keys(v)).expect("value serializes");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<Self, PipelineError> {
        let v: Value = serde_json::from_str(text).map_err(|e| PipelineError::Parse {
            field: String::from("."),
            message: e.to_string(),
        })?;
        match v.get("schema_version") {
            None => {
                return Err(PipelineError::Parse { field: "schema_version".into(), message: "missing".into() })
            }
            Some(Value::Number(n)) if n.as_u64() == Some(u64::from(SCHEMA_VERSION)) => {}
            Some(other) => {
                return Err(PipelineError::UnsupportedVersion { found: other.to_string(), supported: SCHEMA_VERSION })
            }
        }
        serde_path_to_error::deserialize(v).map_err(|e| PipelineError::Parse {
            field: e.path().to_string(),
            message: e.inner().to_string(),
        })
    }
}

/// Rebuilds every object with its keys in sorted order.
fn sort_keys(v: Value) -> Value {
    match v {
        Value::Object(m) => {
            let sorted: BTreeMap<String, Value> = m.into_iter().map(|(k, v)| (k, sort_keys(v))).collect();
            Value::Object(sorted.into_iter().collect())
        }
        Value::Array(xs) => Value::Array(xs.into_iter().map(sort_keys).collect()),
        other => other,
    }
}

pub fn emit_certificate(cert: &CurveCertificate, path: &Path) -> Result<(), PipelineError> {
    fs::write(path, cert.to_canonical_json()).map_err(|e| PipelineError::Io { path: path.display().to_string(), source: e })
}

pub fn load_certificate(path: &Path) -> Result<CurveCertificate, PipelineError> {
    let text = fs::read_to_string(path).map_err(|e| PipelineError::Io { path: path.display().to_string(), source: e })?;
    CurveCertificate::from_json(&text)
}
