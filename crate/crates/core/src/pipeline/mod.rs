//! Per-curve analysis, the family sweep, certificates and their replay.

mod certificate;
mod search;
mod verify;

pub use certificate::{
    cited_assumptions, emit_certificate, load_certificate, Assumption, CurveCertificate, CurveSection,
    KernelSection, LocalSection, Meta, QuotientsSection, RationalPoint, Status, Verdicts, SCHEMA_VERSION,
};
pub use search::{cache_dir_from_env, certificate_name, family_pairs, search_family, FamilySearch, SearchOptions, SearchRow};
pub use verify::{verify_certificate, Check, VerifyReport};

use std::collections::BTreeMap;
use std::time::Instant;

use num_bigint::BigInt;
use num_integer::Integer;
use rayon::prelude::*;
use thiserror::Error;

use crate::algebra::{fmt_rational, integer_sqrt_exact, rational_sqrt, Rational};
use crate::curve::{factor_sextic, family_curve, lemma_conditions, two_torsion, CurveError, Genus2Curve, LemmaConditions};
use crate::ellrank::{bielliptic_quotients, integralize, jacobian_rank, two_descent, DescentBounds};
use crate::localpoints::{integral_model, is_everywhere_locally_solvable};
use crate::mudescent::{certify_kernel, no_rational_divisor_class_deg1, KernelVerdict};

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error(transparent)]
    Curve(#[from] CurveError),
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("unsupported version: certificate has schema_version {found}, this build reads {supported}")]
    UnsupportedVersion { found: String, supported: u32 },
    #[error("parse error at `{field}`: {message}")]
    Parse { field: String, message: String },
    #[error("{0}")]
    Input(String),
}

/// How a curve was specified on input.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CurveInput {
    Family { p: u64, a: i64 },
    /// `f6, f5, ..., f0` as written.
    Coeffs(Vec<String>),
}

impl CurveInput {
    /// Parses `p,a`.
    pub fn parse_family(s: &str) -> Result<Self, CurveError> {
        let bad = || CurveError::Parse(format!("expected p,a but got {s:?}"));
        let (p, a) = s.split_once(',').ok_or_else(bad)?;
        Ok(CurveInput::Family { p: p.trim().parse().map_err(|_| bad())?, a: a.trim().parse().map_err(|_| bad())? })
    }

    /// Parses `f6,f5,f4,f3,f2,f1,f0`.
    pub fn parse_coeffs(s: &str) -> Self {
        CurveInput::Coeffs(s.split(',').map(|t| t.trim().to_string()).collect())
    }

    pub fn curve(&self) -> Result<Genus2Curve, CurveError> {
        match self {
            CurveInput::Family { p, a } => family_curve(*p, *a),
            CurveInput::Coeffs(cs) => {
                let refs: Vec<&str> = cs.iter().map(String::as_str).collect();
                Genus2Curve::from_descending_strs(&refs)
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AnalyzeOptions {
    pub bounds: DescentBounds,
    /// Bound for the search for rational points on the curve itself.
    pub point_bound: i64,
}

impl Default for AnalyzeOptions {
    fn default() -> Self {
        Self { bounds: DescentBounds::default(), point_bound: 60 }
    }
}

/// First rational point with `x = m/n`, `|m|, n <= bound`, ordered by
/// `(n, |m|, m)`, falling back to the points at infinity.
pub fn small_rational_point(c: &Genus2Curve, bound: i64) -> Option<RationalPoint> {
    let f = integral_model(&c.poly());
    let coeffs: Vec<BigInt> = f.coeffs().iter().map(|q| q.to_integer()).collect();
    let affine = (1..=bound).into_par_iter().find_map_first(|n| {
        let nb = BigInt::from(n);
        (0..=bound).flat_map(|m| if m == 0 { vec![0] } else { vec![m, -m] }).find_map(|m| {
            if m.gcd(&n) != 1 {
                return None;
            }
            let mb = BigInt::from(m);
            // n^6 F(m/n) for the integral model
            let v: BigInt = coeffs.iter().enumerate().map(|(i, f)| f * mb.pow(i as u32) * nb.pow(6 - i as u32)).sum();
            let r = integer_sqrt_exact(&v)?;
            let x = Rational::new(mb, nb.clone());
            let y = Rational::new(r, nb.pow(3)) * scale_back(c, &f);
            Some(RationalPoint::Affine { x, y })
        })
    });
    affine.or_else(|| rational_sqrt(c.leading()).map(|r| RationalPoint::Infinity { sqrt_leading: r }))
}

/// `sqrt(F / F_int)`, the factor undoing the integral scaling.
fn scale_back(c: &Genus2Curve, f: &crate::poly::Poly) -> Rational {
    rational_sqrt(&(c.leading() / f.leading())).expect("scaled by a square")
}

/// Runs the whole chain on one curve. Failures of any stage are recorded in
/// the certificate and end the chain there.
pub fn analyze(c: &Genus2Curve, opts: AnalyzeOptions) -> CurveCertificate {
    let start = Instant::now();
    let (factorization, curve_error) = match factor_sextic(c) {
        Ok(fs) => (Some(fs), None),
        Err(e) => (None, Some(e.to_string())),
    };
    let curve = CurveSection {
        model: c.clone(),
        equation: c.to_string(),
        factorization: factorization.clone(),
        error: curve_error,
        point_bound: opts.point_bound,
        rational_point: small_rational_point(c, opts.point_bound),
    };
    let lemma = factorization.as_ref().map(lemma_conditions);
    let torsion = factorization.as_ref().map(two_torsion);
    let local = match is_everywhere_locally_solvable(c) {
        Ok((ok, reports)) => LocalSection { everywhere_locally_solvable: ok, reports, error: None },
        Err(e) => LocalSection { everywhere_locally_solvable: false, reports: Vec::new(), error: Some(e.to_string()) },
    };
    let mut cert = CurveCertificate {
        schema_version: SCHEMA_VERSION,
        curve,
        local,
        lemma,
        torsion,
        quotients: None,
        mu: None,
        kernel: None,
        verdicts: Verdicts::pending(),
        assumptions: cited_assumptions(),
        meta: Meta { tool: "sectobs".into(), version: env!("CARGO_PKG_VERSION").into(), elapsed_ms: 0 },
    };
    let proceed = |cert: &CurveCertificate| decide_cert(cert).is_pending();
    if proceed(&cert) {
        cert.quotients = Some(run_quotients(c, opts.bounds));
    }
    if proceed(&cert) {
        let q = cert.quotients.as_ref().expect("present");
        let (d1, d2) = (q.e1.as_ref().expect("ranked"), q.e2.as_ref().expect("ranked"));
        let fs = factorization.as_ref().expect("factored");
        match certify_kernel(c, fs, cert.torsion.as_ref().expect("factored"), d1, d2) {
            Ok(report) => {
                let (gens, k) = KernelSection::split(report);
                cert.mu = Some(gens);
                cert.kernel = Some(k);
            }
            Err(e) => {
                cert.quotients.as_mut().expect("present").error = Some(format!("mu: {e}"));
            }
        }
    }
    cert.verdicts = decide_cert(&cert);
    cert.meta.elapsed_ms = start.elapsed().as_millis() as u64;
    cert
}

fn run_quotients(c: &Genus2Curve, bounds: DescentBounds) -> QuotientsSection {
    let mut q = QuotientsSection { bounds, e1: None, e2: None, jacobian_rank: None, error: None };
    let run = || -> Result<_, String> {
        let (r1, r2) = bielliptic_quotients(c).map_err(|e| e.to_string())?;
        let e1 = integralize(&r1).map_err(|e| format!("E1: {e}"))?;
        let e2 = integralize(&r2).map_err(|e| format!("E2: {e}"))?;
        let (d1, d2) = rayon::join(|| two_descent(&e1, bounds), || two_descent(&e2, bounds));
        Ok((d1.map_err(|e| format!("E1: {e}"))?, d2.map_err(|e| format!("E2: {e}"))?))
    };
    match run() {
        Ok((d1, d2)) => {
            q.jacobian_rank = jacobian_rank(d1.rank, d2.rank);
            q.e1 = Some(d1);
            q.e2 = Some(d2);
        }
        Err(e) => q.error = Some(e),
    }
    q
}

pub(crate) fn decide_cert(cert: &CurveCertificate) -> Verdicts {
    decide(&cert.curve, &cert.local, cert.lemma.as_ref(), cert.quotients.as_ref(), cert.kernel.as_ref())
}

fn pointers(xs: &[&str]) -> Vec<String> {
    xs.iter().map(|s| s.to_string()).collect()
}

impl Verdicts {
    fn pending() -> Self {
        let mut evidence = BTreeMap::new();
        evidence.insert("everywhere_locally_solvable".to_string(), pointers(&["/local"]));
        evidence.insert("no_rational_deg1_class".to_string(), pointers(&["/curve", "/lemma", "/torsion", "/mu", "/kernel"]));
        evidence.insert(
            "qualifies".to_string(),
            pointers(&["/verdicts/everywhere_locally_solvable", "/verdicts/no_rational_deg1_class", "/quotients"]),
        );
        Verdicts {
            everywhere_locally_solvable: false,
            no_rational_deg1_class: false,
            qualifies: false,
            status: Status::Inconclusive,
            reason: String::new(),
            evidence,
        }
    }

    /// The next stage has not run yet.
    fn is_pending(&self) -> bool {
        self.status == Status::Inconclusive && self.reason.is_empty()
    }
}

/// The verdicts as a function of the evidence alone. Stages run in order and
/// the first failure decides the status.
fn decide(
    curve: &CurveSection,
    local: &LocalSection,
    lemma: Option<&LemmaConditions>,
    quotients: Option<&QuotientsSection>,
    kernel: Option<&KernelSection>,
) -> Verdicts {
    let mut v = Verdicts::pending();
    let set = |v: &mut Verdicts, s: Status, r: String| {
        v.status = s;
        v.reason = r;
    };
    if let Some(e) = &local.error {
        set(&mut v, Status::Inconclusive, format!("local solvability undecided: {e}"));
        return v;
    }
    v.everywhere_locally_solvable = local.everywhere_locally_solvable;
    if !local.everywhere_locally_solvable {
        let bad: Vec<String> = local.reports.iter().filter(|r| !r.solvable).map(|r| r.place.to_string()).collect();
        set(&mut v, Status::FailedLocal, format!("no local point at {}", bad.join(", ")));
        return v;
    }
    if let Some(pt) = &curve.rational_point {
        let at = match pt {
            RationalPoint::Affine { x, y } => format!("({}, {})", fmt_rational(x), fmt_rational(y)),
            RationalPoint::Infinity { .. } => "at infinity".to_string(),
        };
        set(&mut v, Status::FailedLemma, format!("rational point {at}"));
        return v;
    }
    if let Some(e) = &curve.error {
        set(&mut v, Status::Inconclusive, e.clone());
        return v;
    }
    let Some(lemma) = lemma else { return v };
    if !lemma.cond_i {
        set(&mut v, Status::FailedLemma, "F has a rational root".into());
        return v;
    }
    if !lemma.cond_ii {
        set(&mut v, Status::FailedLemma, "the roots of F split into two Galois-stable triples".into());
        return v;
    }
    let Some(q) = quotients else { return v };
    if let Some(e) = &q.error {
        set(&mut v, Status::Inconclusive, e.clone());
        return v;
    }
    let (Some(d1), Some(d2)) = (&q.e1, &q.e2) else {
        set(&mut v, Status::Inconclusive, "quotient descents missing".into());
        return v;
    };
    for (name, d) in [("E1", d1), ("E2", d2)] {
        if d.rank.is_none() {
            set(&mut v, Status::Inconclusive, format!("rank of {name} not pinned: {} <= rank <= {}", d.lower, d.upper));
            return v;
        }
    }
    for (name, d) in [("E1", d1), ("E2", d2)] {
        let r = d.rank.expect("pinned");
        if r != 1 {
            set(&mut v, Status::FailedRank, format!("{name} has rank {r}, not 1"));
            return v;
        }
    }
    let Some(k) = kernel else { return v };
    v.no_rational_deg1_class = no_rational_divisor_class_deg1(lemma, k.verdict);
    match k.verdict {
        KernelVerdict::Equal => {
            set(&mut v, Status::Certified, "ker mu = 2J(Q)".into());
            v.qualifies = v.everywhere_locally_solvable && v.no_rational_deg1_class;
        }
        KernelVerdict::Larger => set(
            &mut v,
            Status::FailedIndependence,
            format!("mu has rank {} on J(Q)/2J(Q) of dimension {}", k.f2_rank, k.expected),
        ),
        KernelVerdict::Unknown => set(
            &mut v,
            Status::Inconclusive,
            format!("mu has rank {} < {} and saturation could not be shown", k.f2_rank, k.expected),
        ),
    }
    v
}

#[cfg(test)]
mod tests;
