use std::sync::OnceLock;

use super::*;
use crate::algebra::rat;
use crate::localpoints::Evidence;

fn c711() -> &'static CurveCertificate {
    static CERT: OnceLock<CurveCertificate> = OnceLock::new();
    CERT.get_or_init(|| analyze(&family_curve(7, -11).unwrap(), AnalyzeOptions::default()))
}

#[test]
fn seven_minus_eleven_is_certified() {
    let cert = c711();
    assert_eq!(cert.verdicts.status, Status::Certified);
    assert!(cert.verdicts.everywhere_locally_solvable);
    assert!(cert.verdicts.no_rational_deg1_class);
    assert!(cert.verdicts.qualifies);
    assert_eq!(cert.torsion.as_ref().unwrap().dim, 2);
    let q = cert.quotients.as_ref().unwrap();
    assert_eq!(q.e1.as_ref().unwrap().rank, Some(1));
    assert_eq!(q.e2.as_ref().unwrap().rank, Some(1));
    assert_eq!(q.jacobian_rank, Some(2));
    let k = cert.kernel.as_ref().unwrap();
    assert_eq!((k.f2_rank, k.expected), (4, 4));
    let labels: Vec<&str> = cert.mu.as_ref().unwrap().iter().map(|g| g.label.as_str()).collect();
    assert_eq!(labels, ["P1_1", "P2_1", "T_1", "T_2"]);
    assert!(cert.curve.rational_point.is_none());
    assert_eq!(cert.assumptions.len(), 2);
}

#[test]
fn certificate_replays() {
    let rep = verify_certificate(c711());
    assert!(rep.ok(), "{:?}", rep.failures());
}

#[test]
fn tampering_is_detected() {
    let mut bad = c711().clone();
    bad.mu.as_mut().unwrap()[0].mu.components[0] = bad.mu.as_ref().unwrap()[1].mu.components[0].clone();
    assert!(!verify_certificate(&bad).ok());

    let mut bad = c711().clone();
    bad.verdicts.status = Status::FailedRank;
    let rep = verify_certificate(&bad);
    assert_eq!(rep.failures().iter().map(|c| c.name.as_str()).collect::<Vec<_>>(), ["verdicts"]);

    let mut bad = c711().clone();
    bad.kernel.as_mut().unwrap().f2_rank = 3;
    assert!(!verify_certificate(&bad).ok());

    let mut bad = c711().clone();
    let r = bad.local.reports.iter_mut().find(|r| matches!(r.evidence, Evidence::FastPath { .. })).unwrap();
    if let Evidence::FastPath { square, .. } = &mut r.evidence {
        *square = rat(3);
    }
    assert!(!verify_certificate(&bad).ok());
}

#[test]
fn analysis_is_deterministic() {
    let mut again = analyze(&family_curve(7, -11).unwrap(), AnalyzeOptions::default());
    again.meta.elapsed_ms = c711().meta.elapsed_ms;
    assert_eq!(&again, c711());
    assert_eq!(again.to_canonical_json(), c711().to_canonical_json());
}

#[test]
fn canonical_json_round_trips() {
    let text = c711().to_canonical_json();
    let back = CurveCertificate::from_json(&text).unwrap();
    assert_eq!(&back, c711());
    assert_eq!(back.to_canonical_json(), text);
    let v: serde_json::Value = serde_json::from_str(&text).unwrap();
    let keys: Vec<&String> = v.as_object().unwrap().keys().collect();
    assert_eq!(
        keys,
        ["assumptions", "curve", "kernel", "lemma", "local", "meta", "mu", "quotients", "schema_version", "torsion", "verdicts"]
    );
    // exact fractions as strings, never floats
    fn no_floats(v: &serde_json::Value) -> bool {
        match v {
            serde_json::Value::Number(n) => n.is_i64() || n.is_u64(),
            serde_json::Value::Array(xs) => xs.iter().all(no_floats),
            serde_json::Value::Object(m) => m.values().all(no_floats),
            _ => true,
        }
    }
    assert!(no_floats(&v));
}

#[test]
fn file_round_trip_and_errors() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("c.json");
    emit_certificate(c711(), &path).unwrap();
    assert_eq!(&load_certificate(&path).unwrap(), c711());

    let text = std::fs::read_to_string(&path).unwrap();
    let bumped = text.replacen("\"schema_version\": 1", "\"schema_version\": 2", 1);
    let err = CurveCertificate::from_json(&bumped).unwrap_err();
    assert!(matches!(err, PipelineError::UnsupportedVersion { .. }));
    assert!(err.to_string().contains("unsupported version"));

    let broken = text.replacen("\"f2_rank\": 4", "\"f2_rank\": \"four\"", 1);
    match CurveCertificate::from_json(&broken).unwrap_err() {
        PipelineError::Parse { field, .. } => assert_eq!(field, "kernel.f2_rank"),
        e => panic!("unexpected {e}"),
    }
    assert!(matches!(CurveCertificate::from_json("{").unwrap_err(), PipelineError::Parse { .. }));
    assert!(matches!(load_certificate(&dir.path().join("missing.json")).unwrap_err(), PipelineError::Io { .. }));
}

#[test]
fn point_on_x6_plus_1() {
    let c = Genus2Curve::from_ints_descending([1, 0, 0, 0, 0, 0, 1]).unwrap();
    assert_eq!(small_rational_point(&c, 10), Some(RationalPoint::Affine { x: rat(0), y: rat(1) }));
    let cert = analyze(&c, AnalyzeOptions::default());
    assert!(cert.verdicts.everywhere_locally_solvable);
    assert!(!cert.verdicts.no_rational_deg1_class);
    assert_eq!(cert.verdicts.status, Status::FailedLemma);
    assert!(cert.quotients.is_none());
    assert!(verify_certificate(&cert).ok());
}

#[test]
fn stoll_fails_only_at_two() {
    let c = Genus2Curve::from_ints_descending([3, 0, 8, 0, 2, 0, -6]).unwrap();
    let cert = analyze(&c, AnalyzeOptions::default());
    assert_eq!(cert.verdicts.status, Status::FailedLocal);
    assert!(!cert.verdicts.qualifies);
    let bad: Vec<_> = cert.local.reports.iter().filter(|r| !r.solvable).map(|r| r.place).collect();
    assert_eq!(bad, [crate::algebra::Place::Prime(2)]);
    assert!(verify_certificate(&cert).ok());
}

#[test]
fn rank_two_quotient_is_rejected() {
    let cert = analyze(&family_curve(7, -14).unwrap(), AnalyzeOptions::default());
    assert_eq!(cert.verdicts.status, Status::FailedRank);
    assert!(cert.kernel.is_none());
    assert!(verify_certificate(&cert).ok());
}

#[test]
fn small_sweeps() {
    assert!(family_pairs(7, 7, 7).is_empty());
    // a = 2p for p = 7
    assert_eq!(family_pairs(23, 14, 14), [(23, 14)]);
    let dir = tempfile::tempdir().unwrap();
    let opts = SearchOptions { cache: Some(dir.path().to_path_buf()), jobs: Some(2), ..Default::default() };
    let cold = search_family(7, -12, -10, &opts).unwrap();
    assert_eq!(cold.certified(), [(7, -11)]);
    assert_eq!(cold.cache_hits, 0);
    let warm = search_family(7, -12, -10, &opts).unwrap();
    assert_eq!(warm.cache_hits, 3);
    assert_eq!(warm.rows, cold.rows);
    assert!(search_family(7, 7, 7, &opts).unwrap().rows.is_empty());
    assert!(matches!(search_family(5, 0, 1, &opts), Err(PipelineError::Input(_))));
}

#[test]
fn input_parsing() {
    assert_eq!(CurveInput::parse_family(" 7, -11").unwrap(), CurveInput::Family { p: 7, a: -11 });
    assert!(CurveInput::parse_family("7").is_err());
    let c = CurveInput::parse_coeffs("2,0,20,0,-266,0,-2156").curve().unwrap();
    assert_eq!(c.coeffs(), family_curve(7, -11).unwrap().coeffs());
    assert!(CurveInput::parse_coeffs("1,0,0,0,0,0,0").curve().is_err());
    assert!(CurveInput::parse_coeffs("1,x,0,0,0,0,1").curve().is_err());
}
