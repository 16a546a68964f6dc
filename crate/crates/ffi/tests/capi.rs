use std::ffi::{CStr, CString};
use std::path::{Path, PathBuf};
use std::process::Command;
use std::ptr;

use sectobs_ffi::*;

fn last_error() -> String {
    let p = sectobs_last_error();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

#[test]
fn family_round_trip() {
    unsafe {
        let mut cert = ptr::null_mut();
        assert_eq!(sectobs_analyze_family(7, -11, &mut cert), SectobsCode::Ok);
        let mut status = SectobsStatus::Inconclusive;
        assert_eq!(sectobs_certificate_status(cert, &mut status), SectobsCode::Ok);
        assert_eq!(status, SectobsStatus::Certified);
        let mut v = SectobsVerdicts::default();
        assert_eq!(sectobs_certificate_verdicts(cert, &mut v), SectobsCode::Ok);
        assert_eq!(v, SectobsVerdicts { everywhere_locally_solvable: true, no_rational_deg1_class: true, qualifies: true });
        assert_eq!(sectobs_certificate_verify(cert), SectobsCode::Ok);

        let mut json = ptr::null_mut();
        assert_eq!(sectobs_certificate_to_json(cert, &mut json), SectobsCode::Ok);
        let text = CStr::from_ptr(json).to_str().unwrap().to_owned();
        let mut back = ptr::null_mut();
        assert_eq!(sectobs_certificate_from_json(json, &mut back), SectobsCode::Ok);
        sectobs_string_free(json);
        let mut again = ptr::null_mut();
        assert_eq!(sectobs_certificate_to_json(back, &mut again), SectobsCode::Ok);
        assert_eq!(CStr::from_ptr(again).to_str().unwrap(), text);
        sectobs_string_free(again);
        sectobs_certificate_free(back);
        sectobs_certificate_free(cert);
    }
}

#[test]
fn stoll_via_coefficients() {
    unsafe {
        let coeffs = CString::new("3,0,8,0,2,0,-6").unwrap();
        let mut cert = ptr::null_mut();
        assert_eq!(sectobs_analyze_coeffs(coeffs.as_ptr(), 1000, &mut cert), SectobsCode::Ok);
        let mut status = SectobsStatus::Certified;
        assert_eq!(sectobs_certificate_status(cert, &mut status), SectobsCode::Ok);
        assert_eq!(status, SectobsStatus::FailedLocal);
        sectobs_certificate_free(cert);
    }
}

#[test]
fn errors_are_reported() {
    unsafe {
        let mut cert = ptr::null_mut();
        assert_eq!(sectobs_analyze_family(7, 14, &mut cert), SectobsCode::InvalidInput);
        assert!(last_error().contains("a = 14"));
        assert!(cert.is_null());
        assert_eq!(sectobs_analyze_family(7, -11, ptr::null_mut()), SectobsCode::NullPointer);
        assert_eq!(sectobs_analyze_coeffs(ptr::null(), 10, &mut cert), SectobsCode::NullPointer);
        let short = CString::new("1,2,3").unwrap();
        assert_eq!(sectobs_analyze_coeffs(short.as_ptr(), 10, &mut cert), SectobsCode::InvalidInput);
        assert!(last_error().contains("7 coefficients"));
        let bad = [0xffu8, 0];
        assert_eq!(sectobs_analyze_coeffs(bad.as_ptr().cast(), 10, &mut cert), SectobsCode::InvalidUtf8);
        let v2 = CString::new(r#"{"schema_version": 2}"#).unwrap();
        assert_eq!(sectobs_certificate_from_json(v2.as_ptr(), &mut cert), SectobsCode::UnsupportedVersion);
        let junk = CString::new(r#"{"schema_version": 1}"#).unwrap();
        assert_eq!(sectobs_certificate_from_json(junk.as_ptr(), &mut cert), SectobsCode::InvalidInput);
        let mut status = SectobsStatus::Certified;
        assert_eq!(sectobs_certificate_status(ptr::null(), &mut status), SectobsCode::NullPointer);
        assert_eq!(sectobs_certificate_verify(ptr::null()), SectobsCode::NullPointer);
        sectobs_certificate_free(ptr::null_mut());
        sectobs_string_free(ptr::null_mut());
    }
}

#[test]
fn tampered_certificate_fails_verification() {
    unsafe {
        let mut cert = ptr::null_mut();
        assert_eq!(sectobs_analyze_family(7, -11, &mut cert), SectobsCode::Ok);
        let mut json = ptr::null_mut();
        assert_eq!(sectobs_certificate_to_json(cert, &mut json), SectobsCode::Ok);
        let text = CStr::from_ptr(json).to_str().unwrap().replacen("\"f2_rank\": 4", "\"f2_rank\": 3", 1);
        sectobs_string_free(json);
        sectobs_certificate_free(cert);
        let text = CString::new(text).unwrap();
        let mut bad = ptr::null_mut();
        assert_eq!(sectobs_certificate_from_json(text.as_ptr(), &mut bad), SectobsCode::Ok);
        assert_eq!(sectobs_certificate_verify(bad), SectobsCode::VerifyFailed);
        assert!(last_error().contains("f2_rank"));
        sectobs_certificate_free(bad);
    }
}

#[test]
fn version_is_static() {
    let v = unsafe { CStr::from_ptr(sectobs_version()) }.to_str().unwrap();
    assert_eq!(v, env!("CARGO_PKG_VERSION"));
}

#[test]
fn header_declares_the_api() {
    let header = std::fs::read_to_string(Path::new(env!("CARGO_MANIFEST_DIR")).join("include/sectobs.h")).unwrap();
    for name in [
        "sectobs_last_error",
        "sectobs_analyze_family",
        "sectobs_analyze_coeffs",
        "sectobs_certificate_from_json",
        "sectobs_certificate_to_json",
        "sectobs_certificate_status",
        "sectobs_certificate_verdicts",
        "sectobs_certificate_verify",
        "sectobs_certificate_free",
        "sectobs_string_free",
        "typedef struct SectobsCertificate SectobsCertificate",
        "SECTOBS_STATUS_FAILED_INDEPENDENCE = 4",
    ] {
        assert!(header.contains(name), "header lacks {name}");
    }
}

/// Compiles and runs a C program against the header and the static library,
/// when a C compiler is on the path.
#[test]
fn c_program_links_and_runs() {
    let manifest = Path::new(env!("CARGO_MANIFEST_DIR"));
    let tmp = PathBuf::from(env!("CARGO_TARGET_TMPDIR"));
    let profile_dir = tmp.parent().unwrap().join(if cfg!(debug_assertions) { "debug" } else { "release" });
    let lib = profile_dir.join("libsectobs_ffi.a");
    if !lib.exists() || Command::new("cc").arg("--version").output().is_err() {
        eprintln!("skipping: no static library at {} or no cc", lib.display());
        return;
    }
    let exe = tmp.join("sectobs_smoke");
    let status = Command::new("cc")
        .arg(manifest.join("tests/c/smoke.c"))
        .arg("-I")
        .arg(manifest.join("include"))
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&exe)
        .status()
        .unwrap();
    assert!(status.success(), "C compile failed");
    let out = Command::new(&exe).output().unwrap();
    assert!(out.status.success(), "smoke program exited with {:?}", out.status.code());
    assert_eq!(String::from_utf8_lossy(&out.stdout).trim(), format!("ok {}", env!("CARGO_PKG_VERSION")));
}
