//! C bindings for the certificate engine.
//!
//! Every function returns a [`SectobsCode`]. On failure the message is kept in
//! thread-local storage and read with [`sectobs_last_error`]. Certificates are
//! opaque handles released with [`sectobs_certificate_free`]; strings handed
//! out by the library are released with [`sectobs_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use sectobs::curve::family_curve;
use sectobs::pipeline::{analyze, verify_certificate, AnalyzeOptions, CurveCertificate, CurveInput, PipelineError, Status};

/// Result codes.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SectobsCode {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    InvalidInput = 3,
    UnsupportedVersion = 4,
    VerifyFailed = 5,
    Panic = 6,
}

/// Outcome of the analysis of one curve.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SectobsStatus {
    Certified = 0,
    FailedLocal = 1,
    FailedLemma = 2,
    FailedRank = 3,
    FailedIndependence = 4,
    Inconclusive = 5,
}

impl From<Status> for SectobsStatus {
    fn from(s: Status) -> Self {
        match s {
            Status::Certified => SectobsStatus::Certified,
            Status::FailedLocal => SectobsStatus::FailedLocal,
            Status::FailedLemma => SectobsStatus::FailedLemma,
            Status::FailedRank => SectobsStatus::FailedRank,
            Status::FailedIndependence => SectobsStatus::FailedIndependence,
            Status::Inconclusive => SectobsStatus::Inconclusive,
        }
    }
}

/// The three verdicts of a certificate.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct SectobsVerdicts {
    pub everywhere_locally_solvable: bool,
    pub no_rational_deg1_class: bool,
    pub qualifies: bool,
}

/// Opaque certificate handle.
pub struct SectobsCertificate {
    inner: CurveCertificate,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let s = CString::new(msg.into().replace('\0', " ")).expect("no interior nul");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(s));
}

fn fail(code: SectobsCode, msg: impl Into<String>) -> SectobsCode {
    set_error(msg);
    code
}

/// Runs `f`, turning panics into [`SectobsCode::Panic`].
fn guard(f: impl FnOnce() -> SectobsCode) -> SectobsCode {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(code) => code,
        Err(p) => {
            let msg = p
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| p.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".into());
            fail(SectobsCode::Panic, msg)
        }
    }
}

unsafe fn read_str<'a>(s: *const c_char) -> Result<&'a str, SectobsCode> {
    if s.is_null() {
        return Err(fail(SectobsCode::NullPointer, "null string"));
    }
    CStr::from_ptr(s).to_str().map_err(|_| fail(SectobsCode::InvalidUtf8, "string is not UTF-8"))
}

unsafe fn cert_ref<'a>(cert: *const SectobsCertificate) -> Result<&'a CurveCertificate, SectobsCode> {
    cert.as_ref().map(|c| &c.inner).ok_or_else(|| fail(SectobsCode::NullPointer, "null certificate"))
}

unsafe fn hand_out(cert: CurveCertificate, out: *mut *mut SectobsCertificate) -> SectobsCode {
    *out = Box::into_raw(Box::new(SectobsCertificate { inner: cert }));
    SectobsCode::Ok
}

/// Message of the last failed call on this thread, or null. The pointer stays
/// valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn sectobs_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Library version as a static string.
#[no_mangle]
pub extern "C" fn sectobs_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Analyzes `Y^2 = 2(X^2 + p)(X^2 + 2p)(X^2 + a)`.
///
/// # Safety
/// `out` must be a valid pointer to writable storage for one handle.
#[no_mangle]
pub unsafe extern "C" fn sectobs_analyze_family(p: u64, a: i64, out: *mut *mut SectobsCertificate) -> SectobsCode {
    guard(|| {
        if out.is_null() {
            return fail(SectobsCode::NullPointer, "null output pointer");
        }
        match family_curve(p, a) {
            Ok(c) => hand_out(analyze(&c, AnalyzeOptions::default()), out),
            Err(e) => fail(SectobsCode::InvalidInput, e.to_string()),
        }
    })
}

/// Analyzes the curve with comma-separated coefficients `f6,...,f0`.
///
/// # Safety
/// `coeffs` must be a nul-terminated string and `out` valid for one handle.
#[no_mangle]
pub unsafe extern "C" fn sectobs_analyze_coeffs(
    coeffs: *const c_char,
    height_bound: i64,
    out: *mut *mut SectobsCertificate,
) -> SectobsCode {
    guard(|| {
        if out.is_null() {
            return fail(SectobsCode::NullPointer, "null output pointer");
        }
        let text = match read_str(coeffs) {
            Ok(t) => t,
            Err(code) => return code,
        };
        if height_bound < 1 {
            return fail(SectobsCode::InvalidInput, "height bound must be positive");
        }
        match CurveInput::parse_coeffs(text).curve() {
            Ok(c) => {
                let mut opts = AnalyzeOptions::default();
                opts.bounds.height = height_bound;
                hand_out(analyze(&c, opts), out)
            }
            Err(e) => fail(SectobsCode::InvalidInput, e.to_string()),
        }
    })
}

/// Parses a certificate from its JSON text.
///
/// # Safety
/// `json` must be a nul-terminated string and `out` valid for one handle.
#[no_mangle]
pub unsafe extern "C" fn sectobs_certificate_from_json(
    json: *const c_char,
    out: *mut *mut SectobsCertificate,
) -> SectobsCode {
    guard(|| {
        if out.is_null() {
            return fail(SectobsCode::NullPointer, "null output pointer");
        }
        let text = match read_str(json) {
            Ok(t) => t,
            Err(code) => return code,
        };
        match CurveCertificate::from_json(text) {
            Ok(c) => hand_out(c, out),
            Err(e @ PipelineError::UnsupportedVersion { .. }) => fail(SectobsCode::UnsupportedVersion, e.to_string()),
            Err(e) => fail(SectobsCode::InvalidInput, e.to_string()),
        }
    })
}

/// Canonical JSON of the certificate, released with [`sectobs_string_free`].
///
/// # Safety
/// `cert` must be a live handle and `out` valid for one pointer.
#[no_mangle]
pub unsafe extern "C" fn sectobs_certificate_to_json(
    cert: *const SectobsCertificate,
    out: *mut *mut c_char,
) -> SectobsCode {
    guard(|| {
        let c = match cert_ref(cert) {
            Ok(c) => c,
            Err(code) => return code,
        };
        if out.is_null() {
            return fail(SectobsCode::NullPointer, "null output pointer");
        }
        *out = CString::new(c.to_canonical_json()).expect("JSON has no nul").into_raw();
        SectobsCode::Ok
    })
}

/// # Safety
/// `cert` must be a live handle and `out` valid for one value.
#[no_mangle]
pub unsafe extern "C" fn sectobs_certificate_status(
    cert: *const SectobsCertificate,
    out: *mut SectobsStatus,
) -> SectobsCode {
    guard(|| {
        let c = match cert_ref(cert) {
            Ok(c) => c,
            Err(code) => return code,
        };
        if out.is_null() {
            return fail(SectobsCode::NullPointer, "null output pointer");
        }
        *out = c.verdicts.status.into();
        SectobsCode::Ok
    })
}

/// # Safety
/// `cert` must be a live handle and `out` valid for one value.
#[no_mangle]
pub unsafe extern "C" fn sectobs_certificate_verdicts(
    cert: *const SectobsCertificate,
    out: *mut SectobsVerdicts,
) -> SectobsCode {
    guard(|| {
        let c = match cert_ref(cert) {
            Ok(c) => c,
            Err(code) => return code,
        };
        if out.is_null() {
            return fail(SectobsCode::NullPointer, "null output pointer");
        }
        let v = &c.verdicts;
        *out = SectobsVerdicts {
            everywhere_locally_solvable: v.everywhere_locally_solvable,
            no_rational_deg1_class: v.no_rational_deg1_class,
            qualifies: v.qualifies,
        };
        SectobsCode::Ok
    })
}

/// Replays the evidence. Returns [`SectobsCode::VerifyFailed`] with the failing
/// checks in the error message when it does not hold up.
///
/// # Safety
/// `cert` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn sectobs_certificate_verify(cert: *const SectobsCertificate) -> SectobsCode {
    guard(|| {
        let c = match cert_ref(cert) {
            Ok(c) => c,
            Err(code) => return code,
        };
        let rep = verify_certificate(c);
        if rep.ok() {
            return SectobsCode::Ok;
        }
        let names: Vec<String> = rep.failures().iter().map(|f| format!("{}: {}", f.name, f.detail)).collect();
        fail(SectobsCode::VerifyFailed, names.join("; "))
    })
}

/// # Safety
/// `cert` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn sectobs_certificate_free(cert: *mut SectobsCertificate) {
    if !cert.is_null() {
        drop(Box::from_raw(cert));
    }
}

/// # Safety
/// `s` must be null or a string returned by this library and not yet freed.
#[no_mangle]
pub unsafe extern "C" fn sectobs_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}
