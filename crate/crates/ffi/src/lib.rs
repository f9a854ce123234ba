//! C ABI over the `anosov` library.
//!
//! Representations are opaque handles; structured results cross the boundary as JSON
//! strings owned by the library (release with [`anosov_string_free`]). Every entry point
//! returns an [`AnosovStatus`]; on failure [`anosov_last_error_message`] describes the error.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use anosov::constructions::{sp21_rep, make_phi, make_psi, make_rho, BlockSpec};
use anosov::gap::{index_set, qie_report};
use anosov::linalg::{singular_values, CMatrix, Field, Mat, C64};
use anosov::pingpong::{check_pingpong, PingPongConfig, PingPongVerdict};
use anosov::words::Rep;
use anosov::{Error, Thresholds};
use serde::Deserialize;

/// Status code returned by every function.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AnosovStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    InvalidJson = 3,
    InvalidInput = 4,
    Numeric = 5,
    BufferTooSmall = 6,
    /// The computation ran and its certificate failed.
    CertificateFailed = 7,
    Panic = 8,
}

/// Opaque representation handle.
pub struct AnosovRep {
    rep: Rep,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let s = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(s).ok());
}

struct Fail(AnosovStatus, String);

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        let status = match e {
            Error::Json(_) => AnosovStatus::InvalidJson,
            Error::Overflow(_) | Error::NonFinite | Error::NoConvergence => AnosovStatus::Numeric,
            _ => AnosovStatus::InvalidInput,
        };
        Fail(status, e.to_string())
    }
}

impl From<serde_json::Error> for Fail {
    fn from(e: serde_json::Error) -> Self {
        Fail(AnosovStatus::InvalidJson, e.to_string())
    }
}

fn guard(f: impl FnOnce() -> Result<AnosovStatus, Fail>) -> AnosovStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(s)) => s,
        Ok(Err(Fail(s, msg))) => {
            set_error(msg);
            s
        }
        Err(p) => {
            let msg = p
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| p.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".into());
            set_error(format!("internal panic: {msg}"));
            AnosovStatus::Panic
        }
    }
}

unsafe fn read_str<'a>(p: *const c_char, name: &str) -> Result<&'a str, Fail> {
    if p.is_null() {
        return Err(Fail(AnosovStatus::NullPointer, format!("{name} is null")));
    }
    CStr::from_ptr(p).to_str().map_err(|e| Fail(AnosovStatus::InvalidUtf8, format!("{name}: {e}")))
}

unsafe fn rep_ref<'a>(p: *const AnosovRep) -> Result<&'a Rep, Fail> {
    p.as_ref().map(|h| &h.rep).ok_or_else(|| Fail(AnosovStatus::NullPointer, "rep is null".into()))
}

unsafe fn out_ptr<'a, T>(p: *mut T, name: &str) -> Result<&'a mut T, Fail> {
    p.as_mut().ok_or_else(|| Fail(AnosovStatus::NullPointer, format!("{name} is null")))
}

unsafe fn thresholds(p: *const c_char) -> Result<Thresholds, Fail> {
    if p.is_null() {
        return Ok(Thresholds::default());
    }
    let t: Thresholds = serde_json::from_str(read_str(p, "thresholds_json")?)?;
    t.validate()?;
    Ok(t)
}

fn give_string(s: String, out: &mut *mut c_char) -> Result<(), Fail> {
    *out = CString::new(s).map_err(|e| Fail(AnosovStatus::InvalidInput, e.to_string()))?.into_raw();
    Ok(())
}

/// Parses a representation document. On success `*out` owns a handle to release with [`anosov_rep_free`].
///
/// # Safety
/// `json` must be a NUL-terminated string; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn anosov_rep_from_json(json: *const c_char, out: *mut *mut AnosovRep) -> AnosovStatus {
    guard(|| {
        let out = out_ptr(out, "out")?;
        *out = ptr::null_mut();
        let rep = Rep::from_json_str(read_str(json, "json")?)?;
        *out = Box::into_raw(Box::new(AnosovRep { rep }));
        Ok(AnosovStatus::Ok)
    })
}

/// Releases a handle. Null is ignored.
///
/// # Safety
/// `rep` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn anosov_rep_free(rep: *mut AnosovRep) {
    if !rep.is_null() {
        let _ = catch_unwind(AssertUnwindSafe(|| drop(Box::from_raw(rep))));
    }
}

/// Matrix dimension of the representation.
///
/// # Safety
/// `rep` must be a live handle; `out_dim` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn anosov_rep_dim(rep: *const AnosovRep, out_dim: *mut usize) -> AnosovStatus {
    guard(|| {
        *out_ptr(out_dim, "out_dim")? = rep_ref(rep)?.dim();
        Ok(AnosovStatus::Ok)
    })
}

/// Serializes the representation.
///
/// # Safety
/// `rep` must be a live handle; `out_json` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn anosov_rep_to_json(rep: *const AnosovRep, out_json: *mut *mut c_char) -> AnosovStatus {
    guard(|| {
        let out = out_ptr(out_json, "out_json")?;
        *out = ptr::null_mut();
        give_string(rep_ref(rep)?.to_json_string(), out)?;
        Ok(AnosovStatus::Ok)
    })
}

/// Evaluates a word (generator labels separated by spaces, `^-1` for inverses) into
/// row-major buffers of length `dim * dim`. `out_im` may be null.
///
/// # Safety
/// `rep` must be a live handle, `word` NUL-terminated, and the buffers valid for `len` writes.
#[no_mangle]
pub unsafe extern "C" fn anosov_rep_evaluate(
    rep: *const AnosovRep,
    word: *const c_char,
    out_re: *mut f64,
    out_im: *mut f64,
    len: usize,
) -> AnosovStatus {
    guard(|| {
        let rep = rep_ref(rep)?;
        let w = rep.group().parse_word(read_str(word, "word")?)?;
        let d = rep.dim();
        if len < d * d {
            return Err(Fail(AnosovStatus::BufferTooSmall, format!("need {} entries, got {len}", d * d)));
        }
        if out_re.is_null() {
            return Err(Fail(AnosovStatus::NullPointer, "out_re is null".into()));
        }
        let m = rep.evaluate(&w)?;
        for i in 0..d {
            for j in 0..d {
                let z = m.get(i, j);
                *out_re.add(i * d + j) = z.re;
                if !out_im.is_null() {
                    *out_im.add(i * d + j) = z.im;
                }
            }
        }
        Ok(AnosovStatus::Ok)
    })
}

/// Singular values (nonincreasing) of an `n x n` row-major matrix; `im` may be null for real input.
///
/// # Safety
/// `re` (and `im` if non-null) must hold `n * n` values; `out` must be valid for `n` writes.
#[no_mangle]
pub unsafe extern "C" fn anosov_svd_sigmas(re: *const f64, im: *const f64, n: usize, out: *mut f64) -> AnosovStatus {
    guard(|| {
        if re.is_null() || out.is_null() {
            return Err(Fail(AnosovStatus::NullPointer, "re and out must be non-null".into()));
        }
        if n == 0 {
            return Err(Fail(AnosovStatus::InvalidInput, "n must be positive".into()));
        }
        let data = CMatrix::from_fn(n, n, |i, j| {
            C64::new(*re.add(i * n + j), if im.is_null() { 0.0 } else { *im.add(i * n + j) })
        });
        let field = if im.is_null() { Field::Real } else { Field::Complex };
        let s = singular_values(&Mat::new(field, data))?;
        for (k, v) in s.iter().enumerate() {
            *out.add(k) = *v;
        }
        Ok(AnosovStatus::Ok)
    })
}

/// Index-set estimate on the ball of radius `radius` as JSON. `thresholds_json` may be null.
///
/// # Safety
/// `rep` must be a live handle; strings NUL-terminated; `out_json` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn anosov_index_set_json(
    rep: *const AnosovRep,
    radius: usize,
    thresholds_json: *const c_char,
    out_json: *mut *mut c_char,
) -> AnosovStatus {
    guard(|| {
        let out = out_ptr(out_json, "out_json")?;
        *out = ptr::null_mut();
        let r = index_set(rep_ref(rep)?, radius, &thresholds(thresholds_json)?)?;
        give_string(serde_json::to_string(&r)?, out)?;
        Ok(AnosovStatus::Ok)
    })
}

/// Growth fit of `sigma_1 / sigma_d` on the ball as JSON. `thresholds_json` may be null.
///
/// # Safety
/// As [`anosov_index_set_json`].
#[no_mangle]
pub unsafe extern "C" fn anosov_qie_report_json(
    rep: *const AnosovRep,
    radius: usize,
    thresholds_json: *const c_char,
    out_json: *mut *mut c_char,
) -> AnosovStatus {
    guard(|| {
        let out = out_ptr(out_json, "out_json")?;
        *out = ptr::null_mut();
        let r = qie_report(rep_ref(rep)?, radius, &thresholds(thresholds_json)?)?;
        give_string(serde_json::to_string(&r)?, out)?;
        Ok(AnosovStatus::Ok)
    })
}

/// Ping-pong certificate for a configuration document. Returns `CertificateFailed`
/// (with the certificate still written) when the check fails.
///
/// # Safety
/// `config_json` NUL-terminated; `out_json` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn anosov_certify_pingpong_json(config_json: *const c_char, out_json: *mut *mut c_char) -> AnosovStatus {
    guard(|| {
        let out = out_ptr(out_json, "out_json")?;
        *out = ptr::null_mut();
        let cfg: PingPongConfig = serde_json::from_str(read_str(config_json, "config_json")?)?;
        let cert = check_pingpong(&cfg)?;
        give_string(serde_json::to_string(&cert)?, out)?;
        Ok(if cert.verdict == PingPongVerdict::Pass { AnosovStatus::Ok } else { AnosovStatus::CertificateFailed })
    })
}

#[derive(Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
enum BuildDoc {
    Rho { rep: Rep, p: usize, #[serde(default)] r: usize },
    Psi { rep: Rep, p: usize, #[serde(default)] r: usize },
    Phi { rho: Rep, psi: Rep, conjugators: Vec<Mat>, anchors: Vec<Mat> },
    Sp21 { b: f64 },
}

/// Builds a representation from a JSON spec:
/// `{"kind":"rho"|"psi","rep":{..},"p":2,"r":0}`, `{"kind":"phi","rho":{..},"psi":{..},"conjugators":[..],"anchors":[..]}`
/// or `{"kind":"sp21","b":1.0}`. The result is a representation document.
///
/// # Safety
/// `spec_json` NUL-terminated; `out_json` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn anosov_build_json(spec_json: *const c_char, out_json: *mut *mut c_char) -> AnosovStatus {
    guard(|| {
        let out = out_ptr(out_json, "out_json")?;
        *out = ptr::null_mut();
        let doc: BuildDoc = serde_json::from_str(read_str(spec_json, "spec_json")?)?;
        let rep = match doc {
            BuildDoc::Rho { rep, p, r } => make_rho(&rep, &BlockSpec::new(p, r, rep.dim())?)?,
            BuildDoc::Psi { rep, p, r } => make_psi(&rep, &BlockSpec::new(p, r, rep.dim())?)?,
            BuildDoc::Phi { rho, psi, conjugators, anchors } => make_phi(&rho, &psi, &conjugators, &anchors)?,
            BuildDoc::Sp21 { b } => sp21_rep(b, None)?,
        };
        give_string(rep.to_json_string(), out)?;
        Ok(AnosovStatus::Ok)
    })
}

/// Releases a string returned by this library. Null is ignored.
///
/// # Safety
/// `s` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn anosov_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Copy of the calling thread's last error message, or null. Release with [`anosov_string_free`].
#[no_mangle]
pub extern "C" fn anosov_last_error_message() -> *mut c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map(|s| s.clone().into_raw()).unwrap_or(ptr::null_mut()))
}

/// Library version (static string).
#[no_mangle]
pub extern "C" fn anosov_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr() as *const c_char
}
