//! C ABI over `qgamma`.
//!
//! Every function returns a [`QgStatus`]; results come back through out
//! pointers as opaque handles or library-allocated strings, each released by
//! its own `*_free` function. After a non-OK status,
//! [`qg_last_error_message`] describes the failure on the calling thread.
//! Panics never cross the boundary.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use qgamma::cli::{gamma_run, GammaMethod};
use qgamma::irrat::{self, IrrationalityCertificate, ThresholdKind};
use qgamma::linforms::{self, LinearFormDecomposition};
use qgamma::numerics::PrecisionPlan;
use qgamma::qlog::{qlog_accel, QLogRequest};
use qgamma::{Error, HpReal};
use rug::Rational;

/// Status codes.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum QgStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Domain = 3,
    Range = 4,
    Precision = 5,
    Plan = 6,
    Internal = 7,
}

/// A real number with a rigorous absolute error bound.
pub struct QgReal(HpReal);

/// Outcome of one irrationality test.
pub struct QgCertificate(IrrationalityCertificate);

/// A decomposition `I = c·γ + L − A`.
pub struct QgDecomposition(LinearFormDecomposition);

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn status_of(e: &Error) -> QgStatus {
    match e {
        Error::Domain(_) => QgStatus::Domain,
        Error::Range(_) => QgStatus::Range,
        Error::Plan(_) => QgStatus::Plan,
        _ => QgStatus::Precision,
    }
}

/// Runs `f` behind a panic barrier, recording any error message.
fn guard(f: impl FnOnce() -> Result<(), (QgStatus, String)>) -> QgStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_error("");
            QgStatus::Ok
        }
        Ok(Err((s, msg))) => {
            set_error(&msg);
            s
        }
        Err(_) => {
            set_error("internal panic");
            QgStatus::Internal
        }
    }
}

fn lib<T>(r: qgamma::Result<T>) -> Result<T, (QgStatus, String)> {
    r.map_err(|e| (status_of(&e), e.to_string()))
}

fn bad(msg: &str) -> (QgStatus, String) {
    (QgStatus::InvalidArgument, msg.to_string())
}

fn null(what: &str) -> (QgStatus, String) {
    (QgStatus::NullPointer, format!("{what} is null"))
}

unsafe fn str_arg<'a>(p: *const c_char, what: &str) -> Result<&'a str, (QgStatus, String)> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p).to_str().map_err(|_| bad(&format!("{what} is not UTF-8")))
}

unsafe fn put<T>(out: *mut *mut T, v: T) {
    *out = Box::into_raw(Box::new(v));
}

unsafe fn put_string(out: *mut *mut c_char, s: String) -> Result<(), (QgStatus, String)> {
    let c = CString::new(s).map_err(|_| (QgStatus::Internal, "string contains NUL".into()))?;
    *out = c.into_raw();
    Ok(())
}

/// Message for the last failure on this thread; empty after a success.
/// Valid until the next call into the library from this thread.
#[no_mangle]
pub extern "C" fn qg_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Library version as a static string.
#[no_mangle]
pub extern "C" fn qg_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Releases a string returned by the library.
///
/// # Safety
/// `s` must come from this library and not be freed twice; null is ignored.
#[no_mangle]
pub unsafe extern "C" fn qg_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Euler's constant by `method` (a `gamma` method name such as `"gosper"`
/// or `"asym-28"`) provisioned for `digits` decimals. `q == 0` and `n < 0`
/// select the method defaults.
///
/// # Safety
/// `method` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qg_gamma(method: *const c_char, digits: u32, q: u64, n: i32, out: *mut *mut QgReal) -> QgStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let name = str_arg(method, "method")?;
        let m = GammaMethod::parse(name).ok_or_else(|| bad(&format!("unknown method {name:?}")))?;
        if digits == 0 {
            return Err(bad("digits must be >= 1"));
        }
        let q = (q != 0).then_some(q);
        let n = u32::try_from(n).ok();
        let run = lib(gamma_run(m, digits, q, n, None))?;
        put(out, QgReal(run.value));
        Ok(())
    })
}

/// `ln_q(1 + z_num/z_den)` to `digits` decimals by the accelerated route.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qg_qlog(q: u64, z_num: i64, z_den: u64, digits: u32, out: *mut *mut QgReal) -> QgStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        if z_den == 0 {
            return Err(bad("zero denominator"));
        }
        let req = lib(QLogRequest::new(q, Rational::from((z_num, z_den)), PrecisionPlan::for_digits(digits.max(1))))?;
        put(out, QgReal(qlog_accel(&req)));
        Ok(())
    })
}

/// `digits` decimals, truncated, all certified; fails with
/// `QG_STATUS_PRECISION` when the error bound is too wide.
///
/// # Safety
/// `r` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qg_real_to_fixed(r: *const QgReal, digits: u32, out: *mut *mut c_char) -> QgStatus {
    guard(|| {
        let r = r.as_ref().ok_or_else(|| null("r"))?;
        if out.is_null() {
            return Err(null("out"));
        }
        let s = lib(r.0.to_fixed(digits))?;
        put_string(out, s)
    })
}

/// Nearest double to the midpoint.
///
/// # Safety
/// `r` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qg_real_to_f64(r: *const QgReal, out: *mut f64) -> QgStatus {
    guard(|| {
        let r = r.as_ref().ok_or_else(|| null("r"))?;
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        *out = r.0.to_f64();
        Ok(())
    })
}

/// Decimal digits after the point certified by the error bound.
///
/// # Safety
/// `r` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qg_real_certified_digits(r: *const QgReal, out: *mut u32) -> QgStatus {
    guard(|| {
        let r = r.as_ref().ok_or_else(|| null("r"))?;
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        *out = r.0.certified_digits();
        Ok(())
    })
}

/// # Safety
/// `r` must come from this library and not be freed twice; null is ignored.
#[no_mangle]
pub unsafe extern "C" fn qg_real_free(r: *mut QgReal) {
    if !r.is_null() {
        drop(Box::from_raw(r));
    }
}

/// Base-2 irrationality test. `kind` is one of `eq25`, `simplified_5power`,
/// `eq26`, `eps_refined` (which reads `eps`).
///
/// # Safety
/// `kind` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qg_irrat_base2(
    n: u32,
    m: u32,
    kind: *const c_char,
    eps: f64,
    out: *mut *mut QgCertificate,
) -> QgStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let k = lib(ThresholdKind::parse(str_arg(kind, "kind")?, Some(eps)))?;
        put(out, QgCertificate(lib(irrat::test_base2(n, m, k))?));
        Ok(())
    })
}

/// Base-3 irrationality test at level `n`.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qg_irrat_base3(n: u32, out: *mut *mut QgCertificate) -> QgStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        put(out, QgCertificate(lib(irrat::test_base3(n))?));
        Ok(())
    })
}

/// Whether the fractional part exceeded the threshold.
///
/// # Safety
/// `c` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qg_certificate_passed(c: *const QgCertificate, out: *mut bool) -> QgStatus {
    guard(|| {
        let c = c.as_ref().ok_or_else(|| null("c"))?;
        *out.as_mut().ok_or_else(|| null("out"))? = c.0.passed;
        Ok(())
    })
}

/// The certificate as JSON, keys in their fixed order.
///
/// # Safety
/// `c` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qg_certificate_to_json(c: *const QgCertificate, out: *mut *mut c_char) -> QgStatus {
    guard(|| {
        let c = c.as_ref().ok_or_else(|| null("c"))?;
        if out.is_null() {
            return Err(null("out"));
        }
        let s = serde_json::to_string(&c.0).map_err(|e| (QgStatus::Internal, e.to_string()))?;
        put_string(out, s)
    })
}

/// # Safety
/// `c` must come from this library and not be freed twice; null is ignored.
#[no_mangle]
pub unsafe extern "C" fn qg_certificate_free(c: *mut QgCertificate) {
    if !c.is_null() {
        drop(Box::from_raw(c));
    }
}

fn decompose(r: qgamma::Result<LinearFormDecomposition>, out: *mut *mut QgDecomposition) -> Result<(), (QgStatus, String)> {
    if out.is_null() {
        return Err(null("out"));
    }
    let d = lib(r)?;
    // SAFETY: checked non-null above; the caller guarantees writability.
    unsafe { put(out, QgDecomposition(d)) };
    Ok(())
}

/// Base-2 decomposition at `work_bits` bits (0 selects 200).
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qg_decompose_base2(n: u32, m: u32, work_bits: u32, out: *mut *mut QgDecomposition) -> QgStatus {
    guard(|| decompose(linforms::decompose_base2(n, m, &plan(work_bits)), out))
}

/// Base-3 decomposition with `m = 6k`.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qg_decompose_base3(n: u32, k: u32, work_bits: u32, out: *mut *mut QgDecomposition) -> QgStatus {
    guard(|| decompose(linforms::decompose_base3(n, k, &plan(work_bits)), out))
}

/// Base-q decomposition.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qg_decompose_baseq(
    q: u64,
    n: u32,
    m: u32,
    work_bits: u32,
    out: *mut *mut QgDecomposition,
) -> QgStatus {
    guard(|| decompose(linforms::decompose_baseq(q, n, m, &plan(work_bits)), out))
}

fn plan(work_bits: u32) -> PrecisionPlan {
    PrecisionPlan::for_bits(if work_bits == 0 { 200 } else { work_bits })
}

/// The residual `I` as a new real handle.
///
/// # Safety
/// `d` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qg_decomposition_residual(d: *const QgDecomposition, out: *mut *mut QgReal) -> QgStatus {
    guard(|| {
        let d = d.as_ref().ok_or_else(|| null("d"))?;
        if out.is_null() {
            return Err(null("out"));
        }
        let r = d.0.residual.clone().ok_or_else(|| (QgStatus::Internal, "no residual".to_string()))?;
        put(out, QgReal(r));
        Ok(())
    })
}

/// The decomposition as JSON.
///
/// # Safety
/// `d` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qg_decomposition_to_json(d: *const QgDecomposition, out: *mut *mut c_char) -> QgStatus {
    guard(|| {
        let d = d.as_ref().ok_or_else(|| null("d"))?;
        if out.is_null() {
            return Err(null("out"));
        }
        let s = serde_json::to_string(&d.0).map_err(|e| (QgStatus::Internal, e.to_string()))?;
        put_string(out, s)
    })
}

/// # Safety
/// `d` must come from this library and not be freed twice; null is ignored.
#[no_mangle]
pub unsafe extern "C" fn qg_decomposition_free(d: *mut QgDecomposition) {
    if !d.is_null() {
        drop(Box::from_raw(d));
    }
}
