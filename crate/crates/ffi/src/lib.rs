//! C ABI for the core crate.
//!
//! Spaces and curves are opaque handles: created from the same JSON formats
//! the CLI reads, freed with their dedicated destructors. Every fallible
//! call returns an [`MstcStatus`]; after a failure,
//! [`mstc_last_error_message`] returns a description of what went wrong on
//! the calling thread.
//!
//! The generated header lives at `include/mstc.h`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::ptr;

use mstc_core::curve::TestCurve;
use mstc_core::gradients::minimal_hajlasz;
use mstc_core::jsonio::{parse_curve, parse_family, parse_space, FamilySpec};
use mstc_core::modulus::{enumerate_step_curves, modulus, CurveFamily};
use mstc_core::report::to_json;
use mstc_core::space::{MetricMeasureSpace, ScalarFunction};
use mstc_core::stieltjes::{sym_integrate, Integrand};
use mstc_core::verify::{report_value, run_all, run_suite, Suite, VerifyConfig};
use mstc_core::{Error, Result};

/// Status codes returned by every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MstcStatus {
    /// The call succeeded.
    MstcOk = 0,
    /// A pointer argument was null or a string was not valid UTF-8.
    MstcInvalidArgument = 1,
    /// The input failed parsing or validation; see the last error message.
    MstcInvalidInput = 2,
}

/// Opaque handle to a finite metric measure space.
pub struct MstcSpace(MetricMeasureSpace);

/// Opaque handle to a test curve, bound to the space it was parsed against.
pub struct MstcCurve(TestCurve);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(message: String) -> MstcStatus {
    let stored = CString::new(message)
        .unwrap_or_else(|_| CString::new("error message contained a NUL byte").unwrap());
    LAST_ERROR.with(|slot| *slot.borrow_mut() = Some(stored));
    MstcStatus::MstcInvalidInput
}

fn clear_error() {
    LAST_ERROR.with(|slot| *slot.borrow_mut() = None);
}

fn fail(e: Error) -> MstcStatus {
    set_error(e.to_string())
}

fn bad_argument(what: &str) -> MstcStatus {
    set_error(format!("invalid argument: {what}"));
    MstcStatus::MstcInvalidArgument
}

/// # Safety
/// `text` must be a valid NUL-terminated string or null.
unsafe fn utf8<'a>(text: *const c_char, what: &str) -> std::result::Result<&'a str, MstcStatus> {
    if text.is_null() {
        return Err(bad_argument(what));
    }
    CStr::from_ptr(text)
        .to_str()
        .map_err(|_| bad_argument(what))
}

unsafe fn deref<'a, T>(handle: *const T, what: &str) -> std::result::Result<&'a T, MstcStatus> {
    handle.as_ref().ok_or_else(|| bad_argument(what))
}

/// Returns a pointer to a NUL-terminated description of the last failure on
/// this thread, or null when every call so far succeeded. The pointer stays
/// valid until the next failing call on the same thread.
///
/// # Safety
/// The returned pointer must not be freed or used after a later failure.
#[no_mangle]
pub unsafe extern "C" fn mstc_last_error_message() -> *const c_char {
    LAST_ERROR.with(|slot| {
        slot.borrow()
            .as_ref()
            .map_or(ptr::null(), |message| message.as_ptr())
    })
}

/// Parses a space from JSON (`{"n":…, "dist":[[…]], "weight":[…],
/// "coords":[[…]]?}`) and validates the metric axioms.
///
/// # Safety
/// `json` must be NUL-terminated; `out` must be a valid pointer. On success
/// `*out` owns the space and must be released with [`mstc_space_free`].
#[no_mangle]
pub unsafe extern "C" fn mstc_space_from_json(
    json: *const c_char,
    out: *mut *mut MstcSpace,
) -> MstcStatus {
    if out.is_null() {
        return bad_argument("out pointer is null");
    }
    let text = match utf8(json, "json pointer is null or not UTF-8") {
        Ok(t) => t,
        Err(status) => return status,
    };
    match parse_space(text) {
        Ok(space) => {
            clear_error();
            *out = Box::into_raw(Box::new(MstcSpace(space)));
            MstcStatus::MstcOk
        }
        Err(e) => fail(e),
    }
}

/// Releases a space handle. Null is a no-op.
///
/// # Safety
/// `space` must have come from [`mstc_space_from_json`] and not been freed.
#[no_mangle]
pub unsafe extern "C" fn mstc_space_free(space: *mut MstcSpace) {
    if !space.is_null() {
        drop(Box::from_raw(space));
    }
}

/// Number of points, or 0 for a null handle.
///
/// # Safety
/// `space` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn mstc_space_points(space: *const MstcSpace) -> usize {
    space.as_ref().map_or(0, |s| s.0.n())
}

/// Parses a curve from JSON (`{"domain":[a,b], "pieces":[…]}`) against a
/// space.
///
/// # Safety
/// As [`mstc_space_from_json`]; on success `*out` must be released with
/// [`mstc_curve_free`].
#[no_mangle]
pub unsafe extern "C" fn mstc_curve_from_json(
    space: *const MstcSpace,
    json: *const c_char,
    out: *mut *mut MstcCurve,
) -> MstcStatus {
    if out.is_null() {
        return bad_argument("out pointer is null");
    }
    let s = match deref(space, "space handle is null") {
        Ok(s) => s,
        Err(status) => return status,
    };
    let text = match utf8(json, "json pointer is null or not UTF-8") {
        Ok(t) => t,
        Err(status) => return status,
    };
    match parse_curve(text, &s.0) {
        Ok(curve) => {
            clear_error();
            *out = Box::into_raw(Box::new(MstcCurve(curve)));
            MstcStatus::MstcOk
        }
        Err(e) => fail(e),
    }
}

/// Releases a curve handle. Null is a no-op.
///
/// # Safety
/// `curve` must have come from [`mstc_curve_from_json`] and not been freed.
#[no_mangle]
pub unsafe extern "C" fn mstc_curve_free(curve: *mut MstcCurve) {
    if !curve.is_null() {
        drop(Box::from_raw(curve));
    }
}

/// Total variation of the curve in the space.
///
/// # Safety
/// Handles must be live; `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn mstc_curve_variation(
    space: *const MstcSpace,
    curve: *const MstcCurve,
    out: *mut f64,
) -> MstcStatus {
    if out.is_null() {
        return bad_argument("out pointer is null");
    }
    let s = match deref(space, "space handle is null") {
        Ok(s) => s,
        Err(status) => return status,
    };
    let c = match deref(curve, "curve handle is null") {
        Ok(c) => c,
        Err(status) => return status,
    };
    clear_error();
    *out = c.0.variation(&s.0);
    MstcStatus::MstcOk
}

fn table(values: *const f64, len: usize, n: usize) -> Result<ScalarFunction> {
    if len != n {
        return Err(Error::Function(format!(
            "table has {len} entries but the space has {n} points"
        )));
    }
    let slice = unsafe { std::slice::from_raw_parts(values, len) };
    ScalarFunction::new(slice.to_vec())
}

/// Symmetrized curve integral `∫^S_γ f` of the table `values` (one entry per
/// space point) along the curve.
///
/// # Safety
/// Handles must be live; `values` must point at `len` doubles; `out` must be
/// a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn mstc_sym_integrate(
    space: *const MstcSpace,
    curve: *const MstcCurve,
    values: *const f64,
    len: usize,
    out: *mut f64,
) -> MstcStatus {
    if out.is_null() || values.is_null() {
        return bad_argument("out or values pointer is null");
    }
    let s = match deref(space, "space handle is null") {
        Ok(s) => s,
        Err(status) => return status,
    };
    let c = match deref(curve, "curve handle is null") {
        Ok(c) => c,
        Err(status) => return status,
    };
    let result = table(values, len, s.0.n())
        .and_then(|f| sym_integrate(&s.0, &c.0, &Integrand::Table(&f)));
    match result {
        Ok(value) => {
            clear_error();
            *out = value;
            MstcStatus::MstcOk
        }
        Err(e) => fail(e),
    }
}

/// Discrete p-modulus of a family given as JSON: a curve array or
/// `{"enumerate": {"max_jumps": J, "depth": D}}` (depth defaults to 3).
///
/// # Safety
/// As [`mstc_sym_integrate`].
#[no_mangle]
pub unsafe extern "C" fn mstc_modulus(
    space: *const MstcSpace,
    family_json: *const c_char,
    p: f64,
    out: *mut f64,
) -> MstcStatus {
    if out.is_null() {
        return bad_argument("out pointer is null");
    }
    let s = match deref(space, "space handle is null") {
        Ok(s) => s,
        Err(status) => return status,
    };
    let text = match utf8(family_json, "family json is null or not UTF-8") {
        Ok(t) => t,
        Err(status) => return status,
    };
    let result = parse_family(text, &s.0).and_then(|spec| {
        let curves = match spec {
            FamilySpec::Curves(curves) => curves,
            FamilySpec::Enumerate { max_jumps, depth } => {
                enumerate_step_curves(&s.0, max_jumps, depth.unwrap_or(3))
            }
        };
        let fam = CurveFamily::new(&s.0, curves)?;
        modulus(&s.0, &fam, p)
    });
    match result {
        Ok(r) => {
            clear_error();
            *out = r.value;
            MstcStatus::MstcOk
        }
        Err(e) => fail(e),
    }
}

/// Pointwise-minimal Hajłasz gradient of the table `values`. Writes the
/// gradient into `gradient_out` (space size entries) and its L^p norm into
/// `norm_out`.
///
/// # Safety
/// `values` and `gradient_out` must point at `len` doubles with `len` equal
/// to the space size; `norm_out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn mstc_hajlasz_min(
    space: *const MstcSpace,
    values: *const f64,
    len: usize,
    p: f64,
    gradient_out: *mut f64,
    norm_out: *mut f64,
) -> MstcStatus {
    if values.is_null() || gradient_out.is_null() || norm_out.is_null() {
        return bad_argument("values, gradient_out or norm_out pointer is null");
    }
    let s = match deref(space, "space handle is null") {
        Ok(s) => s,
        Err(status) => return status,
    };
    let result = table(values, len, s.0.n()).and_then(|f| minimal_hajlasz(&s.0, &f, p));
    match result {
        Ok((gradient, norm)) => {
            clear_error();
            let out = std::slice::from_raw_parts_mut(gradient_out, len);
            out.copy_from_slice(gradient.values());
            *norm_out = norm;
            MstcStatus::MstcOk
        }
        Err(e) => fail(e),
    }
}

/// Runs a verification suite (`"uno"`, `"bounded18"`, `"seventysix"`,
/// `"plans"`, `"fuglede"` or `"all"`) and returns the JSON report. A report
/// is produced even when the suite finds violations; inspect its `passed`
/// field.
///
/// # Safety
/// `suite` must be NUL-terminated; `report_out` must be a valid pointer. On
/// success `*report_out` must be released with [`mstc_string_free`].
#[no_mangle]
pub unsafe extern "C" fn mstc_verify_suite(
    suite: *const c_char,
    spaces: usize,
    seed: u64,
    max_jumps: usize,
    depth: u32,
    p: f64,
    tolerance: f64,
    report_out: *mut *mut c_char,
) -> MstcStatus {
    if report_out.is_null() {
        return bad_argument("report_out pointer is null");
    }
    let name = match utf8(suite, "suite name is null or not UTF-8") {
        Ok(t) => t,
        Err(status) => return status,
    };
    let cfg = VerifyConfig { spaces, max_jumps, depth, seed, p, tol: tolerance };
    let outcomes = if name == "all" {
        run_all(&cfg)
    } else {
        match Suite::from_name(name) {
            Some(s) => run_suite(s, &cfg).map(|o| vec![o]),
            None => return set_error(format!("unknown suite {name:?}")),
        }
    };
    match outcomes {
        Ok(outcomes) => {
            let json = to_json(&report_value(&cfg, &outcomes));
            let stored = CString::new(json).expect("report JSON has no NUL bytes");
            clear_error();
            *report_out = stored.into_raw();
            MstcStatus::MstcOk
        }
        Err(e) => fail(e),
    }
}

/// Releases a string returned by this library. Null is a no-op.
///
/// # Safety
/// `s` must have come from this library and not been freed.
#[no_mangle]
pub unsafe extern "C" fn mstc_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}
