//! Drives the C ABI the way a foreign caller would: JSON in, handles out,
//! status codes and the thread-local error message checked on every path.

use std::ffi::{CStr, CString};
use std::ptr;

use mstc_ffi::{
    mstc_curve_free, mstc_curve_from_json, mstc_curve_variation, mstc_hajlasz_min,
    mstc_last_error_message, mstc_modulus, mstc_space_free, mstc_space_from_json,
    mstc_space_points, mstc_string_free, mstc_sym_integrate, mstc_verify_suite, MstcCurve,
    MstcSpace, MstcStatus,
};

const SPACE: &str = r#"{
    "n": 2,
    "dist": [[0.0, 1.0], [1.0, 0.0]],
    "weight": [1.0, 1.0],
    "coords": [[0.0, 0.0], [1.0, 0.0]]
}"#;

const CURVE: &str = r#"{
    "domain": [0.0, 1.0],
    "pieces": [
        { "type": "step", "start": 0.0, "point": 0 },
        { "type": "step", "start": 0.5, "point": 1 }
    ]
}"#;

unsafe fn make_space(json: &str) -> *mut MstcSpace {
    let json = CString::new(json).unwrap();
    let mut space: *mut MstcSpace = ptr::null_mut();
    let status = mstc_space_from_json(json.as_ptr(), &mut space);
    assert_eq!(status, MstcStatus::MstcOk);
    assert!(!space.is_null());
    space
}

unsafe fn last_error() -> String {
    let message = mstc_last_error_message();
    assert!(!message.is_null());
    CStr::from_ptr(message).to_string_lossy().into_owned()
}

#[test]
fn round_trips_space_curve_and_integral() {
    unsafe {
        let space = make_space(SPACE);
        assert_eq!(mstc_space_points(space), 2);

        let curve_json = CString::new(CURVE).unwrap();
        let mut curve: *mut MstcCurve = ptr::null_mut();
        assert_eq!(
            mstc_curve_from_json(space, curve_json.as_ptr(), &mut curve),
            MstcStatus::MstcOk
        );

        let mut variation = 0.0f64;
        assert_eq!(
            mstc_curve_variation(space, curve, &mut variation),
            MstcStatus::MstcOk
        );
        assert_eq!(variation, 1.0);

        // ∫^S of the table (f(0), f(1)) over the single unit jump is the
        // midpoint value times the jump size.
        let table = [3.0f64, 5.0];
        let mut integral = 0.0f64;
        assert_eq!(
            mstc_sym_integrate(space, curve, table.as_ptr(), table.len(), &mut integral),
            MstcStatus::MstcOk
        );
        assert!((integral - 4.0).abs() < 1e-12);

        mstc_curve_free(curve);
        mstc_space_free(space);
    }
}

#[test]
fn modulus_and_minimal_gradient_match_closed_forms() {
    unsafe {
        let space = make_space(SPACE);

        let family = CString::new(format!("[{CURVE}]")).unwrap();
        let mut value = 0.0f64;
        assert_eq!(
            mstc_modulus(space, family.as_ptr(), 2.0, &mut value),
            MstcStatus::MstcOk
        );
        assert!((value - 2.0).abs() < 1e-9);

        let directive = CString::new(r#"{ "enumerate": { "max_jumps": 1 } }"#).unwrap();
        assert_eq!(
            mstc_modulus(space, directive.as_ptr(), 2.0, &mut value),
            MstcStatus::MstcOk
        );
        assert!((value - 2.0).abs() < 1e-9);

        let table = [0.0f64, 1.0];
        let mut gradient = [0.0f64; 2];
        let mut norm = 0.0f64;
        assert_eq!(
            mstc_hajlasz_min(
                space,
                table.as_ptr(),
                table.len(),
                2.0,
                gradient.as_mut_ptr(),
                &mut norm,
            ),
            MstcStatus::MstcOk
        );
        assert!((gradient[0] - 0.5).abs() < 1e-9 && (gradient[1] - 0.5).abs() < 1e-9);
        assert!((norm - 0.5f64.sqrt()).abs() < 1e-9);

        mstc_space_free(space);
    }
}

#[test]
fn verify_suite_returns_a_passing_report() {
    unsafe {
        let suite = CString::new("uno").unwrap();
        let mut report: *mut std::ffi::c_char = ptr::null_mut();
        assert_eq!(
            mstc_verify_suite(suite.as_ptr(), 4, 7, 2, 2, 2.0, 1e-9, &mut report),
            MstcStatus::MstcOk
        );
        let text = CStr::from_ptr(report).to_string_lossy().into_owned();
        assert!(text.contains("\"passed\": true"), "{text}");
        assert!(text.contains("\"suite\": \"uno\""), "{text}");
        mstc_string_free(report);

        let unknown = CString::new("nope").unwrap();
        assert_eq!(
            mstc_verify_suite(unknown.as_ptr(), 4, 7, 2, 2, 2.0, 1e-9, &mut report),
            MstcStatus::MstcInvalidInput
        );
        assert!(last_error().contains("unknown suite"));
    }
}

#[test]
fn failures_set_status_and_message() {
    unsafe {
        let bad = CString::new(r#"{ "n": 2, "dist": [[0,1],[2,0]], "weight": [1,1] }"#).unwrap();
        let mut space: *mut MstcSpace = ptr::null_mut();
        assert_eq!(
            mstc_space_from_json(bad.as_ptr(), &mut space),
            MstcStatus::MstcInvalidInput
        );
        assert!(space.is_null());
        assert!(last_error().contains("asymmetry"), "{}", last_error());

        assert_eq!(
            mstc_space_from_json(ptr::null(), &mut space),
            MstcStatus::MstcInvalidArgument
        );

        // A wrong-length table is rejected before any math runs.
        let good = make_space(SPACE);
        let table = [1.0f64; 3];
        let mut gradient = [0.0f64; 3];
        let mut norm = 0.0f64;
        assert_eq!(
            mstc_hajlasz_min(good, table.as_ptr(), 3, 2.0, gradient.as_mut_ptr(), &mut norm),
            MstcStatus::MstcInvalidInput
        );
        assert!(last_error().contains("3 entries"), "{}", last_error());
        mstc_space_free(good);
    }
}
