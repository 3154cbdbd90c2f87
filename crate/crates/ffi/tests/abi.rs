use std::ffi::{CStr, CString};
use std::path::Path;
use std::process::Command;
use std::ptr;

use cnn_core::instance::serialize_trajectory;
use cnn_core::{AlignedTrajectory, Point};
use cnn_ffi::*;

fn take_string(p: *mut std::ffi::c_char) -> String {
    assert!(!p.is_null());
    let s = unsafe { CStr::from_ptr(p) }.to_str().unwrap().to_owned();
    unsafe { cnn_string_free(p) };
    s
}

#[test]
fn generate_run_verify_roundtrip() {
    let kind = CString::new("tight2").unwrap();
    let mut inst: *mut CnnInstance = ptr::null_mut();
    let mut opt: *mut CnnTrajectory = ptr::null_mut();
    unsafe {
        assert_eq!(
            cnn_generate(kind.as_ptr(), 1, 0, &mut inst, &mut opt),
            CnnStatus::Ok
        );
        let mut trace: *mut CnnTrace = ptr::null_mut();
        assert_eq!(cnn_run(inst, &mut trace), CnnStatus::Ok);

        let mut cost = 0.0;
        let mut exact = ptr::null_mut();
        assert_eq!(cnn_trace_cost(trace, &mut cost, &mut exact), CnnStatus::Ok);
        assert_eq!(take_string(exact), "3 + 2·√3");
        assert!((cost - 6.464_101_615_137_754).abs() < 1e-12);

        let mut report = ptr::null_mut();
        assert_eq!(cnn_verify(trace, opt, &mut report), CnnStatus::Ok);
        assert!(take_string(report).contains("\"ok\": true"));

        // Round-trip the trace through JSON.
        let mut json = ptr::null_mut();
        assert_eq!(cnn_trace_to_json(trace, &mut json), CnnStatus::Ok);
        let text = CString::new(take_string(json)).unwrap();
        let mut again: *mut CnnTrace = ptr::null_mut();
        assert_eq!(cnn_trace_parse(text.as_ptr(), &mut again), CnnStatus::Ok);
        let mut cost2 = 0.0;
        assert_eq!(
            cnn_trace_cost(again, &mut cost2, ptr::null_mut()),
            CnnStatus::Ok
        );
        assert_eq!(cost, cost2);

        cnn_trace_free(again);
        cnn_trace_free(trace);
        cnn_trajectory_free(opt);
        cnn_instance_free(inst);
    }
}

#[test]
fn diagonal_needs_rectification() {
    let json =
        CString::new(r#"{"start": [0, 0], "segments": [{"dir": [1, 1], "len": 2}]}"#).unwrap();
    let mut inst: *mut CnnInstance = ptr::null_mut();
    unsafe {
        assert_eq!(cnn_instance_parse(json.as_ptr(), &mut inst), CnnStatus::Ok);
        let mut trace: *mut CnnTrace = ptr::null_mut();
        assert_eq!(cnn_run(inst, &mut trace), CnnStatus::InvalidInput);
        assert!(trace.is_null());
        assert!(!cnn_last_error_message().is_null());

        let eps = CString::new("1/4").unwrap();
        let mut rect: *mut CnnInstance = ptr::null_mut();
        assert_eq!(
            cnn_instance_rectify(inst, eps.as_ptr(), &mut rect),
            CnnStatus::Ok
        );
        assert_eq!(cnn_run(rect, &mut trace), CnnStatus::Ok);
        cnn_trace_free(trace);
        cnn_instance_free(rect);
        cnn_instance_free(inst);
    }
}

#[test]
fn infeasible_and_corrupted_inputs() {
    let kind = CString::new("tight1").unwrap();
    let mut inst: *mut CnnInstance = ptr::null_mut();
    let mut opt: *mut CnnTrajectory = ptr::null_mut();
    unsafe {
        assert_eq!(
            cnn_generate(kind.as_ptr(), 2, 0, &mut inst, &mut opt),
            CnnStatus::Ok
        );
        let mut trace: *mut CnnTrace = ptr::null_mut();
        assert_eq!(cnn_run(inst, &mut trace), CnnStatus::Ok);

        let short = CString::new(r#"{"breakpoints": [{"s": 0, "x": 0, "y": 0}]}"#).unwrap();
        let mut bad_opt: *mut CnnTrajectory = ptr::null_mut();
        assert_eq!(
            cnn_trajectory_parse(short.as_ptr(), &mut bad_opt),
            CnnStatus::Ok
        );
        assert_eq!(
            cnn_verify(trace, bad_opt, ptr::null_mut()),
            CnnStatus::InvalidInput
        );
        cnn_trajectory_free(bad_opt);

        let total = cnn_core::generators::tight1(2)
            .unwrap()
            .instance
            .total_length();
        let far = AlignedTrajectory::stationary(Point::int(100, 100), &total);
        let far = CString::new(serialize_trajectory(&far)).unwrap();
        assert_eq!(
            cnn_trajectory_parse(far.as_ptr(), &mut bad_opt),
            CnnStatus::Ok
        );
        assert_eq!(
            cnn_verify(trace, bad_opt, ptr::null_mut()),
            CnnStatus::InfeasibleOpt
        );

        let unknown = CString::new("spiral").unwrap();
        let (mut i2, mut o2) = (ptr::null_mut(), ptr::null_mut());
        assert_eq!(
            cnn_generate(unknown.as_ptr(), 1, 0, &mut i2, &mut o2),
            CnnStatus::InvalidInput
        );
        let zero = CString::new("tight1").unwrap();
        assert_eq!(
            cnn_generate(zero.as_ptr(), 0, 0, &mut i2, &mut o2),
            CnnStatus::InvalidInput
        );

        cnn_trajectory_free(bad_opt);
        cnn_trace_free(trace);
        cnn_trajectory_free(opt);
        cnn_instance_free(inst);
    }
}

#[test]
fn header_is_valid_c() {
    let header = Path::new(env!("CARGO_MANIFEST_DIR")).join("include/cnn.h");
    let text = std::fs::read_to_string(&header).unwrap();
    for name in [
        "cnn_run",
        "cnn_verify",
        "cnn_last_error_message",
        "CNN_STATUS_OK",
        "CnnTrace",
    ] {
        assert!(text.contains(name), "header lacks {name}");
    }
    let Ok(status) = Command::new("cc")
        .args(["-fsyntax-only", "-x", "c", "-std=c99"])
        .arg(&header)
        .status()
    else {
        eprintln!("no C compiler; syntax check skipped");
        return;
    };
    assert!(status.success());
}
