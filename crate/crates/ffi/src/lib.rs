//! C ABI over the CNN workbench. Objects cross the boundary as opaque
//! handles; every fallible call returns a [`CnnStatus`] and leaves a
//! message retrievable with [`cnn_last_error_message`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use cnn_core::engine::{parse_trace, serialize_trace};
use cnn_core::generators::{fig2_scenario, random_orthogonal, tight1, tight2};
use cnn_core::instance::{
    parse_instance, parse_trajectory, serialize_instance, serialize_trajectory,
};
use cnn_core::monitor::verify_nondecreasing;
use cnn_core::{rectify, AlignedTrajectory, Error, Instance, Scalar, Trace};

/// Opaque request instance.
pub struct CnnInstance(Instance);

/// Opaque offline trajectory.
pub struct CnnTrajectory(AlignedTrajectory);

/// Opaque online trace.
pub struct CnnTrace(Trace);

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CnnStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    ParseError = 3,
    InvalidInput = 4,
    InfeasibleOpt = 5,
    /// The potential decreased; the call itself succeeded.
    VerificationFailed = 6,
    Internal = 7,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(err: &Error) -> CnnStatus {
    match err {
        Error::Parse(_) | Error::Schema { .. } | Error::MalformedTrace(_) => CnnStatus::ParseError,
        Error::InfeasibleOpt(_) => CnnStatus::InfeasibleOpt,
        Error::InvariantBreach(_) => CnnStatus::Internal,
        _ => CnnStatus::InvalidInput,
    }
}

struct Fail(CnnStatus, String);

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail(status_of(&e), e.to_string())
    }
}

fn guard(f: impl FnOnce() -> Result<CnnStatus, Fail>) -> CnnStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(s)) => s,
        Ok(Err(Fail(s, msg))) => {
            set_error(msg);
            s
        }
        Err(_) => {
            set_error("internal panic".into());
            CnnStatus::Internal
        }
    }
}

unsafe fn str_arg<'a>(p: *const c_char, what: &str) -> Result<&'a str, Fail> {
    if p.is_null() {
        return Err(Fail(CnnStatus::NullPointer, format!("{what} is null")));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| Fail(CnnStatus::InvalidUtf8, format!("{what} is not UTF-8")))
}

unsafe fn ref_arg<'a, T>(p: *const T, what: &str) -> Result<&'a T, Fail> {
    p.as_ref()
        .ok_or_else(|| Fail(CnnStatus::NullPointer, format!("{what} is null")))
}

unsafe fn put<T>(out: *mut *mut T, value: T) -> Result<CnnStatus, Fail> {
    if out.is_null() {
        return Err(Fail(
            CnnStatus::NullPointer,
            "output pointer is null".into(),
        ));
    }
    *out = Box::into_raw(Box::new(value));
    Ok(CnnStatus::Ok)
}

unsafe fn put_string(out: *mut *mut c_char, text: String) -> Result<CnnStatus, Fail> {
    if out.is_null() {
        return Err(Fail(
            CnnStatus::NullPointer,
            "output pointer is null".into(),
        ));
    }
    let c = CString::new(text).map_err(|_| Fail(CnnStatus::Internal, "interior NUL".into()))?;
    *out = c.into_raw();
    Ok(CnnStatus::Ok)
}

/// Message for the last failed call on this thread, or null. The pointer
/// stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn cnn_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Frees a string returned by this library.
///
/// # Safety
/// `s` must be null or come from this library and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn cnn_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// # Safety
/// `json` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn cnn_instance_parse(
    json: *const c_char,
    out: *mut *mut CnnInstance,
) -> CnnStatus {
    guard(|| {
        let inst = parse_instance(str_arg(json, "json")?)?;
        put(out, CnnInstance(inst))
    })
}

/// # Safety
/// `inst` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn cnn_instance_to_json(
    inst: *const CnnInstance,
    out: *mut *mut c_char,
) -> CnnStatus {
    guard(|| put_string(out, serialize_instance(&ref_arg(inst, "instance")?.0)))
}

/// Replaces diagonal segments by staircases of step at most `epsilon`
/// (an exact number such as `1/8` or `0.125`).
///
/// # Safety
/// `inst` must be a live handle, `epsilon` NUL-terminated, `out` writable.
#[no_mangle]
pub unsafe extern "C" fn cnn_instance_rectify(
    inst: *const CnnInstance,
    epsilon: *const c_char,
    out: *mut *mut CnnInstance,
) -> CnnStatus {
    guard(|| {
        let inst = ref_arg(inst, "instance")?;
        let eps: Scalar = str_arg(epsilon, "epsilon")?.parse()?;
        put(out, CnnInstance(rectify(&inst.0, &eps)?))
    })
}

/// # Safety
/// `inst` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn cnn_instance_free(inst: *mut CnnInstance) {
    if !inst.is_null() {
        drop(Box::from_raw(inst));
    }
}

/// # Safety
/// `json` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn cnn_trajectory_parse(
    json: *const c_char,
    out: *mut *mut CnnTrajectory,
) -> CnnStatus {
    guard(|| {
        let traj = parse_trajectory(str_arg(json, "json")?)?;
        put(out, CnnTrajectory(traj))
    })
}

/// # Safety
/// `traj` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn cnn_trajectory_to_json(
    traj: *const CnnTrajectory,
    out: *mut *mut c_char,
) -> CnnStatus {
    guard(|| put_string(out, serialize_trajectory(&ref_arg(traj, "trajectory")?.0)))
}

/// # Safety
/// `traj` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn cnn_trajectory_free(traj: *mut CnnTrajectory) {
    if !traj.is_null() {
        drop(Box::from_raw(traj));
    }
}

/// Builds a named instance with its offline trajectory. `kind` is one of
/// `tight1`, `tight2`, `fig2`, `random`; `cycles` applies to the tight
/// families and `seed` to `random` (which uses 16 segments in `[-4, 4]²`).
///
/// # Safety
/// `kind` must be NUL-terminated; both outputs must be writable.
#[no_mangle]
pub unsafe extern "C" fn cnn_generate(
    kind: *const c_char,
    cycles: u32,
    seed: u64,
    out_instance: *mut *mut CnnInstance,
    out_opt: *mut *mut CnnTrajectory,
) -> CnnStatus {
    guard(|| {
        if out_instance.is_null() || out_opt.is_null() {
            return Err(Fail(
                CnnStatus::NullPointer,
                "output pointer is null".into(),
            ));
        }
        let pair = match str_arg(kind, "kind")? {
            "tight1" => tight1(cycles as usize)?,
            "tight2" => tight2(cycles as usize)?,
            "fig2" => fig2_scenario()?,
            "random" => random_orthogonal(seed, 16, 4)?,
            other => {
                return Err(Fail(
                    CnnStatus::InvalidInput,
                    format!("unknown kind {other:?}"),
                ))
            }
        };
        put(out_instance, CnnInstance(pair.instance))?;
        put(out_opt, CnnTrajectory(pair.opt))
    })
}

/// Runs Bishop-Rook. Fails with `InvalidInput` on diagonal segments.
///
/// # Safety
/// `inst` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn cnn_run(inst: *const CnnInstance, out: *mut *mut CnnTrace) -> CnnStatus {
    guard(|| {
        let trace = cnn_core::run(&ref_arg(inst, "instance")?.0)?;
        put(out, CnnTrace(trace))
    })
}

/// # Safety
/// `json` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn cnn_trace_parse(
    json: *const c_char,
    out: *mut *mut CnnTrace,
) -> CnnStatus {
    guard(|| {
        let trace = parse_trace(str_arg(json, "json")?)?;
        put(out, CnnTrace(trace))
    })
}

/// # Safety
/// `trace` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn cnn_trace_to_json(
    trace: *const CnnTrace,
    out: *mut *mut c_char,
) -> CnnStatus {
    guard(|| put_string(out, serialize_trace(&ref_arg(trace, "trace")?.0)))
}

/// Online cost of a trace: a float approximation and, if `out_exact` is
/// not null, the exact value as text (free with [`cnn_string_free`]).
///
/// # Safety
/// `trace` must be a live handle; `out_float` must be writable.
#[no_mangle]
pub unsafe extern "C" fn cnn_trace_cost(
    trace: *const CnnTrace,
    out_float: *mut f64,
    out_exact: *mut *mut c_char,
) -> CnnStatus {
    guard(|| {
        let cost = &ref_arg(trace, "trace")?.0.final_cost;
        if out_float.is_null() {
            return Err(Fail(
                CnnStatus::NullPointer,
                "output pointer is null".into(),
            ));
        }
        *out_float = cost.to_f64();
        if !out_exact.is_null() {
            put_string(out_exact, cost.to_string())?;
        }
        Ok(CnnStatus::Ok)
    })
}

/// # Safety
/// `trace` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn cnn_trace_free(trace: *mut CnnTrace) {
    if !trace.is_null() {
        drop(Box::from_raw(trace));
    }
}

/// Checks that the potential never decreases along `trace` against `opt`.
/// Returns `Ok` or `VerificationFailed`; the report JSON is written to
/// `out_report` when it is not null.
///
/// # Safety
/// Both handles must be live; `out_report` must be null or writable.
#[no_mangle]
pub unsafe extern "C" fn cnn_verify(
    trace: *const CnnTrace,
    opt: *const CnnTrajectory,
    out_report: *mut *mut c_char,
) -> CnnStatus {
    guard(|| {
        let report = verify_nondecreasing(&ref_arg(trace, "trace")?.0, &ref_arg(opt, "opt")?.0)?;
        if !out_report.is_null() {
            put_string(out_report, cnn_core::monitor::serialize_report(&report))?;
        }
        if report.ok {
            Ok(CnnStatus::Ok)
        } else {
            let s = report
                .first_decrease
                .map(|d| d.s.to_string())
                .unwrap_or_default();
            Err(Fail(
                CnnStatus::VerificationFailed,
                format!("potential decreases at s = {s}"),
            ))
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn null_and_error_paths() {
        let mut inst: *mut CnnInstance = ptr::null_mut();
        unsafe {
            assert_eq!(
                cnn_instance_parse(ptr::null(), &mut inst),
                CnnStatus::NullPointer
            );
            let bad = CString::new("{\"start\": 1}").unwrap();
            assert_eq!(
                cnn_instance_parse(bad.as_ptr(), &mut inst),
                CnnStatus::ParseError
            );
            assert!(inst.is_null());
            let msg = CStr::from_ptr(cnn_last_error_message()).to_str().unwrap();
            assert!(!msg.is_empty());
            cnn_instance_free(ptr::null_mut());
        }
    }
}
