//! C ABI over `finsler-gbc`.
//!
//! Handles are opaque and owned by the caller once returned; free them with the matching
//! `*_free`. Every entry point returns an [`FgStatus`]; on failure the message is available
//! from [`fg_last_error`] on the same thread until the next call. Panics never cross the
//! boundary.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use finsler_gbc::metric::builtin_metric;
use finsler_gbc::report::{self, Command, Outcome};
use finsler_gbc::scenario::{builtin_scenario, Scenario};
use finsler_gbc::volume::{volume, SphereRule};
use finsler_gbc::Error;
use num_complex::Complex64;

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FgStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    InvalidArgument = 3,
    Scenario = 4,
    Degenerate = 5,
    Numerical = 6,
    Io = 7,
    Panic = 8,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FgCommand {
    CheckMetric = 0,
    Volume = 1,
    Structure = 2,
    Degree = 3,
    Gbc = 4,
    Corollary = 5,
    Suite = 6,
}

impl From<FgCommand> for Command {
    fn from(c: FgCommand) -> Command {
        match c {
            FgCommand::CheckMetric => Command::CheckMetric,
            FgCommand::Volume => Command::Volume,
            FgCommand::Structure => Command::Structure,
            FgCommand::Degree => Command::Degree,
            FgCommand::Gbc => Command::Gbc,
            FgCommand::Corollary => Command::Corollary,
            FgCommand::Suite => Command::Suite,
        }
    }
}

/// A parsed, validated scenario.
pub struct FgScenario(Scenario);

/// The outcome of one command, with its JSON rendering.
pub struct FgReport {
    outcome: Outcome,
    json: CString,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> FgStatus {
    match e {
        Error::Stage { source, .. } => status_of(source),
        Error::Scenario(_) => FgStatus::Scenario,
        Error::Degenerate(_) | Error::Pole(_) => FgStatus::Degenerate,
        Error::InvalidArgument(_) | Error::Dimension(_) | Error::Untracked(_) | Error::Degree(_) => {
            FgStatus::InvalidArgument
        }
        Error::StepTooSmall(_) => FgStatus::Numerical,
        Error::Io(_) | Error::Json(_) => FgStatus::Io,
    }
}

fn guard(f: impl FnOnce() -> Result<(), (FgStatus, String)>) -> FgStatus {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => FgStatus::Ok,
        Ok(Err((s, msg))) => {
            set_error(msg);
            s
        }
        Err(p) => {
            let msg = p
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| p.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".into());
            set_error(format!("panic: {msg}"));
            FgStatus::Panic
        }
    }
}

fn lift(e: Error) -> (FgStatus, String) {
    (status_of(&e), e.to_string())
}

unsafe fn str_arg<'a>(p: *const c_char, what: &str) -> Result<&'a str, (FgStatus, String)> {
    if p.is_null() {
        return Err((FgStatus::NullPointer, format!("{what} is null")));
    }
    CStr::from_ptr(p).to_str().map_err(|_| (FgStatus::InvalidUtf8, format!("{what} is not UTF-8")))
}

fn null(what: &str) -> (FgStatus, String) {
    (FgStatus::NullPointer, format!("{what} is null"))
}

/// Message of the last failed call on this thread, or null. Valid until the next call.
#[no_mangle]
pub extern "C" fn fg_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn fg_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Looks up a builtin scenario by name.
///
/// # Safety
/// `name` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn fg_scenario_builtin(name: *const c_char, out: *mut *mut FgScenario) -> FgStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let s = builtin_scenario(str_arg(name, "name")?).map_err(lift)?;
        *out = Box::into_raw(Box::new(FgScenario(s)));
        Ok(())
    })
}

/// Parses scenario-file text.
///
/// # Safety
/// `text` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn fg_scenario_parse(text: *const c_char, out: *mut *mut FgScenario) -> FgStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let s = Scenario::parse(str_arg(text, "text")?).map_err(lift)?;
        *out = Box::into_raw(Box::new(FgScenario(s)));
        Ok(())
    })
}

/// Overrides the radial node count and seed; `0` leaves a value unchanged.
///
/// # Safety
/// `s` must come from `fg_scenario_builtin` or `fg_scenario_parse`.
#[no_mangle]
pub unsafe extern "C" fn fg_scenario_override(s: *mut FgScenario, mesh: usize, seed: u64) -> FgStatus {
    guard(|| {
        let s = s.as_mut().ok_or_else(|| null("scenario"))?;
        let mut next = s.0.clone();
        if mesh != 0 {
            next.mesh.radial = mesh;
        }
        if seed != 0 {
            next.seed = seed;
        }
        next.validate().map_err(lift)?;
        s.0 = next;
        Ok(())
    })
}

/// # Safety
/// `s` must be null or a live scenario handle.
#[no_mangle]
pub unsafe extern "C" fn fg_scenario_free(s: *mut FgScenario) {
    if !s.is_null() {
        drop(Box::from_raw(s));
    }
}

/// Runs one command. A report is produced whether or not the checks pass.
///
/// # Safety
/// `s` must be a live scenario handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn fg_run(s: *const FgScenario, command: FgCommand, out: *mut *mut FgReport) -> FgStatus {
    guard(|| {
        let s = s.as_ref().ok_or_else(|| null("scenario"))?;
        if out.is_null() {
            return Err(null("out"));
        }
        let outcome = report::run(command.into(), &s.0).map_err(lift)?;
        let json = serde_json::to_string(&outcome).map_err(|e| (FgStatus::Io, e.to_string()))?;
        let json = CString::new(json).map_err(|e| (FgStatus::Io, e.to_string()))?;
        *out = Box::into_raw(Box::new(FgReport { outcome, json }));
        Ok(())
    })
}

/// Whether every check in the report is within tolerance.
///
/// # Safety
/// `r` must be a live report handle.
#[no_mangle]
pub unsafe extern "C" fn fg_report_passed(r: *const FgReport) -> bool {
    r.as_ref().is_some_and(|r| r.outcome.passed())
}

/// The report as JSON, owned by the report.
///
/// # Safety
/// `r` must be a live report handle.
#[no_mangle]
pub unsafe extern "C" fn fg_report_json(r: *const FgReport) -> *const c_char {
    r.as_ref().map_or(ptr::null(), |r| r.json.as_ptr())
}

/// # Safety
/// `r` must be null or a live report handle.
#[no_mangle]
pub unsafe extern "C" fn fg_report_free(r: *mut FgReport) {
    if !r.is_null() {
        drop(Box::from_raw(r));
    }
}

/// Indicatrix volume of a builtin metric at `z` (chart 0) with a product sphere rule.
/// `lambda` is ignored when NaN. `z_re`, `z_im` have `n` entries.
///
/// # Safety
/// Pointers must be valid for the stated lengths; `vol` and `err` must be writable.
#[no_mangle]
pub unsafe extern "C" fn fg_volume(
    metric: *const c_char,
    lambda: f64,
    n: usize,
    z_re: *const f64,
    z_im: *const f64,
    polar: usize,
    azimuth: usize,
    vol: *mut f64,
    err: *mut f64,
) -> FgStatus {
    guard(|| {
        let name = str_arg(metric, "metric")?;
        if z_re.is_null() || z_im.is_null() || vol.is_null() || err.is_null() {
            return Err(null("argument"));
        }
        let lambda = if lambda.is_nan() { None } else { Some(lambda) };
        let m = builtin_metric(name, lambda, n).map_err(lift)?;
        let re = std::slice::from_raw_parts(z_re, n);
        let im = std::slice::from_raw_parts(z_im, n);
        let z: Vec<Complex64> = re.iter().zip(im).map(|(&a, &b)| Complex64::new(a, b)).collect();
        let rule = SphereRule::product(n, polar, azimuth).map_err(lift)?;
        let v = volume(m.as_ref(), 0, &z, &rule).map_err(lift)?;
        *vol = v.vol;
        *err = v.error;
        Ok(())
    })
}
