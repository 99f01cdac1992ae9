use std::ffi::{CStr, CString};
use std::process::Command;
use std::ptr;

use finsler_gbc_ffi::*;

fn last_error() -> String {
    let p = fg_last_error();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

#[test]
fn builtin_scenario_round_trip() {
    let name = CString::new("cp1-fs").unwrap();
    let mut s = ptr::null_mut();
    unsafe {
        assert_eq!(fg_scenario_builtin(name.as_ptr(), &mut s), FgStatus::Ok);
        assert!(fg_last_error().is_null());
        assert_eq!(fg_scenario_override(s, 0, 11), FgStatus::Ok);
        let mut r = ptr::null_mut();
        assert_eq!(fg_run(s, FgCommand::CheckMetric, &mut r), FgStatus::Ok);
        assert!(fg_report_passed(r));
        let json = CStr::from_ptr(fg_report_json(r)).to_str().unwrap();
        let v: serde_json::Value = serde_json::from_str(json).unwrap();
        assert_eq!(v["command"], "check-metric");
        assert!(v["min_eigenvalue"]["error"].is_number());
        fg_report_free(r);
        fg_scenario_free(s);
    }
}

#[test]
fn errors_are_reported_not_thrown() {
    let mut s = ptr::null_mut();
    unsafe {
        assert_eq!(fg_scenario_builtin(ptr::null(), &mut s), FgStatus::NullPointer);
        let bad = CString::new("no-such-scenario").unwrap();
        assert_eq!(fg_scenario_builtin(bad.as_ptr(), &mut s), FgStatus::Scenario);
        assert!(last_error().contains("no-such-scenario"));
        let text = CString::new("manifold = cp1\nmetric = fubini-study\nmeshh = 3\n").unwrap();
        assert_eq!(fg_scenario_parse(text.as_ptr(), &mut s), FgStatus::Scenario);
        assert!(last_error().contains("`meshh`"));
        assert!(s.is_null());
        fg_scenario_free(ptr::null_mut());
        fg_report_free(ptr::null_mut());
        assert!(!fg_report_passed(ptr::null()));
    }
}

#[test]
fn override_is_validated() {
    let name = CString::new("cp1-fs").unwrap();
    let mut s = ptr::null_mut();
    unsafe {
        assert_eq!(fg_scenario_builtin(name.as_ptr(), &mut s), FgStatus::Ok);
        assert_eq!(fg_scenario_override(s, 1, 0), FgStatus::Scenario);
        fg_scenario_free(s);
    }
}

#[test]
fn hermitian_volume() {
    let metric = CString::new("flat-hermitian").unwrap();
    let re = [0.1, -0.2];
    let im = [0.3, 0.0];
    let (mut vol, mut err) = (0.0, 0.0);
    let st = unsafe { fg_volume(metric.as_ptr(), f64::NAN, 2, re.as_ptr(), im.as_ptr(), 8, 8, &mut vol, &mut err) };
    assert_eq!(st, FgStatus::Ok);
    let two_pi_sq = 2.0 * std::f64::consts::PI.powi(2);
    assert!((vol - two_pi_sq).abs() < 1e-10);
    assert!(err < 1e-3, "{err}");

    let quartic = CString::new("quartic-minkowski").unwrap();
    let st = unsafe { fg_volume(quartic.as_ptr(), f64::NAN, 1, re.as_ptr(), im.as_ptr(), 1, 8, &mut vol, &mut err) };
    assert_eq!(st, FgStatus::InvalidArgument, "{}", last_error());
}

#[test]
fn header_declares_the_api() {
    let dir = env!("CARGO_MANIFEST_DIR");
    let header = std::fs::read_to_string(format!("{dir}/include/finsler_gbc.h")).unwrap();
    for sym in ["fg_scenario_builtin", "fg_run", "fg_report_json", "fg_last_error", "FG_STATUS_PANIC", "typedef struct FgReport FgReport"] {
        assert!(header.contains(sym), "{sym}");
    }
    let Ok(out) = Command::new("cc").args(["-fsyntax-only", "-Wall", "-Werror", "-x", "c", &format!("{dir}/include/finsler_gbc.h")]).output() else {
        return;
    };
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
}
