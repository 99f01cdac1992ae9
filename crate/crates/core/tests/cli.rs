use std::f64::consts::PI;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str], out: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_finsler-gbc"))
        .args(args)
        .arg("--out")
        .arg(out)
        .output()
        .unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn report(dir: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(dir.join("report.json")).unwrap()).unwrap()
}

fn every_value_has_an_error(v: &Value) -> bool {
    match v {
        Value::Object(m) => {
            (!m.contains_key("value") || m.get("error").is_some_and(Value::is_number))
                && m.values().all(every_value_has_an_error)
        }
        Value::Array(a) => a.iter().all(every_value_has_an_error),
        _ => true,
    }
}

#[test]
fn plane_volume_sweep() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("plane.txt");
    std::fs::write(&file, "name = plane\nmanifold = c2\nmetric = flat-hermitian\nfield = euler\nvolume_rule = 16x16\n").unwrap();
    let out = dir.path().join("out");
    let o = run(&["volume", "--scenario", file.to_str().unwrap()], &out);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let csv = std::fs::read_to_string(out.join("volume.csv")).unwrap();
    let mut rows = 0;
    for line in csv.lines().skip(1) {
        let vol: f64 = line.split(',').nth(3).unwrap().parse().unwrap();
        assert!((vol / (2.0 * PI * PI) - 1.0).abs() < 1e-6, "{line}");
        rows += 1;
    }
    assert!(rows > 0);
    assert!(every_value_has_an_error(&report(&out)));
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["degree", "--scenario", "cp1-fs"], dir.path());
    assert_eq!(code(&o), 0);

    let o = run(&["degree", "--scenario", "no-such-scenario"], dir.path());
    assert_eq!(code(&o), 1);

    let strict = dir.path().join("strict.txt");
    let text = Command::new(env!("CARGO_BIN_EXE_finsler-gbc")).args(["scenarios", "cp1-fs"]).output().unwrap();
    let text = String::from_utf8(text.stdout).unwrap().replace("tolerance = 0.005", "tolerance = 0");
    std::fs::write(&strict, text).unwrap();
    let o = run(&["degree", "--scenario", strict.to_str().unwrap()], &dir.path().join("strict"));
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stdout).starts_with("FAIL"));

    let bad = dir.path().join("bad.txt");
    std::fs::write(&bad, "manifold = cp1\ncolour = blue\n").unwrap();
    let o = run(&["degree", "--scenario", bad.to_str().unwrap()], dir.path());
    assert_eq!(code(&o), 1);
    assert!(String::from_utf8_lossy(&o.stderr).contains("colour"));
}

#[test]
fn quartic_torus_gbc_vanishes() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["gbc", "--scenario", "quartic-torus", "--mesh", "4"], dir.path());
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stdout));
    let r = report(dir.path());
    assert_eq!(r["target"]["value"].as_f64(), Some(0.0));
    assert!(r["lhs"]["value"].as_f64().unwrap().abs() < 1e-3);
    assert!(every_value_has_an_error(&r));
}

#[test]
fn outputs_are_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    for out in [&a, &b] {
        assert_eq!(code(&run(&["suite", "--scenario", "cp1-fs", "--mesh", "12"], out)), 0);
    }
    let mut names: Vec<_> = std::fs::read_dir(&a).unwrap().map(|e| e.unwrap().file_name()).collect();
    names.sort();
    assert!(names.len() > 3);
    for n in names.iter().filter(|n| *n != "runtime.txt") {
        assert_eq!(std::fs::read(a.join(n)).unwrap(), std::fs::read(b.join(n)).unwrap(), "{n:?}");
    }
    assert!(every_value_has_an_error(&report(&a)));
}
