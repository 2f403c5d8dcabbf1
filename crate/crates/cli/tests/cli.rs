//! End-to-end checks of the `lt4` binary: exit codes, report round-trips,
//! and determinism of the comparison body.

use lt4_core::report::{Document, Value};
use std::process::Command;

fn lt4() -> Command {
    Command::new(env!("CARGO_BIN_EXE_lt4"))
}

/// Fast certify options for the test grid.
const FAST: &[&str] = &[
    "--e-max", "1.0", "--e-step", "0.05", "--nu-max", "4", "--nu-step", "0.5",
    "--shells", "2000", "--box", "5",
];

#[test]
fn constants_reports_and_passes() {
    let out = lt4().arg("constants").output().unwrap();
    assert!(out.status.success());
    let doc = Document::from_json(std::str::from_utf8(&out.stdout).unwrap()).unwrap();
    match doc.get("rho") {
        Some(Value::Num(rho)) => assert!((rho - 0.806133050771).abs() < 1e-10),
        other => panic!("missing rho: {other:?}"),
    }
}

#[test]
fn certify_emits_canonical_json() {
    let out = lt4().arg("certify").args(FAST).output().unwrap();
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let text = std::str::from_utf8(&out.stdout).unwrap();
    let doc = Document::from_json(text).unwrap();
    // Byte-identical round trip.
    assert_eq!(doc.to_json(), text);
    let cert = match doc.get("certificate") {
        Some(Value::Map(m)) => m,
        other => panic!("missing certificate: {other:?}"),
    };
    match cert.get("sphere_upper") {
        Some(Value::Num(v)) => assert_eq!(format!("{v:.4}"), "0.1728"),
        other => panic!("missing sphere_upper: {other:?}"),
    }
    match cert.get("torus_upper") {
        Some(Value::Num(v)) => assert_eq!(format!("{v:.4}"), "0.1222"),
        other => panic!("missing torus_upper: {other:?}"),
    }
    assert!(doc.get("provenance").is_some());
}

#[test]
fn certify_body_is_deterministic() {
    let a = lt4().arg("certify").args(FAST).output().unwrap();
    let b = lt4().arg("certify").args(FAST).output().unwrap();
    let body = |bytes: &[u8]| {
        let doc = Document::from_json(std::str::from_utf8(bytes).unwrap()).unwrap();
        match doc.get("certificate") {
            Some(Value::Map(m)) => {
                let mut wrapper = Document::new();
                wrapper.set("certificate", Value::Map(m.clone()));
                wrapper.to_json()
            }
            _ => panic!("missing certificate"),
        }
    };
    assert_eq!(body(&a.stdout), body(&b.stdout));
}

#[test]
fn family_check_box_example() {
    let out = lt4()
        .args(["family-check", "--manifold", "torus", "--box", "3"])
        .output()
        .unwrap();
    assert!(out.status.success());
    let doc = Document::from_json(std::str::from_utf8(&out.stdout).unwrap()).unwrap();
    match doc.get("ratios") {
        Some(Value::List(rows)) => {
            assert_eq!(rows.len(), 1);
            match &rows[0] {
                Value::Map(m) => {
                    match m.get("ratio") {
                        Some(Value::Num(r)) => assert!(*r < 0.122182),
                        other => panic!("missing ratio: {other:?}"),
                    }
                    assert_eq!(m.get("verdict"), Some(&Value::Bool(true)));
                }
                other => panic!("expected map row: {other:?}"),
            }
        }
        other => panic!("missing ratios: {other:?}"),
    }
}

#[test]
fn family_file_and_csv_output() {
    let dir = std::env::temp_dir().join(format!("lt4-cli-test-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let family_path = dir.join("family.txt");
    std::fs::write(
        &family_path,
        "frequencies\n1 0 0 0\n0 1 0 0\ncoefficients\n1 0 0 0\n0 0 1 0\n",
    )
    .unwrap();
    let out_path = dir.join("report.csv");
    let out = lt4()
        .args(["family-check", "--family"])
        .arg(&family_path)
        .args(["--format", "csv", "--out"])
        .arg(&out_path)
        .output()
        .unwrap();
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    assert!(out.stdout.is_empty());
    let csv = std::fs::read_to_string(&out_path).unwrap();
    assert!(csv.starts_with("key,value\n"));
    assert!(csv.contains("ratios.0.verdict,true"));
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn malformed_family_is_usage_error() {
    let dir = std::env::temp_dir().join(format!("lt4-cli-bad-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let family_path = dir.join("bad.txt");
    std::fs::write(&family_path, "frequencies\n1 0 0\n").unwrap();
    let out = lt4()
        .args(["family-check", "--family"])
        .arg(&family_path)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn unknown_command_is_usage_error() {
    let out = lt4().arg("no-such-command").output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    let out = lt4().args(["certify", "--no-such-flag"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}
