mod common;

use std::path::Path;
use std::process::{Command, Output};

use common::*;
use ddg::json;
use ddg::obj::{planar_obj, Obj};
use ddg_core::hqd::qdiff_from_harmonic;
use ddg_core::{Complex64, Realization};
use serde_json::Value;

fn ddg(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ddg")).args(args).current_dir(dir).output().unwrap()
}

fn stdout_json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&out.stdout)))
}

fn f(v: &Value, key: &str) -> f64 {
    v[key].as_f64().unwrap_or_else(|| panic!("`{key}` missing in {v}"))
}

/// Working directory holding `w.obj` (Wheel6) and `q.json` (root-of-unity q).
fn wheel_dir() -> tempfile::TempDir {
    let dir = tempfile::tempdir().unwrap();
    let (m, z) = wheel6();
    std::fs::write(dir.path().join("w.obj"), planar_obj(&m, &z)).unwrap();
    let doc = json::document([("q", json::qdiff(&m, &root_of_unity_q(&m)))]);
    std::fs::write(dir.path().join("q.json"), json::to_string(&doc)).unwrap();
    dir
}

#[test]
fn hqd_check_accepts_root_of_unity_q() {
    let dir = wheel_dir();
    let out = ddg(dir.path(), &["hqd", "check", "w.obj", "q.json"]);
    assert_eq!(out.status.code(), Some(0));
    let doc = stdout_json(&out);
    assert_eq!(doc["passed"], Value::Bool(true));
    assert!(f(&doc, "max_defect") <= 1e-10);
}

#[test]
fn minimal_build_writes_family_and_verifies() {
    let dir = wheel_dir();
    let out = ddg(dir.path(), &["minimal", "build", "w.obj", "q.json", "-o", "out"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    for name in ["out_a0.obj", "out_a3.141592653589793.obj", "out_gauss.obj", "out_report.json"] {
        assert!(dir.path().join(name).exists(), "{name}");
    }
    let a0 = Obj::parse(&std::fs::read_to_string(dir.path().join("out_a0.obj")).unwrap()).unwrap();
    assert_eq!(a0.positions.len(), 6);
    assert_eq!(a0.faces, vec![vec![0, 1, 2, 3, 4, 5]]);

    let report: Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("out_report.json")).unwrap()).unwrap();
    assert_eq!(report["gauss"], "out_gauss.obj");
    let rows = report["alphas"].as_array().unwrap();
    assert_eq!(rows.len(), 5);
    for row in rows {
        if row["required_minimal"] == Value::Bool(true) {
            assert!(f(row, "max_residual") <= 1e-10);
            assert!(f(row, "k_scaling_defect") <= 1e-12);
        }
    }
    assert!(f(&rows[2], "max_residual") > 1e-3, "the conjugate surface is not minimal here");

    let verify = ddg(dir.path(), &["minimal", "verify", "out_gauss.obj", "out_a0.obj"]);
    assert_eq!(verify.status.code(), Some(0));
    let conj = ddg(dir.path(), &["minimal", "verify", "out_gauss.obj", "out_a1.5707963267948966.obj"]);
    assert_eq!(conj.status.code(), Some(2));
}

#[test]
fn minimal_build_accepts_angle_lists() {
    let dir = wheel_dir();
    let out = ddg(dir.path(), &["minimal", "build", "w.obj", "q.json", "-o", "s", "--alpha", "-pi,pi/2,3pi"]);
    assert_eq!(out.status.code(), Some(0));
    let report: Value = serde_json::from_slice(&std::fs::read(dir.path().join("s_report.json")).unwrap()).unwrap();
    let required: Vec<bool> =
        report["alphas"].as_array().unwrap().iter().map(|r| r["required_minimal"].as_bool().unwrap()).collect();
    assert_eq!(required, [true, false, true]);
}

#[test]
fn self_comparison_is_trivially_conformal() {
    let dir = wheel_dir();
    let out = ddg(dir.path(), &["check", "conformal", "w.obj", "w.obj"]);
    assert_eq!(out.status.code(), Some(0));
    let doc = stdout_json(&out);
    assert!(doc["u"].as_array().unwrap().iter().all(|u| u.as_f64() == Some(0.0)));
}

#[test]
fn harmonic_pipeline_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path();
    let (m, z) = random_disk(150, 3);
    std::fs::write(p.join("d.obj"), planar_obj(&m, &z)).unwrap();
    let boundary: serde_json::Map<String, Value> = (0..m.vertex_count())
        .filter(|&v| m.is_boundary_vertex(v))
        .map(|v| (v.to_string(), Value::from(z[v].re * z[v].im)))
        .collect();
    std::fs::write(p.join("b.json"), Value::Object(boundary).to_string()).unwrap();

    for args in [
        &["harmonic", "solve", "d.obj", "b.json", "-o", "h.json"][..],
        &["harmonic", "check", "d.obj", "h.json"],
        &["hqd", "from-harmonic", "d.obj", "h.json", "-o", "q.json"],
        &["hqd", "to-harmonic", "d.obj", "q.json", "-o", "u.json"],
        &["hqd", "from-harmonic", "d.obj", "u.json", "-o", "q2.json"],
        &["deform", "build", "d.obj", "h.json", "-o", "zdot.json"],
        &["deform", "check", "d.obj", "zdot.json"],
    ] {
        let out = ddg(p, args);
        assert_eq!(out.status.code(), Some(0), "{args:?}: {}", String::from_utf8_lossy(&out.stdout));
    }
    let read = |name: &str| -> Value { serde_json::from_slice(&std::fs::read(p.join(name)).unwrap()).unwrap() };
    let q = json::read_qdiff(&m, &read("q.json")).unwrap();
    let q2 = json::read_qdiff(&m, &read("q2.json")).unwrap();
    let scale = q.max_abs();
    for (a, b) in q.im().iter().zip(q2.im()) {
        assert!((a - b).abs() <= 1e-9 * scale);
    }

    // The file carries every bit of the library result.
    let h = json::vertex_reals(&read("h.json"), &["h"]).unwrap();
    let r = Realization::new(&m, z).unwrap();
    assert_eq!(qdiff_from_harmonic(&r, &h).unwrap().im(), q.im());
}

#[test]
fn output_flag_redirects_the_document() {
    let dir = wheel_dir();
    let out = ddg(dir.path(), &["mesh", "info", "w.obj", "-o", "info.json"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let doc: Value = serde_json::from_slice(&std::fs::read(dir.path().join("info.json")).unwrap()).unwrap();
    assert_eq!(doc["schema"], 1);
    assert_eq!(doc["interior_edges"], 6);
}

#[test]
fn input_errors_exit_one_on_stderr() {
    let dir = wheel_dir();
    for args in [
        &["hqd", "check", "w.obj", "missing.json"][..],
        &["hqd", "check", "nope.obj", "q.json"],
        &["frobnicate"],
        &["--tol", "-1", "mesh", "info", "w.obj"],
        &["minimal", "build", "w.obj", "q.json"],
    ] {
        let out = ddg(dir.path(), args);
        assert_eq!(out.status.code(), Some(1), "{args:?}");
        assert!(out.stdout.is_empty(), "{args:?}");
        assert!(!out.stderr.is_empty(), "{args:?}");
    }
    let missing = ddg(dir.path(), &["hqd", "check", "w.obj", "missing.json"]);
    let err: Value = serde_json::from_slice(&missing.stderr).unwrap();
    assert_eq!(err["error"]["code"], "Io");

    std::fs::write(dir.path().join("bent.obj"), "v 0 0 0\nv 1 0 0.5\nv 0 1 0\nf 1 2 3\n").unwrap();
    assert_eq!(ddg(dir.path(), &["mesh", "info", "bent.obj"]).status.code(), Some(1));
}

#[test]
fn verification_failures_exit_two_on_stdout() {
    let dir = wheel_dir();
    let (m, _) = wheel6();
    let mut im = root_of_unity_q(&m).im().to_vec();
    im[m.edge_id(0, 1).unwrap()] += 0.25;
    let q = ddg_core::hqd::QuadDiff::new(&m, im).unwrap();
    std::fs::write(dir.path().join("bad.json"), json::to_string(&json::document([("q", json::qdiff(&m, &q))])))
        .unwrap();

    let out = ddg(dir.path(), &["hqd", "check", "w.obj", "bad.json"]);
    assert_eq!(out.status.code(), Some(2));
    let doc = stdout_json(&out);
    assert_eq!(doc["passed"], Value::Bool(false));
    assert_eq!(doc["worst_vertex"], 0);

    let out = ddg(dir.path(), &["minimal", "build", "w.obj", "bad.json", "-o", "x"]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(stdout_json(&out)["error"]["code"], "NotHolomorphic");
    assert!(!dir.path().join("x_a0.obj").exists());

    let scaled: Vec<Complex64> = wheel6().1.iter().map(|z| z * 2.0 + Complex64::new(0.0, 0.1 * z.re * z.re)).collect();
    std::fs::write(dir.path().join("v.obj"), planar_obj(&m, &scaled)).unwrap();
    let out = ddg(dir.path(), &["check", "conformal", "w.obj", "v.obj"]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(stdout_json(&out)["passed"], Value::Bool(false));
}

#[test]
fn help_and_version_exit_zero() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(ddg(dir.path(), &["--help"]).status.code(), Some(0));
    assert_eq!(ddg(dir.path(), &["--version"]).status.code(), Some(0));
}
