use std::f64::consts::PI;
use std::path::{Path, PathBuf};
use std::process::Command;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::Value;
use weyl_core::io::TripleFile;
use weyl_core::synth::random_triple;
use weyl_models::hainlust::HlModel;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_weyl-scope"))
}

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p
}

/// Runs a command and returns the exit code and the written output.
fn run(dir: &Path, args: &[&str], config: Option<&str>) -> (i32, String) {
    let out = dir.join("out.txt");
    let _ = std::fs::remove_file(&out);
    let mut cmd = bin();
    cmd.args(args).arg("--out").arg(&out);
    if let Some(c) = config {
        cmd.arg("--config").arg(write(dir, "config.json", c));
    }
    let status = cmd.output().unwrap().status;
    (status.code().unwrap(), std::fs::read_to_string(&out).unwrap_or_default())
}

fn json(s: &str) -> Value {
    serde_json::from_str(s).unwrap()
}

fn check_value<'a>(report: &'a Value, name: &str) -> &'a Value {
    report["checks"].as_array().unwrap().iter().find(|c| c["name"] == name).unwrap()
}

fn triple_json() -> String {
    let tr = random_triple(&mut ChaCha8Rng::seed_from_u64(5), 6, 2, 2).unwrap().with_id("six");
    serde_json::to_string(&TripleFile::from_triple(&tr, true)).unwrap()
}

#[test]
fn default_check_passes_with_small_residuals() {
    let dir = tempfile::tempdir().unwrap();
    let (code, out) = run(dir.path(), &["check"], None);
    assert_eq!(code, 0);
    let r = json(&out);
    assert_eq!(r["passed"], true);
    assert_eq!(r["seed"], 1729);
    for c in r["checks"].as_array().unwrap() {
        assert!(!c["anchor"].as_str().unwrap().is_empty());
        if c["name"] == "morera_full" {
            assert_eq!(c["status"], "expected-nonzero");
            assert!(c["residual"].as_f64().unwrap() > 0.1);
        } else {
            assert_eq!(c["status"], "pass", "{c}");
            assert!(c["residual"].as_f64().unwrap() < 1e-9, "{c}");
        }
    }
}

#[test]
fn check_on_a_triple_file() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "t.json", &triple_json());
    let (code, out) = run(dir.path(), &["check"], Some(r#"{"model": "t.json"}"#));
    assert_eq!(code, 0);
    let r = json(&out);
    assert_eq!(r["details"]["triples"][0]["id"], "six");
    assert_eq!(r["details"]["space_triple"], "six");
}

#[test]
fn corrupted_triple_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let good = triple_json();
    write(dir.path(), "t.json", &good[..good.len() / 2]);
    assert_eq!(run(dir.path(), &["check"], Some(r#"{"model": "t.json"}"#)).0, 2);

    // A stored adjoint action that disagrees with the one the boundary maps
    // imply.
    let mut v: Value = serde_json::from_str(&good).unwrap();
    let entry = &mut v["ttilde"][0][0][0];
    *entry = Value::from(entry.as_f64().unwrap() + 1.0);
    write(dir.path(), "t.json", &v.to_string());
    assert_eq!(run(dir.path(), &["check"], Some(r#"{"model": "t.json"}"#)).0, 2);
}

#[test]
fn config_errors_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    assert_eq!(run(d, &["check"], Some("{not json")).0, 2);
    assert_eq!(run(d, &["check"], Some(r#"{"model": "missing.json"}"#)).0, 2);
    assert_eq!(run(d, &["check"], Some(r#"{"tolerances": {"green": -1.0}}"#)).0, 2);
    assert_eq!(run(d, &["check"], Some(r#"{"tolerances": {"greenn": 1e-3}}"#)).0, 2);
    assert_eq!(run(d, &["check"], Some(r#"{"colour": 1}"#)).0, 2);
    assert_eq!(run(d, &["check", "--tol", "0"], None).0, 2);
    assert_eq!(run(d, &["scan"], Some(r#"{"model_type": "sturm"}"#)).0, 2);
    assert_eq!(run(d, &["scan"], Some("{}")).0, 2);
    assert_eq!(run(d, &["example"], Some(r#"{"example": "ex4"}"#)).0, 2);
    assert_eq!(run(d, &["scan"], Some(r#"{"model_type": "friedrichs", "grid": {"re_min": 0, "re_max": 1, "re_count": 3, "im": [0.0]}}"#)).0, 2);
    let missing = bin().args(["check", "--config", "/nonexistent/c.json"]).output().unwrap();
    assert_eq!(missing.status.code(), Some(2));
    assert_eq!(bin().arg("frobnicate").output().unwrap().status.code(), Some(2));
}

#[test]
fn tight_tolerance_fails_the_check() {
    let dir = tempfile::tempdir().unwrap();
    let (code, out) = run(dir.path(), &["check", "--tol", "1e-30"], None);
    assert_eq!(code, 1);
    let r = json(&out);
    assert_eq!(r["passed"], false);
    assert_eq!(check_value(&r, "green")["status"], "fail");
    // --tol leaves the lower bound of the nonzero check alone.
    assert_eq!(check_value(&r, "morera_full")["tolerance"], 0.1);
}

#[test]
fn per_check_override_beats_global_tolerance() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = r#"{"tolerances": {"krein": 0.5}}"#;
    let (_, out) = run(dir.path(), &["check", "--tol", "1e-3"], Some(cfg));
    let r = json(&out);
    assert_eq!(check_value(&r, "krein")["tolerance"], 0.5);
    assert_eq!(check_value(&r, "green")["tolerance"], 1e-3);
}

#[test]
fn seed_changes_the_draws() {
    let dir = tempfile::tempdir().unwrap();
    let (_, a) = run(dir.path(), &["check"], None);
    let (_, b) = run(dir.path(), &["check", "--seed", "7"], None);
    assert_eq!(json(&b)["seed"], 7);
    assert_ne!(check_value(&json(&a), "green")["residual"], check_value(&json(&b), "green")["residual"]);
}

fn csv_rows(text: &str) -> (Vec<String>, Vec<Vec<f64>>) {
    let mut lines = text.lines();
    let header = lines.next().unwrap().split(',').map(String::from).collect();
    let rows = lines.map(|l| l.split(',').map(|x| x.parse().unwrap()).collect()).collect();
    (header, rows)
}

#[test]
fn hainlust_scan_shape() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = r#"{"model_type": "hainlust", "nodes": 32,
                  "grid": {"re_min": 0.5, "re_max": 4.5, "re_count": 5, "im": [1.0, 1e-3]}}"#;
    let (code, out) = run(dir.path(), &["scan"], Some(cfg));
    assert_eq!(code, 0);
    let (header, rows) = csv_rows(&out);
    assert_eq!(header.len(), 13);
    assert_eq!(header[..2], ["re_lambda", "im_lambda"]);
    assert_eq!(rows.len(), 10);
    assert_eq!(rows[0][..2], [0.5, 1.0]);
    assert_eq!(rows[9][..2], [4.5, 1e-3]);
}

#[test]
fn friedrichs_hardy_scan_is_constant_per_half_plane() {
    let dir = tempfile::tempdir().unwrap();
    let (code, out) = run(dir.path(), &["scan"], Some(r#"{"model_type": "friedrichs"}"#));
    assert_eq!(code, 0);
    let (header, rows) = csv_rows(&out);
    assert_eq!(header, ["re_lambda", "im_lambda", "re_M", "im_M", "abs_D", "bracket_abs"]);
    assert_eq!(rows.len(), 81 * 6);
    for r in &rows {
        // (sign(Im λ)πi)^{-1} with B = 0.
        let expected_im = -r[1].signum() / PI;
        assert!(r[2].abs() < 1e-12 && (r[3] - expected_im).abs() < 1e-12, "{r:?}");
    }
}

#[test]
fn firstorder_scan_default() {
    let dir = tempfile::tempdir().unwrap();
    let (code, out) = run(dir.path(), &["scan"], Some(r#"{"model_type": "firstorder"}"#));
    assert_eq!(code, 0);
    let (_, rows) = csv_rows(&out);
    assert_eq!(rows.len(), 12);
    assert!(rows.iter().all(|r| r[3] == 0.0 && r[4] == 0.0));
    // ‖(A_B − λ)^{-1}‖ = 1/|Im λ| for the half-line derivative.
    for r in &rows {
        assert!((r[2] * -r[1] - 1.0).abs() < 1e-2, "{r:?}");
    }
}

#[test]
fn reruns_are_byte_identical_across_thread_counts() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "c.json", r#"{"model_type": "friedrichs"}"#);
    let outputs: Vec<Vec<u8>> = ["1", "3"]
        .iter()
        .map(|t| bin().env("WEYL_SCOPE_THREADS", t).arg("scan").arg("--config").arg(&cfg).output().unwrap().stdout)
        .collect();
    assert!(!outputs[0].is_empty());
    assert_eq!(outputs[0], outputs[1]);
    let bad = bin().env("WEYL_SCOPE_THREADS", "many").arg("scan").arg("--config").arg(&cfg).output().unwrap();
    assert_eq!(bad.status.code(), Some(2));

    let (_, a) = run(dir.path(), &["check"], None);
    let (_, b) = run(dir.path(), &["check"], None);
    assert_eq!(a, b);
}

#[test]
fn example_ex1_flags_filled_half_plane() {
    let dir = tempfile::tempdir().unwrap();
    let (code, out) = run(dir.path(), &["example"], Some(r#"{"example": "ex1", "params": {"B": [0.0, 3.141592653589793]}}"#));
    assert_eq!(code, 0);
    let r = json(&out);
    assert_eq!(r["details"]["regime"], "upper half plane filled with eigenvalues");
    let (_, plain) = run(dir.path(), &["example"], Some(r#"{"example": "ex1"}"#));
    let plain = json(&plain);
    assert!(plain["details"]["regime"].is_null());
    assert_eq!(plain["details"]["samples"].as_array().unwrap().len(), 100);
}

#[test]
fn example_ex2_lower_defaults() {
    let dir = tempfile::tempdir().unwrap();
    let (code, out) = run(dir.path(), &["example"], Some(r#"{"example": "ex2-lower"}"#));
    assert_eq!(code, 0);
    let r = json(&out);
    assert!(check_value(&r, "eigen_residual")["residual"].as_f64().unwrap() < 1e-7);
    assert!(check_value(&r, "gamma1_abs")["residual"].as_f64().unwrap() < 1e-9);
    assert!(check_value(&r, "m_pole_residual")["residual"].as_f64().unwrap() < 1e-10);
}

#[test]
fn example_ex2_upper_detects_obstruction_and_checks_half_plane() {
    let dir = tempfile::tempdir().unwrap();
    let (code, out) = run(dir.path(), &["example"], Some(r#"{"example": "ex2-upper"}"#));
    assert_eq!(code, 0);
    let r = json(&out);
    assert_eq!(check_value(&r, "obstruction")["status"], "pass");
    let wrong = r#"{"example": "ex2-upper", "params": {"lambda0": [0.0, -1.0]}}"#;
    assert_eq!(run(dir.path(), &["example"], Some(wrong)).0, 2);
}

#[test]
fn example_ex3_defaults_and_failed_construction() {
    let dir = tempfile::tempdir().unwrap();
    let (code, out) = run(dir.path(), &["example"], Some(r#"{"example": "ex3"}"#));
    assert_eq!(code, 0);
    let r = json(&out);
    let s = r["details"]["s"].as_f64().unwrap();
    assert!((s * s - 2.0 / PI).abs() < 1e-14);
    assert!(check_value(&r, "eigen_residual")["residual"].as_f64().unwrap() < 1e-7);
    assert!(check_value(&r, "m_jump")["residual"].as_f64().unwrap() < 1e-9);
    let degenerate = r#"{"example": "ex3", "params": {"lambda0": 0.0}}"#;
    assert_eq!(run(dir.path(), &["example"], Some(degenerate)).0, 1);
}

#[test]
fn contour_default_sees_hidden_eigenvalue_only_in_full_resolvent() {
    let dir = tempfile::tempdir().unwrap();
    let (code, out) = run(dir.path(), &["contour"], None);
    assert_eq!(code, 0);
    let r = json(&out);
    assert_eq!(r["triple_id"], "hidden-block-8+1");
    assert!(r["residual_bordered"].as_f64().unwrap() < 1e-8);
    assert!(r["residual_full"].as_f64().unwrap() > 0.1);
    assert_eq!(r["dims"]["S"], 8);

    write(dir.path(), "t.json", &triple_json());
    assert_eq!(run(dir.path(), &["contour"], Some(r#"{"model": "t.json"}"#)).0, 2);
    let with_contour = r#"{"model": "t.json", "contour": {"center": [40.0, 0.0], "radius": 1.0, "nodes": 64}}"#;
    let (code, out) = run(dir.path(), &["contour"], Some(with_contour));
    assert_eq!(code, 0);
    assert!(json(&out)["residual_full"].as_f64().unwrap() < 1e-10);
}

#[test]
fn eig_on_decoupled_neumann_model() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "hl.json", &serde_json::to_string(&HlModel::decoupled_neumann(5.0)).unwrap());
    let cfg = r#"{"model_type": "hainlust", "model": "hl.json",
                  "region": {"re_min": 0.5, "re_max": 50.0, "im_min": -1.0, "im_max": 1.0}}"#;
    let (code, out) = run(dir.path(), &["eig"], Some(cfg));
    assert_eq!(code, 0);
    let r = json(&out);
    let eig = r["details"]["eigenvalues"].as_array().unwrap();
    assert_eq!(eig.len(), 2);
    for (k, z) in eig.iter().enumerate() {
        let exact = ((k + 1) as f64 * PI).powi(2);
        assert!((z[0].as_f64().unwrap() - exact).abs() < 1e-8 && z[1].as_f64().unwrap().abs() < 1e-8);
    }

    let (code, out) = run(dir.path(), &["eig"], None);
    assert_eq!(code, 0);
    let eig = json(&out)["details"]["eigenvalues"].as_array().unwrap().len();
    assert_eq!(eig, 9);
}
