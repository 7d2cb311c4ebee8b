//! End-to-end checks of the `hypalg` binary: exit codes, error routing,
//! artifact shape.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn hypalg(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hypalg"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn write_config(dir: &Path, name: &str, body: &str) -> String {
    let path = dir.join(name);
    fs::write(&path, body).unwrap();
    path.to_str().unwrap().to_string()
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("no signal")
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

const CHEB_T: &str = r#"{
  "family": { "kind": "preset", "name": "chebyshev-t" },
  "max_level": 64,
  "truncations": [32, 64]
}"#;

const SYMMETRIC: &str = r#"{
  "family": { "kind": "symmetric", "b": ["1"] },
  "max_level": 64,
  "truncations": [8, 16]
}"#;

const ORTHONORMAL: &str = r#"{
  "family": { "kind": "orthonormal", "lambda": ["0", "1", "0.5"], "beta": ["0"] },
  "max_level": 64,
  "truncations": [32, 64]
}"#;

#[test]
fn no_arguments_is_a_usage_error() {
    let out = hypalg(&[]);
    assert_eq!(code(&out), 1);
}

#[test]
fn help_exits_zero() {
    let out = hypalg(&["--help"]);
    assert_eq!(code(&out), 0);
    assert!(String::from_utf8_lossy(&out.stdout).contains("hypalg"));
}

#[test]
fn malformed_json_reports_position_and_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "bad.json", "{ \"family\": {\n  oops\n}");
    let out = hypalg(&["build", "--config", &cfg]);
    assert_eq!(code(&out), 1);
    let err = stderr(&out);
    assert!(err.contains("line"), "stderr: {err}");
    assert!(err.contains("column"), "stderr: {err}");
}

#[test]
fn unknown_config_field_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "extra.json",
        r#"{ "family": { "kind": "preset", "name": "chebyshev-t" }, "bogus": 1 }"#,
    );
    let out = hypalg(&["build", "--config", &cfg]);
    assert_eq!(code(&out), 1);
}

#[test]
fn unknown_preset_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "preset.json",
        r#"{ "family": { "kind": "preset", "name": "legendre" } }"#,
    );
    let out = hypalg(&["build", "--config", &cfg]);
    assert_eq!(code(&out), 1);
    assert!(stderr(&out).contains("legendre"));
}

#[test]
fn max_level_below_top_truncation_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "short.json",
        r#"{
          "family": { "kind": "preset", "name": "chebyshev-t" },
          "max_level": 16,
          "truncations": [32, 64]
        }"#,
    );
    let out = hypalg(&["build", "--config", &cfg]);
    assert_eq!(code(&out), 1);
}

#[test]
fn single_truncation_cannot_separate_stable_points() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "one.json",
        r#"{
          "family": { "kind": "preset", "name": "chebyshev-t" },
          "max_level": 64,
          "truncations": [64]
        }"#,
    );
    let out = hypalg(&["spectrum", "--config", &cfg]);
    assert_eq!(code(&out), 1);
    assert!(stderr(&out).contains("two truncation"));
}

#[test]
fn build_rejects_orthonormal_systems() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "ortho.json", ORTHONORMAL);
    let out = hypalg(&["build", "--config", &cfg]);
    assert_eq!(code(&out), 1);
}

#[test]
fn spectrum_rejects_symmetric_families() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "sym.json", SYMMETRIC);
    let out = hypalg(&["spectrum", "--config", &cfg]);
    assert_eq!(code(&out), 1);
    assert!(stderr(&out).contains("level"));
}

#[test]
fn scan_rejects_symmetric_families() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "sym.json", SYMMETRIC);
    let out = hypalg(&["scan", "--config", &cfg, "--x", "1"]);
    assert_eq!(code(&out), 1);
}

#[test]
fn analyze_requires_points() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "t.json", CHEB_T);
    let out = hypalg(&["analyze", "--config", &cfg]);
    assert_eq!(code(&out), 1);
}

#[test]
fn mean_requires_exactly_one_point() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "t.json", CHEB_T);
    let out = hypalg(&["mean", "--config", &cfg, "--x", "0.5", "--x", "0.6"]);
    assert_eq!(code(&out), 1);
}

#[test]
fn bad_point_value_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "t.json", CHEB_T);
    let out = hypalg(&["analyze", "--config", &cfg, "--x", "nope"]);
    assert_eq!(code(&out), 1);
}

#[test]
fn bad_backend_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "t.json", CHEB_T);
    let out = hypalg(&["build", "--config", &cfg, "--backend", "decimal"]);
    assert_eq!(code(&out), 1);
}

#[test]
fn symmetric_levels_must_be_integers() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "sym.json", SYMMETRIC);
    let out = hypalg(&["analyze", "--config", &cfg, "--x", "1.5"]);
    assert_eq!(code(&out), 1);
    assert!(stderr(&out).contains("level"));
}

#[test]
fn mean_at_identity_is_impossible_with_exit_four() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "t.json", CHEB_T);
    let out = hypalg(&["mean", "--config", &cfg, "--x", "1"]);
    assert_eq!(code(&out), 4);
    assert!(stderr(&out).contains("square-summable"), "stderr: {}", stderr(&out));
}

#[test]
fn mean_outside_the_dual_is_impossible_with_exit_four() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "t.json", CHEB_T);
    let out = hypalg(&["mean", "--config", &cfg, "--x", "5"]);
    assert_eq!(code(&out), 4);
    assert!(stderr(&out).contains("outside the dual"), "stderr: {}", stderr(&out));
}

#[test]
fn chebyshev_spectrum_has_no_mass_points() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "t.json", CHEB_T);
    let out_dir = dir.path().join("artifacts");
    let out = hypalg(&["spectrum", "--config", &cfg, "--out", out_dir.to_str().unwrap()]);
    assert_eq!(code(&out), 0);
    let masspoints = fs::read_to_string(out_dir.join("masspoints.csv")).unwrap();
    assert_eq!(masspoints, "x,weight,stable\n");
    let spectrum = fs::read_to_string(out_dir.join("spectrum.csv")).unwrap();
    // 32 + 64 eigenvalue rows plus the header.
    assert_eq!(spectrum.lines().count(), 1 + 32 + 64);
}

#[test]
fn build_artifacts_cover_the_requested_cap() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "t.json",
        r#"{
          "family": { "kind": "preset", "name": "chebyshev-t" },
          "max_level": 64,
          "truncations": [32, 64],
          "table_cap": 4
        }"#,
    );
    let out_dir = dir.path().join("artifacts");
    let out = hypalg(&["build", "--config", &cfg, "--out", out_dir.to_str().unwrap()]);
    assert_eq!(code(&out), 0);
    let table = fs::read_to_string(out_dir.join("table.csv")).unwrap();
    let mut rows: Vec<(usize, usize)> = Vec::new();
    for line in table.lines().skip(1) {
        let mut it = line.split(',');
        let j: usize = it.next().unwrap().parse().unwrap();
        let k: usize = it.next().unwrap().parse().unwrap();
        rows.push((j, k));
    }
    for j in 0..4usize {
        for k in j..4usize {
            assert!(rows.contains(&(j, k)), "missing row ({j},{k})");
        }
    }
    assert!(rows.iter().all(|&(j, k)| j <= k && k < 4));
}

#[test]
fn explicit_family_runs_the_full_pipeline() {
    // Recurrence with a(0) = 2: not a hypergroup (negative linearization
    // coefficients), but its characters still admit one isolated
    // square-summable point at x = -5/3.
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "signed.json",
        r#"{
          "family": {
            "kind": "explicit",
            "a": ["2", "1/4"],
            "b": ["-1", "1/2"],
            "c": ["1/4"],
            "tail": { "rule": "constant" }
          },
          "max_level": 400,
          "truncations": [200, 400]
        }"#,
    );
    let out_dir = dir.path().join("artifacts");

    let build = hypalg(&[
        "build",
        "--config",
        &cfg,
        "--backend",
        "rational",
        "--out",
        out_dir.to_str().unwrap(),
    ]);
    assert_eq!(code(&build), 2, "stderr: {}", stderr(&build));
    assert!(stderr(&build).contains("negative"));

    let analyze = hypalg(&[
        "analyze",
        "--config",
        &cfg,
        "--x",
        "-5/3",
        "--out",
        out_dir.to_str().unwrap(),
    ]);
    assert_eq!(code(&analyze), 0, "stderr: {}", stderr(&analyze));
    let verdicts = fs::read_to_string(out_dir.join("verdicts.csv")).unwrap();
    let line = verdicts.lines().nth(1).unwrap();
    assert!(line.contains("UNIQUE_MEAN"), "verdicts: {verdicts}");
}

#[test]
fn backend_flag_overrides_config_arithmetic() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "t.json",
        r#"{
          "family": { "kind": "preset", "name": "chebyshev-t" },
          "max_level": 64,
          "truncations": [32, 64],
          "arithmetic": "float",
          "table_cap": 3
        }"#,
    );
    let out_dir = dir.path().join("artifacts");
    let out = hypalg(&[
        "build",
        "--config",
        &cfg,
        "--backend",
        "rational",
        "--out",
        out_dir.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0);
    let table = fs::read_to_string(out_dir.join("table.csv")).unwrap();
    assert!(table.contains("1/2"), "expected exact entries, got: {table}");
}
