use std::f64::consts::PI;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn matsaev(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_matsaev"))
        .args(args)
        .env_remove("MATSAEV_OUT")
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn record(out: &Output) -> Value {
    assert_eq!(code(out), 0, "stderr: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("run record on stdout")
}

fn text(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn write(dir: &Path, name: &str, content: &str) -> String {
    let path = dir.join(name);
    std::fs::write(&path, content).unwrap();
    path.to_str().unwrap().to_string()
}

#[test]
fn norm_of_one_plus_shift_at_two() {
    let rec = record(&matsaev(&["norm", "--poly", "1,1", "--p", "2", "--n", "32"]));
    assert_eq!(rec["command"], "norm");
    let value = rec["results"]["value"].as_f64().unwrap();
    assert!((value - 2.0 * (PI / 65.0).cos()).abs() < 1e-9, "{value}");
    assert_eq!(rec["results"]["abs_sum"].as_f64().unwrap(), 2.0);
}

#[test]
fn constant_polynomial_has_norm_one() {
    let rec = record(&matsaev(&["norm", "--poly", "1", "--p", "3"]));
    assert!((rec["results"]["value"].as_f64().unwrap() - 1.0).abs() < 1e-12);
    assert_eq!(rec["config"]["n"], serde_json::json!([8, 16, 32, 64]));
}

#[test]
fn norm_csv_has_a_row_per_size() {
    let out = matsaev(&["--format", "csv", "norm", "--poly", "1,-1", "--p", "4", "--n", "4,8"]);
    assert_eq!(code(&out), 0);
    assert_eq!(text(&out).lines().count(), 3);
}

#[test]
fn cbnorm_defaults_to_block_four() {
    let rec = record(&matsaev(&["cbnorm", "--poly", "1,1", "--p", "3", "--n", "8"]));
    assert_eq!(rec["config"]["block"], 4);
    assert!(rec["results"]["value"].as_f64().unwrap() <= 2.0 + 1e-9);
}

#[test]
fn dilate_schur_all_ones() {
    let dir = tempfile::tempdir().unwrap();
    let input = write(dir.path(), "ones.json", "[[1,1,1],[1,1,1],[1,1,1]]");
    let rec = record(&matsaev(&["dilate", "schur", "--input", &input]));
    assert_eq!(rec["results"]["passed"], true);
    assert!(rec["results"]["max_residual"].as_f64().unwrap() < 1e-8);
}

#[test]
fn dilate_schur_random_correlation() {
    // Gram matrix of unit vectors: unital and positive.
    let v = [[0.6, 0.8, 0.0], [0.0, 0.6, 0.8], [0.48, 0.6, 0.64]];
    let g: Vec<Vec<f64>> = v
        .iter()
        .map(|a| v.iter().map(|b| a.iter().zip(b).map(|(x, y)| x * y).sum()).collect())
        .collect();
    let dir = tempfile::tempdir().unwrap();
    let input = write(dir.path(), "a.json", &serde_json::to_string(&serde_json::json!({ "a": g })).unwrap());
    let out = matsaev(&["--format", "csv", "dilate", "schur", "--input", &input, "--window", "3"]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(text(&out).lines().count(), 5);
}

#[test]
fn dilate_fourier_on_z3() {
    let dir = tempfile::tempdir().unwrap();
    let input = write(
        dir.path(),
        "t.json",
        r#"{"group": {"kind": "cyclic", "n": 3}, "t": [1, -0.3, -0.3]}"#,
    );
    let rec = record(&matsaev(&["dilate", "fourier", "--input", &input, "--window", "2"]));
    assert_eq!(rec["results"]["passed"], true);
}

#[test]
fn dilate_rejects_non_positive_input() {
    let dir = tempfile::tempdir().unwrap();
    let input = write(dir.path(), "bad.json", "[[1,2],[2,1]]");
    let out = matsaev(&["dilate", "schur", "--input", &input]);
    assert_eq!(code(&out), 3);
    assert!(out.stdout.is_empty());
}

#[test]
fn dilate_rejects_mismatched_kind() {
    let dir = tempfile::tempdir().unwrap();
    let input = write(dir.path(), "ones.json", "[[1,1],[1,1]]");
    assert_eq!(code(&matsaev(&["dilate", "fourier", "--input", &input])), 2);
    assert_eq!(code(&matsaev(&["dilate", "unitary", "--input", &input])), 2);
}

#[test]
fn wick_two_vectors() {
    let rec = record(&matsaev(&["wick", "--vectors", "1,2;3,-1"]));
    assert!((rec["results"]["wick"].as_f64().unwrap() - 1.0).abs() < 1e-14);
    assert!(rec["results"]["residual"].as_f64().unwrap() < 1e-12);
    let out = matsaev(&["--format", "text", "wick", "--vectors", "1,0;0,1;1,0;0,1"]);
    assert!(text(&out).starts_with("τ(ω(f_1)..ω(f_4)) = -1"));
}

#[test]
fn qgram_is_positive() {
    let rec = record(&matsaev(&["qgram", "--q", "-0.5", "--family", "[[[1,0],[0,1]],[[0,1],[1,0]]]"]));
    assert_eq!(rec["results"]["psd"], true);
    assert!((rec["results"]["min_eigenvalue"].as_f64().unwrap() - 0.5).abs() < 1e-12);
}

#[test]
fn schoenberg_distance_matrix() {
    let out = matsaev(&["--format", "text", "schoenberg", "--alphas", "[[0,0],[1,0],[0,2],[3,1]]"]);
    assert_eq!(code(&out), 0);
    assert!(text(&out).contains("CND: true"));
    let out = matsaev(&["--format", "text", "schoenberg", "--matrix", "[[0,1,5],[1,0,1],[5,1,0]]"]);
    assert!(text(&out).contains("CND: false"));
}

#[test]
fn semigroup_and_discretize() {
    let rec = record(&matsaev(&["semigroup", "--alphas", "[[0],[1],[2]]", "--samples", "10000", "--seed", "3"]));
    let g = &rec["results"]["gaussian"];
    assert!(g["residual"].as_f64().unwrap() <= g["three_sigma"].as_f64().unwrap());
    let rec = record(&matsaev(&["discretize", "--kernel", r#"{"kind":"indicator","start":0,"end":1}"#]));
    let a: Vec<f64> = serde_json::from_value(rec["results"]["coefficients"].clone()).unwrap();
    assert!((a[0] - 0.5).abs() < 1e-14 && (a[1] - 0.5).abs() < 1e-14);
}

#[test]
fn search_refuses_p_two() {
    let out = matsaev(&["search", "--p", "2"]);
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("p = 2"));
}

#[test]
fn same_seed_same_record() {
    let args = ["--seed", "11", "norm", "--poly", "1,0.5,-0.25", "--p", "3", "--n", "8,16"];
    let mut a = record(&matsaev(&args));
    let mut b = record(&matsaev(&args));
    a.as_object_mut().unwrap().remove("timestamp");
    b.as_object_mut().unwrap().remove("timestamp");
    assert_eq!(a, b);
    assert_eq!(a["config"]["seed"], 11);
}

#[test]
fn config_file_precedence() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "cfg.json",
        r#"{"seed": 5, "p": 4, "norm": {"n": [8], "poly": "1,1"}}"#,
    );
    let rec = record(&matsaev(&["--config", &cfg, "norm", "--p", "3"]));
    assert_eq!(rec["config"]["seed"], 5);
    assert_eq!(rec["config"]["n"], serde_json::json!([8]));
    assert_eq!(rec["config"]["p"].as_f64(), Some(3.0));

    let bad = write(dir.path(), "bad.json", r#"{"norm": {"nope": 1}}"#);
    assert_eq!(code(&matsaev(&["--config", &bad, "norm", "--poly", "1"])), 2);
}

#[test]
fn out_directory_and_replay() {
    let dir = tempfile::tempdir().unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_matsaev"))
        .args(["norm", "--poly", "1,1", "--p", "3", "--n", "8"])
        .env("MATSAEV_OUT", dir.path())
        .output()
        .unwrap();
    assert_eq!(code(&out), 0);
    let json = dir.path().join("norm.json");
    assert!(json.exists() && dir.path().join("norm.csv").exists());

    let rec = record(&matsaev(&["report", "--replay", json.to_str().unwrap()]));
    assert_eq!(rec["results"]["records"][0]["reproduced"], true);

    let mut tampered: Value = serde_json::from_str(&std::fs::read_to_string(&json).unwrap()).unwrap();
    tampered["results"]["value"] = Value::from(1.5);
    let path = write(dir.path(), "tampered.json", &tampered.to_string());
    assert_eq!(code(&matsaev(&["report", "--replay", &path])), 5);
}

#[test]
fn usage_and_resource_exit_codes() {
    assert_eq!(code(&matsaev(&["norm", "--poly", "1,x"])), 2);
    assert_eq!(code(&matsaev(&["norm", "--poly", "1", "--p", "0.5"])), 2);
    assert_eq!(code(&matsaev(&["frobnicate"])), 2);
    assert_eq!(code(&matsaev(&["wick", "--vectors", "1,0,0,0,0,0,0,0,0,0,0,0,0,0,0,0,0,0,0,0"])), 4);
}
