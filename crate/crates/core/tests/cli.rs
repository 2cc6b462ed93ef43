//! End-to-end runs of the `anticonc` binary.

use std::process::{Command, Output};

use serde_json::Value;

fn anticonc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_anticonc")).args(args).env_remove("ANTICONC_THREADS").output().unwrap()
}

fn json(args: &[&str]) -> Value {
    let out = anticonc(args);
    assert_eq!(out.status.code(), Some(0), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).unwrap()
}

#[test]
fn spectrum_of_ball_matches_closed_form() {
    let v = json(&["spectrum", "--n", "3", "--d", "2", "--measure", "ball2"]);
    assert_eq!(v["schema"], 1);
    assert_eq!(v["seed"], 20_240_601);
    assert_eq!(v["version"], env!("CARGO_PKG_VERSION"));
    let r = &v["result"];
    assert_eq!(r["interlacing_ok"], true);
    assert_eq!(r["exact_matrix"], true);
    let mut levels: Vec<(String, u64)> = r["eta"]
        .as_array()
        .unwrap()
        .iter()
        .map(|l| (l["eta"]["exact"].as_str().unwrap().to_owned(), l["multiplicity"].as_u64().unwrap()))
        .collect();
    levels.sort();
    assert_eq!(levels, vec![("2/7".to_owned(), 1), ("5/7".to_owned(), 5)]);
    let c: Vec<f64> = r["eigenvalues_c"].as_array().unwrap().iter().map(|x| x.as_f64().unwrap()).collect();
    // Smallest eigenvalue of C for d = 2 is 4/(n+4).
    assert!((c[0] - 4.0 / 7.0).abs() < 1e-12);
}

#[test]
fn ortho_constants_of_isotropic_uniform() {
    let v = json(&["ortho", "--measure", "uniform:iso", "--maxdeg", "3"]);
    let cs = v["result"]["constants"].as_array().unwrap();
    assert_eq!(cs.len(), 4);
    assert_eq!(cs[1]["c_sq"]["exact"], "1");
    // Monic p_2 = x^2 - 1 on [-√3, √3] has squared norm E x^4 - 1 = 4/5.
    assert_eq!(cs[2]["c_sq"]["exact"], "4/5");
    for c in cs {
        assert!(c["c"].as_f64().unwrap() >= c["logconcave_floor"].as_f64().unwrap());
    }
}

#[test]
fn chf_csv_has_header_and_flags() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("chf.csv");
    let out = anticonc(&[
        "chf",
        "--poly",
        "x1",
        "--samples",
        "20000",
        "--t-min",
        "1",
        "--t-max",
        "10",
        "--per-decade",
        "2",
        "--format",
        "csv",
        "--seed",
        "5",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = std::fs::read_to_string(&path).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert!(lines[0].starts_with("# anticonc ") && lines[0].contains("seed=5"));
    assert_eq!(lines[1], "t_or_eps,value,stderr,bound_ratio");
    assert_eq!(lines.len(), 2 + 3);
    // |E e^{itX}| = e^{-t²/2} for a standard Gaussian.
    let row: Vec<f64> = lines[2].split(',').map(|x| x.parse().unwrap()).collect();
    assert_eq!(row[0], 1.0);
    assert!((row[1] - (-0.5f64).exp()).abs() < 5.0 * row[2]);
}

#[test]
fn identical_runs_are_byte_identical() {
    let args = ["var-mc", "--poly", "x1*x2 + x1^2", "--measure", "ball:4", "--samples", "50000", "--seed", "3"];
    let a = anticonc(&args);
    let b = anticonc(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let v: Value = serde_json::from_slice(&a.stdout).unwrap();
    assert_eq!(v["flags"]["command"]["var-mc"]["common"]["measure"], "ball:4");
}

#[test]
fn exit_codes() {
    let code = |args: &[&str]| anticonc(args).status.code();
    assert_eq!(code(&["var-mc", "--poly", "x1+"]), Some(2));
    assert_eq!(code(&["verify", "--profile", ""]), Some(2));
    assert_eq!(code(&["spectrum", "--n", "3"]), Some(2));
    assert_eq!(code(&["spectrum", "--n", "3", "--d", "2", "--measure", "ball:4"]), Some(2));
    assert_eq!(code(&["ortho", "--measure", "cauchy"]), Some(2));
    assert_eq!(code(&["var-mc", "--poly", "x1", "--samples", "10"]), Some(2));
    assert_eq!(code(&["--version"]), Some(0));
    // Panel budget exhausted is a numerical failure.
    let out =
        anticonc(&["vdc1d", "--poly", "x1^3", "--measure", "gaussian", "--k", "1", "--t-min", "1e9", "--t-max", "1e9"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("achieved error"));
}

#[test]
fn verify_selected_criteria() {
    let out = anticonc(&["verify", "--profile", "quick", "--criteria", "4,10"]);
    assert_eq!(out.status.code(), Some(0));
    let err = String::from_utf8_lossy(&out.stderr);
    assert_eq!(err.lines().filter(|l| l.starts_with("[PASS]")).count(), 2, "{err}");
}
