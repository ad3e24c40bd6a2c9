use serde_json::Value;
use std::fs;
use std::path::Path;
use std::process::{Command, Output};
use tempfile::TempDir;

fn osserman(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_osserman"))
        .args(args)
        .output()
        .expect("binary should run")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).trim().to_owned()
}

fn path(dir: &TempDir, name: &str) -> String {
    dir.path().join(name).to_string_lossy().into_owned()
}

fn read_json(p: &str) -> Value {
    serde_json::from_str(&fs::read_to_string(p).expect("file should exist")).expect("valid JSON")
}

fn clusters(v: &Value) -> Vec<(f64, u64)> {
    v.as_array()
        .expect("cluster list")
        .iter()
        .map(|c| (c["value"].as_f64().unwrap(), c["multiplicity"].as_u64().unwrap()))
        .collect()
}

fn close(a: &[(f64, u64)], b: &[(f64, u64)], tol: f64) -> bool {
    a.len() == b.len() && a.iter().zip(b).all(|(x, y)| x.1 == y.1 && (x.0 - y.0).abs() <= tol)
}

#[test]
fn nu_prints_adams_numbers() {
    for (n, nu) in [("8", "7"), ("1", "0"), ("256", "16"), ("12", "3")] {
        let o = osserman(&["nu", n]);
        assert!(o.status.success());
        assert_eq!(stdout(&o), nu);
    }
    assert_eq!(osserman(&["nu", "0"]).status.code(), Some(2));
    assert_eq!(osserman(&["nu", "eight"]).status.code(), Some(2));
}

#[test]
fn remark35_d_passes_with_three_clusters() {
    let dir = TempDir::new().unwrap();
    let model = path(&dir, "d.json");
    let report = path(&dir, "r.json");
    assert!(osserman(&["catalog", "remark35-d", "--dim", "8", "--out", &model]).status.success());
    let o = osserman(&["verify", "--model", &model, "--check", "complex-osserman", "--out", &report]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let r = read_json(&report);
    assert_eq!(r["verdict"], "pass");
    assert_eq!(r["multiplicity_case"], "(n-4,2,2)");
    assert!(close(&clusters(&r["spectrum"]), &[(2.0, 4), (4.0, 2), (8.0, 2)], 1e-8));
    assert_eq!(r["model_digest"].as_str().unwrap().len(), 64);
}

#[test]
fn thm36_is_not_osserman() {
    let dir = TempDir::new().unwrap();
    let model = path(&dir, "t.json");
    let report = path(&dir, "r.json");
    assert!(osserman(&["catalog", "thm36", "--dim", "8", "--out", &model]).status.success());
    let o = osserman(&["verify", "--model", &model, "--check", "osserman", "--out", &report]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("FAIL"));
    let r = read_json(&report);
    let spectra: Vec<_> = r["witnesses"]
        .as_array()
        .unwrap()
        .iter()
        .map(|w| clusters(&w["spectrum"]))
        .collect();
    assert!(spectra.iter().any(|s| close(s, &[(-6.0, 1), (0.0, 6), (6.0, 1)], 1e-8)));
    assert!(spectra.iter().any(|s| close(s, &[(-3.0, 2), (0.0, 4), (3.0, 2)], 1e-8)));

    let o = osserman(&["verify", "--model", &model, "--check", "complex-osserman", "--out", &report]);
    assert_eq!(o.status.code(), Some(0));
    assert!(close(&clusters(&read_json(&report)["spectrum"]), &[(0.0, 8)], 1e-10));
}

#[test]
fn rank5_generic_fails_complex_osserman() {
    let dir = TempDir::new().unwrap();
    let model = path(&dir, "g.json");
    let o = osserman(&[
        "build", "--dim", "32", "--rank", "5", "--coeffs", "1,1,1,1,1", "--J", "j1j2", "--seed", "4", "--out", &model,
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let o = osserman(&["verify", "--model", &model, "--check", "complex-osserman", "--samples", "16"]);
    assert_eq!(o.status.code(), Some(1));
    let r: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(r["verdict"], "fail");
    assert!(!r["witnesses"].as_array().unwrap().is_empty());
}

#[test]
fn identical_invocations_give_identical_reports() {
    let dir = TempDir::new().unwrap();
    let model = path(&dir, "q.json");
    assert!(osserman(&[
        "catalog", "quaternionic", "--dim", "12", "--coeffs", "0.5,1,-2,3", "--seed", "7", "--out", &model
    ])
    .status
    .success());
    let run = |name: &str, extra: &[&str]| {
        let out = path(&dir, name);
        let mut args = vec!["verify", "--model", &model, "--seed", "11", "--out", &out];
        args.extend_from_slice(extra);
        osserman(&args);
        fs::read(&out).unwrap()
    };
    for check in ["complex-osserman", "osserman", "p-osserman:3", "compat", "einstein", "symmetries"] {
        let a = run("a.json", &["--check", check]);
        let b = run("b.json", &["--check", check]);
        assert_eq!(a, b, "check {check} is not reproducible");
    }
    let classify = |name: &str| {
        let out = path(&dir, name);
        osserman(&["classify", "--model", &model, "--seed", "3", "--out", &out]);
        fs::read(&out).unwrap()
    };
    assert_eq!(classify("c1.json"), classify("c2.json"));
}

#[test]
fn written_models_reload() {
    let dir = TempDir::new().unwrap();
    for name in ["constant", "complex-space-form", "quaternionic", "remark35-a", "remark35-c", "thm36", "rank1-split"] {
        let model = path(&dir, &format!("{name}.json"));
        let o = osserman(&["catalog", name, "--dim", "8", "--seed", "2", "--out", &model]);
        assert!(o.status.success(), "{name}: {}", String::from_utf8_lossy(&o.stderr));
        let o = osserman(&["spectrum", "--model", &model, "--at", "basis:1", "--complex"]);
        assert!(o.status.success(), "{name}: {}", String::from_utf8_lossy(&o.stderr));
        let total: u64 = clusters(&serde_json::from_str(&stdout(&o)).unwrap()).iter().map(|c| c.1).sum();
        assert_eq!(total, 8);
    }
}

#[test]
fn classify_agrees_and_reports_case() {
    let dir = TempDir::new().unwrap();
    let model = path(&dir, "r2.json");
    assert!(osserman(&["build", "--dim", "8", "--rank", "2", "--coeffs", "1,1", "--J", "j1", "--out", &model])
        .status
        .success());
    let o = osserman(&["classify", "--model", &model]);
    assert_eq!(o.status.code(), Some(0));
    let r: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(r["agreement"], true);
    assert_eq!(r["classification"]["complex_osserman"], true);
    assert_eq!(r["verdict"], "pass");
}

#[test]
fn custom_j_from_file() {
    let dir = TempDir::new().unwrap();
    let base = path(&dir, "base.json");
    assert!(osserman(&["build", "--dim", "8", "--rank", "2", "--coeffs", "1,2", "--J", "j1j2", "--seed", "5", "--out", &base])
        .status
        .success());
    let model = path(&dir, "custom.json");
    let o = osserman(&["build", "--dim", "8", "--rank", "2", "--coeffs", "1,2", "--J", &base, "--seed", "5", "--out", &model]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(read_json(&model)["J"], read_json(&base)["J"]);
}

#[test]
fn bad_inputs_exit_with_two() {
    let dir = TempDir::new().unwrap();
    let missing = path(&dir, "missing.json");
    assert_eq!(osserman(&["verify", "--model", &missing, "--check", "osserman"]).status.code(), Some(2));

    let model = path(&dir, "m.json");
    assert!(osserman(&["catalog", "constant", "--dim", "6", "--out", &model]).status.success());
    assert_eq!(osserman(&["verify", "--model", &model, "--check", "ricci"]).status.code(), Some(2));

    let mut doc = read_json(&model);
    doc["J"][0][1] = Value::from(0.5);
    let broken = path(&dir, "broken.json");
    fs::write(&broken, doc.to_string()).unwrap();
    assert_eq!(osserman(&["verify", "--model", &broken, "--check", "osserman"]).status.code(), Some(2));

    assert_eq!(osserman(&["catalog", "quaternionic", "--dim", "6"]).status.code(), Some(2));
    assert_eq!(osserman(&["catalog", "nonesuch"]).status.code(), Some(2));
    assert_eq!(
        osserman(&["build", "--dim", "8", "--rank", "8", "--coeffs", "1,1,1,1,1,1,1,1"]).status.code(),
        Some(2)
    );
    assert!(!Path::new(&path(&dir, "never.json")).exists());
}
