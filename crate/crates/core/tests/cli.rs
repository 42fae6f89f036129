use std::path::Path;
use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_nonlocal-supersol")).args(args).output().unwrap()
}

fn json(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&out.stdout)))
}

#[test]
fn classify_prints_verdict() {
    let out = run(&["classify", "--N", "4", "--m", "2", "--alpha", "1", "--p", "2", "--q", "1", "--domain", "rn"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["status"], "Existence");
    assert!(v["tags"].as_array().unwrap().iter().any(|t| t == "Thm2.4"));
}

#[test]
fn classify_borderline_is_exact() {
    let out =
        run(&["classify", "--N", "4", "--m", "2", "--alpha", "1", "--p", "1/2", "--q", "3", "--domain", "exterior"]);
    assert_eq!(json(&out)["status"], "Nonexistence");
    let out = run(&["classify", "--N", "4", "--m", "2", "--alpha", "1", "--p", "0.5000001", "--q", "3"]);
    assert_eq!(json(&out)["status"], "Existence");
}

#[test]
fn classify_system() {
    let out = run(&[
        "classify", "--system", "--N", "5", "--m", "2", "--alpha", "1", "--p", "1.5", "--q", "1.5", "--r", "1.5",
        "--s", "1.5", "--shape", "1", "--domain", "rn",
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["status"], "Existence");
}

#[test]
fn classify_rejects_bad_input() {
    assert_eq!(run(&["classify", "--N", "4", "--m", "2", "--alpha", "1", "--q", "1"]).status.code(), Some(2));
    let bad_domain =
        run(&["classify", "--N", "4", "--m", "2", "--alpha", "1", "--p", "1", "--q", "1", "--domain", "ball"]);
    assert_eq!(bad_domain.status.code(), Some(2));
    let bad_flag = run(&[
        "classify",
        "--N",
        "4",
        "--m",
        "2",
        "--alpha",
        "1",
        "--p",
        "1",
        "--q",
        "1",
        "--operator-class",
        "hm+bogus",
    ]);
    assert_eq!(bad_flag.status.code(), Some(2));
    let bad_number = run(&["classify", "--N", "4", "--m", "two", "--alpha", "1", "--p", "1", "--q", "1"]);
    assert_eq!(bad_number.status.code(), Some(2));
}

fn region(prefix: &Path, range: &str) -> Output {
    run(&[
        "region",
        "--N",
        "4",
        "--m",
        "2",
        "--alpha",
        "1",
        "--p-range",
        range,
        "--q-range",
        "-1:5",
        "--res",
        "20",
        "--out",
        prefix.to_str().unwrap(),
    ])
}

#[test]
fn region_writes_csv_svg_and_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let prefix = dir.path().join("fig");
    assert_eq!(region(&prefix, "0:5").status.code(), Some(0));
    let csv = std::fs::read_to_string(dir.path().join("fig.csv")).unwrap();
    assert!(csv.starts_with("p,q,status,tags\n"));
    assert_eq!(csv.lines().count(), 401);
    let svg = std::fs::read_to_string(dir.path().join("fig.svg")).unwrap();
    assert!(svg.starts_with("<svg") || svg.starts_with("<?xml"));
    let manifest: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("fig.manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["subcommand"], "region");
    assert_eq!(manifest["config_hash"].as_str().unwrap().len(), 64);

    let again = dir.path().join("again");
    assert_eq!(region(&again, "0:5").status.code(), Some(0));
    assert_eq!(csv, std::fs::read_to_string(dir.path().join("again.csv")).unwrap());
}

#[test]
fn region_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(region(&dir.path().join("x"), "5:0").status.code(), Some(2));
    assert_eq!(region(&dir.path().join("missing").join("x"), "0:5").status.code(), Some(3));
}

#[test]
fn riesz_eval_values() {
    let out = run(&["riesz-eval", "--N", "3", "--alpha", "2", "--f", "indicator(0,1)", "--p", "1", "--r", "0"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert!((v["value"].as_f64().unwrap() - 0.5).abs() < 1e-6);
    assert_eq!(v["status"], "Finite");

    let out = run(&["riesz-eval", "--N", "4", "--alpha", "2", "--f", "(1+r)^-2", "--p", "1", "--r", "1"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["status"], "Divergent");
    assert_eq!(v["value"], "+inf");

    let out = run(&["riesz-eval", "--N", "4", "--alpha", "2", "--f", "0", "--p", "1", "--r", "1"]);
    assert_eq!(json(&out)["value"].as_f64(), Some(0.0));

    let out = run(&["riesz-eval", "--N", "4", "--alpha", "2", "--f", "exp(-r^2", "--p", "1", "--r", "1"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn certify_bounded_writes_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let args = [
        "certify",
        "--theorem",
        "2.7",
        "--N",
        "2",
        "--m",
        "2",
        "--alpha",
        "1",
        "--p",
        "1",
        "--q",
        "1",
        "--R",
        "1",
        "--points",
        "100",
        "--out",
    ];
    let out = run(&[&args[..], &[dir.path().to_str().unwrap()]].concat());
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let summary = json(&out);
    assert_eq!(summary["theorem"], "Thm2.7");
    assert_eq!(summary["status"]["status"], "Certified");
    let csv = std::fs::read_to_string(dir.path().join("margins.csv")).unwrap();
    assert!(csv.starts_with("r,lhs,rhs,margin,budget\n"));
    assert_eq!(csv.lines().count(), 101);
    assert!(dir.path().join("certificate.json").exists());
    assert!(dir.path().join("manifest.json").exists());
}

#[test]
fn certify_rejects_violated_hypotheses() {
    let out = run(&["certify", "--theorem", "2.4", "--N", "4", "--m", "2", "--alpha", "1", "--p", "0.4", "--q", "1"]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("Thm2.1(ii1)"), "{err}");
    assert!(err.contains("p > alpha(m-1)/(N-m)"), "{err}");
}

#[test]
fn certify_constant_profile_fails() {
    let out = run(&[
        "certify",
        "--profile",
        r#"{"family":"constant","c":1}"#,
        "--N",
        "2",
        "--p",
        "1",
        "--q",
        "1",
        "--domain",
        "bounded:1",
        "--points",
        "50",
    ]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(json(&out)["status"]["status"], "Failed");
}

#[test]
fn certify_unknown_theorem() {
    let out = run(&["certify", "--theorem", "9.9", "--N", "4", "--p", "1", "--q", "1"]);
    assert_eq!(out.status.code(), Some(2));
}
