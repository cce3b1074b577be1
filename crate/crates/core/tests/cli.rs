use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use tempfile::TempDir;

fn wcs(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_wcs"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn compute_writes_density_and_report() {
    let dir = TempDir::new().unwrap();
    let (csv, json) = (dir.path().join("f.csv"), dir.path().join("r.json"));
    let out = wcs(&[
        "compute", "--family", "paper", "--a", "2", "--s", "1",
        "--density-out", path_str(&csv), "--report-out", path_str(&json),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));

    let text = fs::read_to_string(&csv).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("alpha,f"));
    let rows: Vec<(f64, f64)> = lines
        .map(|l| {
            let (a, f) = l.split_once(',').unwrap();
            (a.parse().unwrap(), f.parse().unwrap())
        })
        .collect();
    assert!(rows.len() > 4096);
    assert_eq!(rows[0].0, 0.0);

    let report: serde_json::Value = serde_json::from_str(&fs::read_to_string(&json).unwrap()).unwrap();
    for key in ["integral", "class_value", "mod_z", "nontrivial", "s", "a", "max_imag", "quadrature_n"] {
        assert!(report.get(key).is_some(), "missing {key}");
    }
    assert!((report["integral"].as_f64().unwrap() + 26.0687).abs() < 1e-3);
    assert_eq!(report["nontrivial"], true);
}

#[test]
fn outputs_are_byte_stable() {
    let dir = TempDir::new().unwrap();
    let run = |tag: &str| {
        let (csv, json) = (dir.path().join(format!("{tag}.csv")), dir.path().join(format!("{tag}.json")));
        let out = wcs(&["compute", "--a", "3", "--density-out", path_str(&csv), "--report-out", path_str(&json)]);
        assert!(out.status.success());
        (fs::read(csv).unwrap(), fs::read(json).unwrap(), out.stdout)
    };
    assert_eq!(run("first"), run("second"));
}

#[test]
fn custom_metric_from_config_file() {
    let dir = TempDir::new().unwrap();
    let cfg = dir.path().join("run.json");
    fs::write(&cfg, r#"{"lambda": "1", "mu": "2 + 0.5*sin(alpha)", "nu": "2 - cos(alpha)", "samples": 512}"#).unwrap();
    let out = wcs(&["compute", "--config", path_str(&cfg)]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert!(stdout.contains("\"quadrature_n\""));
}

#[test]
fn sweep_writes_one_report_per_parameter() {
    let dir = TempDir::new().unwrap();
    let json = dir.path().join("sweep.json");
    let out = wcs(&["sweep", "--a", "2,8", "--report-out", path_str(&json)]);
    assert!(out.status.success());
    for a in [2, 8] {
        assert!(dir.path().join(format!("sweep_a{a}.json")).exists());
    }
    let all: Vec<serde_json::Value> = serde_json::from_str(&fs::read_to_string(json).unwrap()).unwrap();
    assert_eq!(all.len(), 2);
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert_eq!(stdout.lines().count(), 3);
}

#[test]
fn exit_codes() {
    let code = |args: &[&str]| wcs(args).status.code();
    assert_eq!(code(&["compute", "--lambda", "sin(alpha", "--mu", "1", "--nu", "1"]), Some(2));
    assert_eq!(code(&["compute", "--lambda", "1", "--mu", "sin(alpha)", "--nu", "1"]), Some(1));
    assert_eq!(code(&["compute", "--a", "2", "--s", "0.3"]), Some(1));
    assert_eq!(code(&["compute", "--family", "paper"]), Some(1));
    assert_eq!(code(&["compute", "--a", "2", "--samples", "4096", "--tol", "1e-300", "--rule", "romberg"]), Some(3));
    assert_eq!(code(&["sweep", "--a", "2,0"]), Some(1));
    assert_eq!(code(&["compute", "--bogus"]), Some(1));
}

#[test]
fn parse_errors_report_the_offset() {
    let out = wcs(&["compute", "--lambda", "1 +", "--mu", "1", "--nu", "1"]);
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains('3'), "{err}");
}
