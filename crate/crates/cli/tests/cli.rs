use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_speedmeasure"))
}

fn spec_path(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../book/src/specs").join(name)
}

fn run_spec(spec: &Path, out: &Path, extra: &[&str]) -> Output {
    bin().arg("run").arg(spec).arg("--out").arg(out).args(extra).output().unwrap()
}

fn report(dir: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(dir.join("report.json")).unwrap()).unwrap()
}

#[test]
fn cantor_spec_reports_variation_and_singular_part() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_spec(&spec_path("cantor.json"), dir.path(), &[]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let r = report(dir.path());
    assert!((r["variation"]["value"].as_f64().unwrap() - 1.0).abs() <= 1e-6);
    let totals = &r["decomposition"]["totals"];
    assert!(totals["ac"].as_f64().unwrap() <= 1e-3);
    assert!((totals["sc"].as_f64().unwrap() - 1.0).abs() <= 1e-3);
    assert_eq!(r["ac"]["ac_loc"], false);
    for f in ["density.csv", "cells.csv", "witness.csv"] {
        assert!(dir.path().join(f).exists(), "{f} missing");
    }
    // stdout carries the same report
    assert_eq!(String::from_utf8(out.stdout).unwrap(), fs::read_to_string(dir.path().join("report.json")).unwrap());
}

#[test]
fn discrete_path_has_two_unit_atoms() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_spec(&spec_path("discrete_path.json"), dir.path(), &[]);
    assert_eq!(out.status.code(), Some(0));
    let r = report(dir.path());
    let sm = &r["speed_measure"];
    assert_eq!(sm["total_mass"], 2.0);
    assert_eq!(sm["continuous"], false);
    let atoms: Vec<(f64, f64)> = sm["atoms"]
        .as_array()
        .unwrap()
        .iter()
        .map(|a| (a["t"].as_f64().unwrap(), a["mass"].as_f64().unwrap()))
        .collect();
    assert_eq!(atoms, vec![(0.5, 1.0), (1.0, 1.0)]);
    assert_eq!(r["verify"]["passed"], true);
    let atoms_csv = fs::read_to_string(dir.path().join("atoms.csv")).unwrap();
    assert_eq!(atoms_csv.lines().count(), 3);
}

#[test]
fn composite_spec_runs_acp_blocks() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_spec(&spec_path("stepped_power.json"), dir.path(), &[]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let r = report(dir.path());
    let acp = r["acp"].as_array().unwrap();
    assert_eq!(acp.len(), 2);
    // sqrt(t) has derivative 1/(2 sqrt t): integrable, but not square integrable
    assert!((acp[0]["integral"].as_f64().unwrap() - 1.0).abs() <= 1e-3);
    assert_eq!(acp[1]["integral"], Value::Null);
    assert_eq!(acp[0]["member"], false, "the jump rules out absolute continuity");
    assert!(dir.path().join("luzin.csv").exists());
}

#[test]
fn reports_are_byte_identical_across_runs() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    for dir in [&a, &b] {
        let out = run_spec(&spec_path("discrete_path.json"), dir.path(), &["--seed", "7"]);
        assert_eq!(out.status.code(), Some(0));
    }
    let mut names: Vec<_> = fs::read_dir(a.path()).unwrap().map(|e| e.unwrap().file_name()).collect();
    names.sort();
    assert!(!names.is_empty());
    for n in names {
        assert_eq!(fs::read(a.path().join(&n)).unwrap(), fs::read(b.path().join(&n)).unwrap(), "{n:?} differs");
    }
}

#[test]
fn text_and_csv_formats() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_spec(&spec_path("discrete_path.json"), dir.path(), &["--format", "csv"]);
    assert_eq!(out.status.code(), Some(0));
    let csv = fs::read_to_string(dir.path().join("report.csv")).unwrap();
    assert!(csv.starts_with("key,value\n"));
    assert!(csv.contains("\nspeed_measure.total_mass,2.0\n"));

    let out = run_spec(&spec_path("discrete_path.json"), dir.path(), &["--format", "text"]);
    assert_eq!(out.status.code(), Some(0));
    let text = fs::read_to_string(dir.path().join("report.txt")).unwrap();
    assert!(text.contains("speed_measure:\n  total_mass: 2.0\n"));
}

#[test]
fn malformed_spec_exits_with_usage_status() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    fs::write(&bad, "{\"curve\": {\"oracle\": \"cantor\"").unwrap();
    let out = bin().arg("run").arg(&bad).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 1 column"));

    fs::write(&bad, r#"{"curve": {"samples": [[0, 1], [0.5, "x"]]}}"#).unwrap();
    let out = bin().arg("run").arg(&bad).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("curve.samples[1]"));

    fs::write(&bad, r#"{"curve": {"oracle": "cantor"}, "tolerances": {"tol": -1}}"#).unwrap();
    let out = bin().arg("run").arg(&bad).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("tolerances.tol"));

    let out = bin().args(["run", "/nonexistent/spec.json"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn bad_flag_value_exits_with_usage_status() {
    let out = bin().arg("run").arg(spec_path("cantor.json")).args(["--tol", "0"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn list_oracles_carries_known_values() {
    let out = bin().args(["list-oracles", "--format", "json"]).output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    let oracles = v["oracles"].as_array().unwrap();
    let get = |name: &str| oracles.iter().find(|o| o["name"] == name).unwrap().clone();
    assert_eq!(oracles.len(), 8);
    assert_eq!(get("cantor")["known_variation"], 1.0);
    assert_eq!(get("sin_wave")["known_variation"], 4.0);
    assert!((get("circle_arc")["known_variation"].as_f64().unwrap() - std::f64::consts::TAU).abs() < 1e-15);
    assert_eq!(get("step")["declared_jumps"].as_array().unwrap().len(), 1);
    assert_eq!(get("staircase")["continuous"], false);

    let text = bin().arg("list-oracles").output().unwrap();
    assert!(String::from_utf8_lossy(&text.stdout).contains("cantor_plus_linear"));
}

#[test]
fn verify_named_oracle_passes() {
    let dir = tempfile::tempdir().unwrap();
    let out = bin().args(["verify", "--oracle", "step", "--out"]).arg(dir.path()).output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert!(stdout.lines().any(|l| l.starts_with("PASS step speed_measure::atom_identity")));
    assert!(stdout.ends_with("1 curves verified, 0 with violations\n"));
    assert!(!stdout.contains("FAIL"));
    let v: Value = serde_json::from_str(&fs::read_to_string(dir.path().join("verify.json")).unwrap()).unwrap();
    assert_eq!(v["verify"][0]["passed"], true);
}

#[test]
fn verify_rejects_unknown_oracle() {
    let out = bin().args(["verify", "--oracle", "koch"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn guide_examples_match_spec_files_and_parse() {
    let guide = fs::read_to_string(spec_path("../cli.md")).unwrap();
    for name in ["cantor.json", "discrete_path.json", "stepped_power.json"] {
        let file = fs::read_to_string(spec_path(name)).unwrap();
        assert!(guide.contains(&format!("```json\n{file}```")), "{name} out of sync with the guide");
    }
    let blocks: Vec<&str> = guide.split("```json\n").skip(1).map(|b| b.split("```").next().unwrap()).collect();
    assert_eq!(blocks.len(), 3);
    for b in blocks {
        speedmeasure_cli::spec::parse(b).unwrap();
    }
}
