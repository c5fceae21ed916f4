use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn mqe(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mqe")).args(args).output().expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn stderr(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).unwrap()
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| panic!("{e}: {}", stdout(out)))
}

fn write(dir: &TempDir, name: &str, text: &str) -> PathBuf {
    let p = dir.path().join(name);
    std::fs::write(&p, text).unwrap();
    p
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn analyze_elliptic_file() {
    let dir = TempDir::new().unwrap();
    let lap = write(&dir, "laplacian.sys", "# Laplacian\nxi1^2 + xi2^2\n");
    let out = mqe(&["analyze", s(&lap), "--json"]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let r = json(&out);
    assert_eq!(r["schema_version"], 1);
    assert_eq!(r["polyhedron"]["mu"], "2");
    assert_eq!(r["polyhedron"]["theta"], serde_json::json!(["1", "1"]));
    assert_eq!(r["ellipticity"]["status"], "elliptic");
    assert_eq!(r["inequality"]["bounded"], true);
    assert_eq!(r["polyhedron"]["exactness"]["mu"], "rational");
}

#[test]
fn analyze_wave_reports_witness() {
    let out = mqe(&["analyze", "bundled:wave", "--json", "--skip-inequality"]);
    assert_eq!(code(&out), 3);
    let r = json(&out);
    assert_eq!(r["ellipticity"]["status"], "not-elliptic");
    assert_eq!(r["ellipticity"]["witness"]["q"], serde_json::json!(["1/2", "1/2"]));
    assert!(r.get("inequality").is_none());
}

#[test]
fn analyze_human_summary() {
    let out = mqe(&["analyze", "bundled:mqe", "--skip-inequality"]);
    assert_eq!(code(&out), 0);
    let text = stdout(&out);
    assert!(text.contains("mu = 8") && text.contains("theta = (4/3,1)"), "{text}");
}

#[test]
fn input_errors_exit_one() {
    let dir = TempDir::new().unwrap();
    let bad = write(&dir, "bad.sys", "xi1^2 +\n");
    let out = mqe(&["analyze", s(&bad)]);
    assert_eq!(code(&out), 1);
    assert!(stderr(&out).contains("line 1, column"), "{}", stderr(&out));
    assert_eq!(code(&mqe(&["analyze", s(&dir.path().join("missing.sys"))])), 1);
    assert_eq!(code(&mqe(&["analyze", "bundled:nonesuch"])), 1);
}

#[test]
fn irregular_exits_five() {
    let out = mqe(&["analyze", "bundled:irregular", "--json"]);
    assert_eq!(code(&out), 5);
    assert_eq!(json(&out)["polyhedron"]["regular"], false);
    assert_eq!(code(&mqe(&["bounds", "bundled:irregular", "--alpha", "1,0"])), 5);
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(code(&mqe(&["analyze"])), 2);
    assert_eq!(code(&mqe(&["frobnicate"])), 2);
    assert_eq!(code(&mqe(&["bounds", "--mu", "2"])), 2);
    assert_eq!(code(&mqe(&["wavepacket", "bundled:wave", "--q", "1/2,1/2"])), 2);
}

#[test]
fn reports_are_deterministic() {
    let dir = TempDir::new().unwrap();
    let file = dir.path().join("a.json");
    let a = mqe(&["analyze", "bundled:wave", "--json", "--seed", "7", "--out", s(&file)]);
    let b = mqe(&["analyze", "bundled:wave", "--json", "--seed", "7"]);
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(std::fs::read(&file).unwrap(), a.stdout);
    assert_eq!(json(&a)["config"]["seed"], 7);
}

#[test]
fn config_file_supplies_defaults() {
    let dir = TempDir::new().unwrap();
    let cfg = write(&dir, "mqe.toml", "delta_min = 0.001\nsamples = 8\nradii = 4\n");
    let out = mqe(&["analyze", "bundled:laplacian", "--json", "--config", s(&cfg), "--radii", "6"]);
    assert_eq!(code(&out), 0);
    let c = &json(&out)["config"];
    assert_eq!((c["delta_min"].as_f64(), c["samples"].as_u64(), c["radii"].as_u64()), (Some(0.001), Some(8), Some(6)));
    let bad = write(&dir, "bad.toml", "delta_mni = 0.1\n");
    assert_eq!(code(&mqe(&["analyze", "bundled:laplacian", "--config", s(&bad)])), 1);
}

fn csv_rows(text: &str) -> Vec<Vec<String>> {
    text.lines()
        .skip(1)
        .map(|l| {
            let mut fields = Vec::new();
            let mut cur = String::new();
            let mut quoted = false;
            for ch in l.chars() {
                match ch {
                    '"' => quoted = !quoted,
                    ',' if !quoted => fields.push(std::mem::take(&mut cur)),
                    c => cur.push(c),
                }
            }
            fields.push(cur);
            fields
        })
        .collect()
}

#[test]
fn iterate_bounds_table() {
    let out = mqe(&["bounds", "--mu", "2", "--s", "1", "--C", "1", "--l-range", "0..=5"]);
    assert_eq!(code(&out), 0);
    let rows = csv_rows(&stdout(&out));
    assert_eq!(rows.len(), 6);
    let mut fact = 1.0;
    for (l, row) in rows.iter().enumerate() {
        if l > 0 {
            fact *= l as f64;
        }
        let v: f64 = row[2].parse().unwrap();
        assert!((v / (fact * fact) - 1.0).abs() < 1e-12, "l={l}: {v}");
    }
}

#[test]
fn derivative_bounds_table() {
    let dir = TempDir::new().unwrap();
    let csv = dir.path().join("t.csv");
    let out = mqe(&["bounds", "bundled:laplacian", "--alpha", "2,0", "--json", "--csv", s(&csv)]);
    assert_eq!(code(&out), 0);
    let r = json(&out);
    let b = r["bounds"]["rows"][0]["bound"].as_f64().unwrap();
    assert!((b - 2.0).abs() < 1e-12);
    assert_eq!(r["bounds"]["rows"][0]["k"], "1");
    let rows = csv_rows(&std::fs::read_to_string(&csv).unwrap());
    assert_eq!(rows[0][0], "2,0");
}

#[test]
fn empty_range_and_small_s() {
    let out = mqe(&["bounds", "--mu", "2", "--l-range", "3..3"]);
    assert_eq!(code(&out), 0);
    assert_eq!(stdout(&out).trim(), "l,log_bound,bound");
    let out = mqe(&["bounds", "--mu", "2", "--l-range", "0..3", "--s", "0.5"]);
    assert_eq!(code(&out), 0);
    assert!(stderr(&out).contains("warning"));
}

#[test]
fn wavepacket_on_wave() {
    let dir = TempDir::new().unwrap();
    let csv = dir.path().join("sweep.csv");
    let out = mqe(&["wavepacket", "bundled:wave", "--s", "2", "--sigma", "1", "--json", "--csv", s(&csv)]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let w = &json(&out)["wavepacket"];
    assert_eq!(w["dichotomy_observed"], true);
    assert_eq!(w["epsilon"], "2/13");
    assert_eq!(w["eta"], "3/13");
    assert_eq!(w["alpha"], serde_json::json!([1, 0]));
    assert!(w["fit"]["exponent"].as_f64().unwrap() <= w["fit"]["exponent_limit"].as_f64().unwrap());
    assert_eq!(csv_rows(&std::fs::read_to_string(&csv).unwrap()).len(), 30);
}

#[test]
fn wavepacket_contract_errors() {
    let out = mqe(&["wavepacket", "bundled:laplacian"]);
    assert_eq!(code(&out), 6);
    assert!(stderr(&out).contains("no counterexample"));
    assert_eq!(code(&mqe(&["wavepacket", "bundled:wave", "--s", "1", "--sigma", "1"])), 2);
    assert_eq!(code(&mqe(&["wavepacket", "bundled:wave", "--s", "3/2", "--sigma", "2"])), 2);
    assert_eq!(code(&mqe(&["wavepacket", "bundled:irregular"])), 5);
}

#[test]
fn wavepacket_explicit_witness() {
    let out = mqe(&[
        "wavepacket", "bundled:heat", "--q", "1,1/2", "--xi0", "1,1", "--alpha", "0,2", "--m-max", "12", "--k-max", "4", "--json",
    ]);
    let w = &json(&out)["wavepacket"];
    assert_eq!(w["q"], serde_json::json!(["1", "1/2"]));
    assert_eq!(w["violation"]["rows"].as_array().unwrap().len(), 12);
    let sweeps = w["violation"]["constants"].as_array().unwrap();
    assert!(!sweeps[0]["exceedances"].as_array().unwrap().is_empty());
    assert!([0, 7].contains(&code(&out)));
}

#[test]
fn selfcheck_json() {
    let out = mqe(&["selfcheck", "--quick", "--json"]);
    assert_eq!(code(&out), 0, "{}", stdout(&out));
    let r = json(&out);
    assert_eq!(r["passed"], true);
    assert!(r["suites"].as_array().unwrap().len() >= 8);
}

#[test]
fn selfcheck_reports_corrupt_file() {
    let dir = TempDir::new().unwrap();
    write(&dir, "good.sys", "xi1^2 + xi2^2\n");
    write(&dir, "broken.sys", "xi1^^2\n");
    let out = mqe(&["selfcheck", "--quick", "--systems", s(dir.path())]);
    assert_ne!(code(&out), 0);
    let text = stdout(&out);
    assert!(text.contains("FAIL system files") && text.contains("broken.sys"), "{text}");
}
