use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn flarecount(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_flarecount"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn write(dir: &TempDir, name: &str, body: &str) -> PathBuf {
    let path = dir.path().join(name);
    fs::write(&path, body).unwrap();
    path
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).expect("valid json")
}

fn estimate_value(doc: &Value, id: &str) -> f64 {
    doc["result"]["estimates"]
        .as_array()
        .unwrap()
        .iter()
        .find(|e| e["estimator"] == id)
        .unwrap_or_else(|| panic!("{id} missing"))["value"]
        .as_f64()
        .unwrap()
}

const EVENTS: &str =
    "id,time\nA,0.1\nA,0.2\nA,0.9\nB,0.3\nB,0.8\nC,0.5\nD,0.7\nE,0.45\nE,0.55\nF,0.05\n";

#[test]
fn estimate_counts_file() {
    let dir = TempDir::new().unwrap();
    let counts = write(&dir, "c.csv", "k,count\n1,10\n2,5\n");
    let out = flarecount(&["estimate", "--counts", s(&counts), "--format", "json"]);
    assert_eq!(out.status.code(), Some(0));
    let doc = json(&out);
    assert_eq!(estimate_value(&doc, "ambartsumian"), 10.0);
    assert_eq!(estimate_value(&doc, "ambartsumian-upper"), 20.0);
    assert_eq!(estimate_value(&doc, "plackett-0"), 15.0);
    assert_eq!(doc["input"]["table"], serde_json::json!([[1, 10], [2, 5]]));
    assert!(doc["version"].is_string());

    let table = flarecount(&["estimate", "--counts", s(&counts)]);
    let text = stdout(&table);
    assert!(text.contains("ambartsumian "));
    assert!(text.contains("10.00"));
}

#[test]
fn estimate_events_matches_external_truncation() {
    let dir = TempDir::new().unwrap();
    let events = write(&dir, "e.csv", EVENTS);
    let tab = flarecount(&[
        "tabulate",
        "--events",
        s(&events),
        "--horizon",
        "1",
        "--t",
        "0.5",
    ]);
    assert_eq!(tab.status.code(), Some(0));
    let counts = write(&dir, "c.csv", &stdout(&tab));
    let direct = flarecount(&[
        "estimate",
        "--events",
        s(&events),
        "--horizon",
        "1",
        "--t",
        "0.5",
        "--format",
        "csv",
    ]);
    let via = flarecount(&["estimate", "--counts", s(&counts), "--format", "csv"]);
    assert_eq!(direct.status.code(), via.status.code());
    assert_eq!(direct.stdout, via.stdout);
    assert!(!direct.stdout.is_empty());
}

#[test]
fn empty_and_malformed_inputs() {
    let dir = TempDir::new().unwrap();
    let empty = write(&dir, "empty.csv", "k,count\n");
    let out = flarecount(&["estimate", "--counts", s(&empty)]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("empty table"));

    let bad = write(&dir, "bad.csv", "k,count\n1,10\n2,x\n");
    let out = flarecount(&["estimate", "--counts", s(&bad)]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("line 3"), "{}", stderr(&out));

    let missing = dir.path().join("nope.csv");
    assert_eq!(
        flarecount(&["estimate", "--counts", s(&missing)])
            .status
            .code(),
        Some(1)
    );
}

#[test]
fn estimator_selection() {
    let dir = TempDir::new().unwrap();
    let counts = write(&dir, "c.csv", "k,count\n1,10\n2,5\n");
    let out = flarecount(&[
        "estimate",
        "--counts",
        s(&counts),
        "--estimators",
        "chao,mle-total",
        "--format",
        "csv",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert_eq!(text.lines().count(), 3);
    assert!(text
        .lines()
        .nth(1)
        .unwrap()
        .starts_with("ambartsumian,unseen,lower,10,"));

    let out = flarecount(&["estimate", "--counts", s(&counts), "--estimators", "bogus"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("ambartsumian"));

    let singles = write(&dir, "s.csv", "k,count\n1,5\n");
    let out = flarecount(&[
        "estimate",
        "--counts",
        s(&singles),
        "--estimators",
        "chao,mle",
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("n_2 = 0"));
}

#[test]
fn input_kinds_are_exclusive() {
    let dir = TempDir::new().unwrap();
    let counts = write(&dir, "c.csv", "k,count\n1,10\n2,5\n");
    let events = write(&dir, "e.csv", EVENTS);
    let out = flarecount(&["estimate", "--counts", s(&counts), "--events", s(&events)]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(flarecount(&["estimate"]).status.code(), Some(1));
    assert_eq!(
        flarecount(&["estimate", "--counts", s(&counts), "--t", "0.5"])
            .status
            .code(),
        Some(1)
    );
}

#[test]
fn predict_methods() {
    let dir = TempDir::new().unwrap();
    let small = write(&dir, "a.csv", "k,count\n1,4\n2,2\n");
    let out = flarecount(&[
        "predict",
        "--counts",
        s(&small),
        "--method",
        "mnatsakanian",
        "--T",
        "1",
        "--t",
        "0.5",
        "--format",
        "csv",
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout(&out), "r,value\n0,2.5\n1,3\n2,0.5\n");

    let three = write(&dir, "b.csv", "k,count\n1,4\n2,2\n3,1\n");
    let out = flarecount(&[
        "predict",
        "--counts",
        s(&three),
        "--method",
        "efron-thisted",
        "--T",
        "1",
        "--tau",
        "1",
        "--format",
        "json",
    ]);
    assert_eq!(json(&out)["result"]["value"], 3.0);

    let chao = write(&dir, "c.csv", "k,count\n1,10\n2,5\n");
    let out = flarecount(&[
        "predict",
        "--counts",
        s(&chao),
        "--method",
        "solow-polasky",
        "--m",
        "1",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.contains("solow-polasky: 0.5000"), "{text}");
    assert!(text.contains("within its regime"));

    let out = flarecount(&[
        "predict",
        "--counts",
        s(&small),
        "--method",
        "efron-thisted",
        "--tau",
        "1",
    ]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("--T"));

    let out = flarecount(&[
        "predict",
        "--counts",
        s(&small),
        "--method",
        "solow-polasky",
        "--m",
        "3",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let singles = write(&dir, "d.csv", "k,count\n1,4\n");
    let out = flarecount(&[
        "predict",
        "--counts",
        s(&singles),
        "--method",
        "solow-polasky",
        "--m",
        "3",
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn check_command() {
    let out = flarecount(&["check", "--mix", "point:1.0", "--t", "1", "--kmax", "6"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert_eq!(text.lines().count(), 7);
    assert!(text.trim_end().ends_with("PASS"));

    let out = flarecount(&[
        "check",
        "--mix",
        "gamma:2,2",
        "--t",
        "1",
        "--kmax",
        "6",
        "--format",
        "json",
    ]);
    let doc = json(&out);
    assert_eq!(doc["pass"], true);
    for m in doc["margins"].as_array().unwrap() {
        assert!(m[1].as_f64().unwrap() > 0.0);
    }

    let out = flarecount(&["check", "--mix", "gamma:2", "--t", "1"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("point:NU"));
}

#[test]
fn simulate_recovers_homogeneous_unseen() {
    let out = flarecount(&[
        "simulate",
        "--n",
        "1000",
        "--mix",
        "point:1.0",
        "--t",
        "1",
        "--reps",
        "500",
        "--seed",
        "42",
        "--estimators",
        "chao",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let doc = json(&out);
    assert_eq!(doc["config"]["seed"], 42);
    assert_eq!(doc["config"]["mixture"], "point:1");
    assert!(doc["generator"].as_str().unwrap().contains("ChaCha8"));
    let rows = doc["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 1);
    let mean = rows[0]["mean"].as_f64().unwrap();
    assert!((mean / 367.879 - 1.0).abs() < 0.05, "{mean}");
}

#[test]
fn simulate_requires_seed() {
    let out = flarecount(&["simulate", "--n", "10", "--mix", "point:1", "--t", "1"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("--seed"));
}

#[test]
fn replay_curves() {
    let dir = TempDir::new().unwrap();
    let events = dir.path().join("sim.csv");
    let out = flarecount(&[
        "simulate",
        "--n",
        "500",
        "--mix",
        "gamma:2,2",
        "--t",
        "1",
        "--seed",
        "7",
        "--events-out",
        s(&events),
        "--estimators",
        "chao-total",
    ]);
    assert_eq!(out.status.code(), Some(0));

    let out = flarecount(&[
        "replay",
        "--events",
        s(&events),
        "--grid",
        "20",
        "--estimator",
        "chao-total",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    let rows: Vec<&str> = text.lines().skip(1).collect();
    assert_eq!(rows.len(), 20);
    let first: f64 = rows[0].split(',').nth(1).unwrap().parse().unwrap();
    let last: f64 = rows[19].split(',').nth(1).unwrap().parse().unwrap();
    assert!(last > first);

    let one = flarecount(&[
        "replay",
        "--events",
        s(&events),
        "--grid",
        "1",
        "--estimator",
        "chao-total",
    ]);
    let value: f64 = stdout(&one)
        .lines()
        .nth(1)
        .unwrap()
        .split(',')
        .nth(1)
        .unwrap()
        .parse()
        .unwrap();
    let est = flarecount(&[
        "estimate",
        "--events",
        s(&events),
        "--estimators",
        "chao-total",
        "--format",
        "json",
    ]);
    assert_eq!(value, estimate_value(&json(&est), "ambartsumian-total"));
}

#[test]
fn replay_single_subject_warns() {
    let dir = TempDir::new().unwrap();
    let events = write(&dir, "one.csv", "id,time\nA,0.6\n");
    let out = flarecount(&[
        "replay",
        "--events",
        s(&events),
        "--horizon",
        "1",
        "--grid",
        "5",
        "--estimator",
        "chao-total",
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout(&out), "x,value,estimator\n");
    assert!(stderr(&out).contains("warning"));
    let out = flarecount(&["replay", "--events", s(&events), "--grid", "0"]);
    assert_eq!(out.status.code(), Some(1));
}
