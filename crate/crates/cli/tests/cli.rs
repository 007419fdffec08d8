use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pq-osc"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn csv_records(out: &Output) -> (csv::StringRecord, Vec<csv::StringRecord>) {
    let mut reader = csv::Reader::from_reader(out.stdout.as_slice());
    let header = reader.headers().unwrap().clone();
    let rows = reader.records().map(Result::unwrap).collect();
    (header, rows)
}

fn column(header: &csv::StringRecord, name: &str) -> usize {
    header
        .iter()
        .position(|h| h == name)
        .unwrap_or_else(|| panic!("missing column {name}"))
}

fn stderr_error(out: &Output) -> Value {
    let text = String::from_utf8(out.stderr.clone()).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 1, "stderr should be one line: {text}");
    serde_json::from_str(lines[0]).unwrap()
}

#[test]
fn fibonacci_numbers_are_integers() {
    let out = run(&["numbers", "--family", "fibonacci", "--n-max", "10"]);
    assert!(out.status.success());
    let (header, rows) = csv_records(&out);
    let value = column(&header, "value");
    let expected = [0.0, 1.0, 1.0, 2.0, 3.0, 5.0, 8.0, 13.0, 21.0, 34.0, 55.0];
    assert_eq!(rows.len(), expected.len());
    for (row, e) in rows.iter().zip(expected) {
        let v: f64 = row[value].parse().unwrap();
        assert!((v - e).abs() < 1e-9, "{v} vs {e}");
        assert_eq!(&row[column(&header, "status")], "ok");
    }
}

#[test]
fn undeformed_uncertainty_is_minimal() {
    let out = run(&[
        "uncertainty",
        "--p",
        "1",
        "--q",
        "1",
        "--alpha",
        "0.5",
        "--format",
        "json",
    ]);
    assert!(out.status.success());
    let doc: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(doc["metadata"]["tool"], "pq-osc");
    let records = doc["records"].as_array().unwrap();
    assert_eq!(records.len(), 3);
    for r in records {
        assert!((r["value"].as_f64().unwrap() - 0.5).abs() < 1e-10, "{r}");
    }
}

#[test]
fn fibonacci_reference_concurrence() {
    let out = run(&["concurrence", "--kind", "L", "--family", "fibonacci", "--alpha", "0"]);
    assert!(out.status.success());
    let (header, rows) = csv_records(&out);
    let value = column(&header, "value");
    let phi = (1.0 + 5f64.sqrt()) / 2.0;
    let expected = 2.0 * phi / (1.0 + phi * phi);
    assert!(!rows.is_empty());
    for row in &rows {
        let v: f64 = row[value].parse().unwrap();
        assert!((v - expected).abs() < 1e-6, "{v}");
    }
}

#[test]
fn csv_floats_round_trip() {
    let out = run(&[
        "sweep",
        "--quantity",
        "pq_number",
        "--family",
        "sym",
        "--q",
        "0.7",
        "--n-max",
        "20",
    ]);
    assert!(out.status.success());
    let (header, rows) = csv_records(&out);
    let (n_col, value) = (column(&header, "n"), column(&header, "value"));
    let q: f64 = 0.7;
    let p = 1.0 / q;
    for row in rows {
        let n: i32 = row[n_col].parse().unwrap();
        let v: f64 = row[value].parse().unwrap();
        let exact = (p.powi(n) - q.powi(n)) / (p - q);
        assert!((v - exact).abs() <= 1e-13 * exact.abs().max(1.0));
        assert_eq!(format!("{v:.16e}"), row[value].to_string());
    }
}

#[test]
fn sweep_alpha_grid_spans_endpoints() {
    let out = run(&[
        "sweep",
        "--quantity",
        "uncertainty",
        "--family",
        "nonsym",
        "--alpha",
        "0.2",
        "--alpha-max",
        "1",
        "--steps",
        "4",
        "--format",
        "json",
    ]);
    assert!(out.status.success());
    let doc: Value = serde_json::from_slice(&out.stdout).unwrap();
    let mut alphas: Vec<f64> = doc["records"]
        .as_array()
        .unwrap()
        .iter()
        .map(|r| r["alpha_re"].as_f64().unwrap())
        .collect();
    alphas.dedup();
    assert_eq!(alphas.len(), 5);
    assert!((alphas[0] - 0.2).abs() < 1e-15 && (alphas[4] - 1.0).abs() < 1e-15);
}

#[test]
fn repeated_runs_are_identical() {
    let args = [
        "sweep",
        "--quantity",
        "concurrence_B",
        "--family",
        "fibonacci",
        "--alpha",
        "0.1",
        "--alpha-max",
        "0.9",
        "--steps",
        "8",
    ];
    let a = run(&args);
    let b = run(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn thread_count_does_not_change_output() {
    let args = [
        "sweep",
        "--quantity",
        "uncertainty",
        "--family",
        "sym",
        "--alpha",
        "0.1,0.1",
        "--alpha-max",
        "1",
        "--steps",
        "12",
    ];
    let one = Command::new(env!("CARGO_BIN_EXE_pq-osc"))
        .args(args)
        .env("PQ_OSC_THREADS", "1")
        .output()
        .unwrap();
    let four = Command::new(env!("CARGO_BIN_EXE_pq-osc"))
        .args(args)
        .env("PQ_OSC_THREADS", "4")
        .output()
        .unwrap();
    assert!(one.status.success());
    assert_eq!(one.stdout, four.stdout);
}

#[test]
fn verify_all_passes() {
    let out = run(&["verify", "all", "--format", "json"]);
    assert!(out.status.success());
    let doc: Value = serde_json::from_slice(&out.stdout).unwrap();
    let records = doc["records"].as_array().unwrap();
    assert_eq!(records.len(), 16);
    for r in records {
        assert_ne!(r["status"], "fail", "{r}");
    }
}

#[test]
fn conflicting_family_flags_are_rejected() {
    for args in [
        &["numbers", "--family", "fibonacci", "--q", "2"][..],
        &["numbers", "--family", "sym", "--p", "1"][..],
        &["numbers", "--family", "sym", "--k", "2"][..],
        &["numbers", "--p", "1"][..],
    ] {
        let out = run(args);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
        assert_eq!(stderr_error(&out)["error"], "ConfigInvalid");
        assert!(out.stdout.is_empty());
    }
}

#[test]
fn malformed_values_are_config_errors() {
    for args in [
        &["uncertainty", "--family", "sym", "--alpha", "x"][..],
        &["uncertainty", "--family", "sym", "--dim", "1"][..],
        &["exp", "--family", "sym", "--tol", "-1"][..],
        &["verify", "nope"][..],
        &["frobnicate"][..],
    ] {
        let out = run(args);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
        let err = stderr_error(&out);
        assert_eq!(err["error"], "ConfigInvalid");
        assert!(err["message"].as_str().is_some());
    }
}

#[test]
fn bad_thread_setting_is_rejected() {
    let out = Command::new(env!("CARGO_BIN_EXE_pq-osc"))
        .args(["numbers", "--family", "fibonacci"])
        .env("PQ_OSC_THREADS", "zero")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(stderr_error(&out)["error"], "ConfigInvalid");
}

#[test]
fn json_metadata_echoes_configuration() {
    let out = run(&["spectrum", "--family", "sym", "--n-max", "4", "--format", "json"]);
    assert!(out.status.success());
    let doc: Value = serde_json::from_slice(&out.stdout).unwrap();
    let meta = &doc["metadata"];
    assert_eq!(meta["version"], env!("CARGO_PKG_VERSION"));
    assert_eq!(meta["config"]["command"], "spectrum");
    assert_eq!(meta["config"]["family"], "sym");
}

#[test]
fn out_flag_writes_file() {
    let path = std::env::temp_dir().join(format!("pq-osc-test-{}.csv", std::process::id()));
    let out = run(&["numbers", "--family", "fibonacci", "--out", path.to_str().unwrap()]);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    let text = std::fs::read_to_string(&path).unwrap();
    std::fs::remove_file(&path).unwrap();
    assert!(text.starts_with("family,"));
}
