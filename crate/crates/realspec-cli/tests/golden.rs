//! Golden-file and interface tests for the command-line binary.

use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_realspec"))
}

fn run_ok(args: &[&str]) -> String {
    let out = bin().args(args).output().expect("spawn");
    assert!(
        out.status.success(),
        "command {:?} failed: {}",
        args,
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).expect("utf8")
}

#[test]
fn table_outputs_byte_match_golden_files() {
    for id in 1..=3u32 {
        let got = run_ok(&["table", "--id", &id.to_string(), "--format", "json"]);
        let want = std::fs::read_to_string(format!(
            "{}/tests/golden/table{id}.json",
            env!("CARGO_MANIFEST_DIR")
        ))
        .expect("golden file");
        assert_eq!(got, want, "table {id} drifted from its golden file");
    }
}

#[test]
fn prob_pretty_reference_line() {
    let got = run_ok(&["prob", "--N", "2", "-m", "2", "--mode", "exact", "--format", "pretty"]);
    assert_eq!(got, "p[0] = 1 - (1/4)*pi \u{2248} 0.2146; p[2] = (1/4)*pi \u{2248} 0.7854\n");
}

#[test]
fn empty_offsets_equal_square() {
    let a = run_ok(&["prob", "--N", "2", "-m", "2", "--format", "json"]);
    let b = run_ok(&["prob", "--N", "2", "-m", "2", "--nu", "0", "--format", "json"]);
    assert_eq!(a, b);
}

#[test]
fn json_round_trips_exact_values() {
    let got = run_ok(&["prob", "--N", "6", "-m", "2", "--format", "json"]);
    let parsed: serde_json::Value = serde_json::from_str(&got).unwrap();
    for entry in parsed["entries"].as_array().unwrap() {
        let s = entry["exact"].as_str().unwrap();
        let v = realspec::ExactValue::parse(s).unwrap();
        assert_eq!(v.canonical_string(), s, "canonical string not a fixed point");
    }
    // rectangular all-real value from the reference table
    let got = run_ok(&["table", "--id", "3", "--format", "json"]);
    let rows: serde_json::Value = serde_json::from_str(&got).unwrap();
    let row = rows
        .as_array()
        .unwrap()
        .iter()
        .find(|r| r["N"] == 2 && r["nu"] == 3)
        .unwrap();
    assert_eq!(row["exact"].as_str().unwrap(), "1/18");
}

#[test]
fn exit_codes() {
    // flag errors: clap exits 2
    let out = bin().args(["prob", "--N"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    // unsupported mode: exact with three factors exits 3
    let out =
        bin().args(["prob", "--N", "4", "-m", "3", "--mode", "exact"]).output().unwrap();
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn simulate_is_reproducible() {
    let args = [
        "simulate", "--N", "3", "-m", "2", "--samples", "2000", "--seed", "42", "--format", "json",
    ];
    let a = run_ok(&args);
    let b = run_ok(&args);
    assert_eq!(a, b);
    let parsed: serde_json::Value = serde_json::from_str(&a).unwrap();
    assert_eq!(parsed["samples"], 2000);
}

#[test]
fn figure_emits_histogram_and_law() {
    let got = run_ok(&[
        "figure", "--id", "1", "--scale", "24,6", "-m", "2", "--seed", "3", "--bins", "10",
        "--format", "csv",
    ]);
    let mut lines = got.lines();
    assert_eq!(lines.next().unwrap(), "x,histogram,law");
    assert_eq!(lines.count(), 10);
}
