//! End-to-end checks of the command-line interface: artifact shape, exit
//! codes, JSON round-trip determinism.

use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sqbessel"))
        .args(args)
        .output()
        .expect("binary runs")
}

#[test]
fn edges_csv_has_expected_header_and_eta_zero_region() {
    let out = run(&["edges", "--a", "1", "--t", "0.2", "--p", "0", "--s-max", "8", "--grid", "64"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), "s,beta,gamma,eta");
    // eta ≡ 0 for s ≤ s* = 4 at these parameters
    for line in text.lines().skip(1) {
        let cols: Vec<f64> = line.split(',').map(|v| v.parse().unwrap()).collect();
        let (s, eta) = (cols[0], cols[3]);
        if s <= 4.0 {
            assert_eq!(eta, 0.0, "eta nonzero at s = {s}");
        } else {
            assert!(eta < 0.0, "eta should be negative at s = {s}");
        }
    }
}

#[test]
fn density_nu1_mass_is_one() {
    let out = run(&["density", "nu1", "--t", "0.9", "--grid", "200", "--format", "json"]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let mass = v["meta"]["mass"].as_f64().unwrap();
    assert!((mass - 1.0).abs() <= 1e-5, "mass {mass}");
}

#[test]
fn json_round_trips_exactly() {
    let out = run(&["edges", "--t", "0.3", "--p", "5", "--grid", "32", "--format", "json"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let parsed: serde_json::Value = serde_json::from_str(&text).unwrap();
    let re = serde_json::to_string_pretty(&parsed).unwrap() + "\n";
    assert_eq!(text, re, "JSON does not round-trip byte-identically");

    // shortest round-trip floats: every number reparses to the same bits
    let rows = parsed["rows"].as_array().unwrap();
    for row in rows {
        for v in row.as_array().unwrap() {
            let x = v.as_f64().unwrap();
            let reparsed: f64 = format!("{x}").parse().unwrap();
            assert_eq!(x.to_bits(), reparsed.to_bits());
        }
    }
}

#[test]
fn validation_failures_exit_2() {
    let out = run(&["edges", "--t", "1.5"]);
    assert_eq!(out.status.code(), Some(2));
    let out = run(&["toeplitz", "--n", "4000"]);
    assert_eq!(out.status.code(), Some(2));
    let out = run(&["field", "--x-max", "-3"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn simulate_is_deterministic_and_pinned() {
    let args = ["simulate", "--n", "3", "--steps", "8", "--seed", "11", "--replicas", "2"];
    let first = run(&args);
    let second = run(&args);
    assert!(first.status.success());
    assert_eq!(first.stdout, second.stdout, "same seed must give identical output");

    let text = String::from_utf8(first.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), "replica,tau,path_index,position");
    let rows: Vec<Vec<&str>> = text.lines().skip(1).map(|l| l.split(',').collect()).collect();
    // 2 replicas × 9 times × 3 paths
    assert_eq!(rows.len(), 2 * 9 * 3);
    for row in &rows {
        let tau: f64 = row[1].parse().unwrap();
        let pos: f64 = row[3].parse().unwrap();
        if tau == 1.0 {
            assert_eq!(pos, 0.0);
        }
        assert!(pos >= 0.0);
    }
}

#[test]
fn coeffs_limit_matches_known_row() {
    let out = run(&["coeffs", "--kind", "limit", "--s-max", "1", "--grid", "1"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let last = text.lines().last().unwrap();
    let cols: Vec<f64> = last.split(',').map(|v| v.parse().unwrap()).collect();
    assert_eq!(cols, vec![1.0, 0.96, 0.2304, 0.016384]);
}

#[test]
fn varcheck_reports_constraint_classification() {
    let out = run(&["varcheck", "--t", "0.9", "--grid", "16", "--format", "json"]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["nu"]["constraint_active"], serde_json::Value::Bool(true));
}
