//! End-to-end runs of the binary.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn xyquench(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_xyquench")).args(args).output().expect("binary runs")
}

fn read_csv(path: &Path) -> (Vec<String>, Vec<Vec<String>>) {
    let mut r = csv::Reader::from_path(path).unwrap();
    let header = r.headers().unwrap().iter().map(str::to_owned).collect();
    let rows = r.records().map(|rec| rec.unwrap().iter().map(str::to_owned).collect()).collect();
    (header, rows)
}

fn sidecar(path: &Path) -> serde_json::Value {
    serde_json::from_str(&fs::read_to_string(path.with_extension("json")).unwrap()).unwrap()
}

#[test]
fn xx_series_is_identically_zero() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("xx.csv");
    let o = xyquench(&["--mode", "series", "--lambda", "0.5", "--gamma", "0", "--tmax", "5", "--dt", "0.1", "--out", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let (header, rows) = read_csv(&out);
    assert_eq!(header[..4], ["t", "concurrence", "discord", "classical"]);
    assert_eq!(header.len(), 12);
    assert_eq!(rows.len(), 51);
    for row in &rows {
        for cell in &row[1..4] {
            assert_eq!(cell.parse::<f64>().unwrap(), 0.0);
        }
        assert_eq!(row[4].parse::<f64>().unwrap(), 1.0);
    }
}

#[test]
fn cmax_peaks_near_critical_coupling() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("cmax.csv");
    let o = xyquench(&[
        "--mode", "cmax", "--gamma", "1", "--lambda-range", "0.5:1.5:0.05", "--tmax", "4", "--workers", "2",
        "--out", out.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let (header, rows) = read_csv(&out);
    assert_eq!(header, ["gamma", "lambda", "found", "t_star", "c_max"]);
    let best = rows
        .iter()
        .filter(|r| r[2] == "1")
        .max_by(|a, b| a[4].parse::<f64>().unwrap().total_cmp(&b[4].parse::<f64>().unwrap()))
        .unwrap();
    let lambda: f64 = best[1].parse().unwrap();
    assert!((0.9..=1.1).contains(&lambda), "argmax at {lambda}");
    assert_eq!(sidecar(&out)["summary"]["cmax"][0]["lambda_star"].as_f64(), Some(lambda));
}

#[test]
fn sidecar_reproduces_the_csv() {
    let dir = tempfile::tempdir().unwrap();
    let first = dir.path().join("a.csv");
    let o = xyquench(&[
        "--mode", "sweep", "--lambda-range", "0.8:1.0:0.1", "--gamma-list", "0.5,1", "--pair", "nnn", "--tmax", "0.5",
        "--dt", "0.1", "--tol", "1e-11", "--out", first.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let meta = sidecar(&first);
    assert_eq!(meta["config"]["quadrature"]["rel_tol"].as_f64(), Some(1e-11));
    assert_eq!(meta["version"], env!("CARGO_PKG_VERSION"));
    assert!(meta["wall_clock_seconds"].as_f64().unwrap() >= 0.0);

    let second = dir.path().join("b.csv");
    let o = xyquench(&[
        "--config", first.with_extension("json").to_str().unwrap(), "--workers", "3", "--out", second.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(fs::read(&first).unwrap(), fs::read(&second).unwrap());
    assert_eq!(read_csv(&second).1.len(), 2 * 3 * 6);
}

#[test]
fn oracle_compare_reports_each_variant() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("oracle.csv");
    let o = xyquench(&[
        "--mode", "oracle-compare", "--lambda", "1.2", "--gamma", "1", "--sites", "10", "--tmax", "1.5", "--dt", "0.1",
        "--out", out.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let (header, rows) = read_csv(&out);
    assert_eq!(header, ["t", "dev_nearest", "dev_nnn_wick", "dev_nnn_printed"]);
    assert_eq!(rows.len(), 16);
    let s = &sidecar(&out)["summary"];
    assert_eq!(s["sites"], 10);
    assert!(s["max_dev_nnn_wick"].as_f64().unwrap() < 0.05);
    assert!(s["max_dev_nnn_printed"].as_f64().unwrap() > s["max_dev_nnn_wick"].as_f64().unwrap());
}

#[test]
fn boundary_and_nnn_modes_summarize() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("b.csv");
    let o = xyquench(&[
        "--mode", "boundary", "--gamma-list", "0,1", "--lambda-range", "0.7:1.0:0.1", "--tmax", "10", "--dt", "0.05",
        "--out", out.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let b = &sidecar(&out)["summary"]["boundary"];
    assert!(b[0]["lambda_b"].is_null());
    assert!(b[1]["lambda_b"].as_f64().is_some());

    let out = dir.path().join("n.csv");
    let o = xyquench(&[
        "--mode", "nnn-scan", "--gamma", "1", "--lambda-range", "0.6:1.0:0.2", "--tmax", "5", "--dt", "0.05",
        "--out", out.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let (_, rows) = read_csv(&out);
    assert_eq!(rows.len(), 3);
    assert!(sidecar(&out)["summary"]["nnn"][0]["dead_bands"].is_array());
}

#[test]
fn invalid_input_exits_1_naming_the_field() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("x.csv");
    let cases: [(&[&str], &str); 4] = [
        (&["--gamma", "1.5"], "gamma"),
        (&["--dt", "-0.1"], "dt"),
        (&["--mode", "cmax"], "lambda_range"),
        (&["--mode", "oracle-compare", "--sites", "14"], "sites"),
    ];
    for (args, field) in cases {
        let mut all = args.to_vec();
        all.extend(["--out", out.to_str().unwrap()]);
        let o = xyquench(&all);
        assert_eq!(o.status.code(), Some(1), "{args:?}");
        let err = String::from_utf8_lossy(&o.stderr);
        assert!(err.contains(&format!("`{field}`")), "{args:?}: {err}");
    }
    assert!(!out.exists());
}

#[test]
fn non_convergence_exits_2_naming_the_point() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("cfg.json");
    let out = dir.path().join("x.csv");
    let json = serde_json::json!({
        "mode": "series", "lambda": 1.0, "gamma": 1.0, "lambda_range": null, "pair": "nn", "variant": "wick",
        "t_max": 1.0, "dt": 0.5, "sites": 12, "out": out, "workers": 1,
        "quadrature": { "rel_tol": 1e-16, "abs_tol": 1e-300, "min_panels": 64, "max_panels": 64 },
    });
    fs::write(&config, json.to_string()).unwrap();
    let o = xyquench(&["--config", config.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("lambda=1") && err.contains("t=0.5") && err.contains("contraction integrals"), "{err}");
}
