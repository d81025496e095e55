//! CSV tables and the JSON sidecar.
//!
//! Every float is rendered as `{:.16e}` (17 significant digits, round-trips
//! exactly), so identical inputs give byte-identical files.

use std::time::Duration;

use serde::Serialize;
use serde_json::{json, Value};
use xyquench_core::dynamics::{BoundaryReport, CmaxCurve, NnnScan, TimeSeries};
use xyquench_core::oracle::ArbitrationReport;

use crate::config::RunConfig;

pub const SERIES_COLUMNS: [&str; 12] = [
    "t", "concurrence", "discord", "classical", "r11", "r22", "r33", "r44", "re_r14", "im_r14", "re_r23", "im_r23",
];

pub fn num(x: f64) -> String {
    // `+ 0.0` folds -0 into 0 so signless zeros print one way.
    format!("{:.16e}", x + 0.0)
}

fn opt_num(x: Option<f64>) -> String {
    x.map(num).unwrap_or_default()
}

/// Rows of strings plus a header, written RFC 4180 style.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    fn new(header: &[&str]) -> Self {
        Self { header: header.iter().map(|s| s.to_string()).collect(), rows: Vec::new() }
    }

    pub fn to_csv(&self) -> Result<Vec<u8>, csv::Error> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.header)?;
        for row in &self.rows {
            w.write_record(row)?;
        }
        w.into_inner().map_err(|e| e.into_error().into())
    }
}

fn series_cells(s: &TimeSeries) -> impl Iterator<Item = Vec<String>> + '_ {
    s.times().zip(s.states.iter().zip(&s.values)).map(|(t, (x, v))| {
        vec![
            num(t),
            num(v.concurrence),
            num(v.discord),
            num(v.classical),
            num(x.r11),
            num(x.r22),
            num(x.r33),
            num(x.r44),
            num(x.r14.re),
            num(x.r14.im),
            num(x.r23.re),
            num(x.r23.im),
        ]
    })
}

pub fn series_table(s: &TimeSeries) -> Table {
    let mut table = Table::new(&SERIES_COLUMNS);
    table.rows.extend(series_cells(s));
    table
}

pub fn sweep_table(all: &[TimeSeries]) -> Table {
    let mut header = vec!["gamma", "lambda"];
    header.extend(SERIES_COLUMNS);
    let mut table = Table::new(&header);
    for s in all {
        let (g, l) = (num(s.params.gamma()), num(s.params.lambda()));
        table.rows.extend(series_cells(s).map(|cells| {
            let mut row = vec![g.clone(), l.clone()];
            row.extend(cells);
            row
        }));
    }
    table
}

pub fn cmax_table(curves: &[CmaxCurve]) -> Table {
    let mut table = Table::new(&["gamma", "lambda", "found", "t_star", "c_max"]);
    for c in curves {
        for p in &c.points {
            let found = p.peak.found;
            table.rows.push(vec![
                num(c.gamma),
                num(p.lambda),
                u8::from(found).to_string(),
                opt_num(found.then_some(p.peak.t_star)),
                opt_num(found.then_some(p.peak.value)),
            ]);
        }
    }
    table
}

pub fn boundary_table(scans: &[(f64, Vec<f64>, Vec<f64>)]) -> Table {
    let mut table = Table::new(&["gamma", "lambda", "zero_interval"]);
    for (g, lambdas, zi) in scans {
        for (l, z) in lambdas.iter().zip(zi) {
            table.rows.push(vec![num(*g), num(*l), num(*z)]);
        }
    }
    table
}

/// Empty `onset` means no next-nearest entanglement within the horizon.
pub fn nnn_table(scans: &[NnnScan]) -> Table {
    let mut table = Table::new(&["gamma", "lambda", "onset"]);
    for s in scans {
        for (l, o) in s.lambdas.iter().zip(&s.onsets) {
            table.rows.push(vec![num(s.gamma), num(*l), opt_num(*o)]);
        }
    }
    table
}

pub fn oracle_table(r: &ArbitrationReport) -> Table {
    let mut table = Table::new(&["t", "dev_nearest", "dev_nnn_wick", "dev_nnn_printed"]);
    for row in &r.rows {
        table.rows.push(vec![num(row.t), num(row.nearest), num(row.wick_derived), num(row.as_printed)]);
    }
    table
}

pub fn cmax_summary(curves: &[CmaxCurve]) -> Value {
    let entries: Vec<Value> = curves
        .iter()
        .map(|c| {
            let best = c.lambda_star.and_then(|ls| c.points.iter().find(|p| p.lambda == ls));
            json!({
                "gamma": c.gamma,
                "lambda_star": c.lambda_star,
                "c_max": best.map(|p| p.peak.value),
                "t_star": best.map(|p| p.peak.t_star),
            })
        })
        .collect();
    json!({ "cmax": entries })
}

/// `Err` entries carry the reason no boundary could be located.
pub fn boundary_summary(reports: &[(f64, Result<BoundaryReport, String>)]) -> Value {
    let entries: Vec<Value> = reports
        .iter()
        .map(|(g, r)| match r {
            Ok(b) => json!({ "gamma": g, "lambda_b": b.lambda_b, "uncertainty": b.uncertainty }),
            Err(reason) => json!({ "gamma": g, "lambda_b": null, "note": reason }),
        })
        .collect();
    json!({ "boundary": entries })
}

pub fn nnn_summary(scans: &[NnnScan]) -> Value {
    let entries: Vec<Value> = scans
        .iter()
        .map(|s| {
            let delayed: Vec<[f64; 2]> = s.delayed_onsets().map(|(l, t)| [l, t]).collect();
            json!({
                "gamma": s.gamma,
                "dead_bands": s.dead_bands.iter().map(|&(a, b)| [a, b]).collect::<Vec<_>>(),
                "delayed_onsets": delayed,
            })
        })
        .collect();
    json!({ "nnn": entries })
}

pub fn oracle_summary(r: &ArbitrationReport) -> Value {
    json!({
        "sites": r.sites,
        "max_dev_nearest": r.max_nearest,
        "max_dev_nnn_wick": r.max_wick_derived,
        "max_dev_nnn_printed": r.max_as_printed,
    })
}

pub fn series_summary(all: &[TimeSeries]) -> Value {
    let peak = |f: fn(&TimeSeries) -> Vec<f64>| {
        all.iter().flat_map(f).fold(0.0_f64, f64::max)
    };
    json!({
        "series": all.len(),
        "max_concurrence": peak(TimeSeries::concurrence),
        "max_discord": peak(TimeSeries::discord),
        "max_classical": peak(TimeSeries::classical),
    })
}

#[derive(Debug, Serialize)]
pub struct Sidecar<'a> {
    pub config: &'a RunConfig,
    pub version: &'static str,
    pub wall_clock_seconds: f64,
    pub workers: usize,
    pub rows: usize,
    pub summary: &'a Value,
}

impl<'a> Sidecar<'a> {
    pub fn new(config: &'a RunConfig, wall: Duration, workers: usize, rows: usize, summary: &'a Value) -> Self {
        Self { config, version: env!("CARGO_PKG_VERSION"), wall_clock_seconds: wall.as_secs_f64(), workers, rows, summary }
    }
}

/// Accepts either a sidecar (config under `"config"`) or a bare config.
pub fn config_from_json(text: &str) -> serde_json::Result<RunConfig> {
    let value: Value = serde_json::from_str(text)?;
    match value.get("config") {
        Some(inner) => serde_json::from_value(inner.clone()),
        None => serde_json::from_value(value),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn numbers_round_trip_with_17_digits() {
        for x in [0.1, 1.0 / 3.0, 2.5e-300, 123456.789, f64::MIN_POSITIVE] {
            let s = num(x);
            assert_eq!(s.parse::<f64>().unwrap(), x);
            let mantissa = s.split('e').next().unwrap().replace(['.', '-'], "");
            assert_eq!(mantissa.len(), 17, "{s}");
        }
        assert_eq!(num(-0.0), num(0.0));
    }

    #[test]
    fn csv_has_header_and_rows() {
        let mut t = Table::new(&["a", "b"]);
        t.rows.push(vec![num(1.0), String::new()]);
        assert_eq!(String::from_utf8(t.to_csv().unwrap()).unwrap(), "a,b\n1.0000000000000000e0,\n");
    }

    #[test]
    fn sidecar_and_bare_configs_load() {
        let c = RunConfig::default();
        let summary = json!({});
        let side = serde_json::to_string(&Sidecar::new(&c, Duration::from_millis(5), 1, 0, &summary)).unwrap();
        assert_eq!(config_from_json(&side).unwrap(), c);
        assert_eq!(config_from_json(&serde_json::to_string(&c).unwrap()).unwrap(), c);
    }
}
