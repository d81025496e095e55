use std::fs;
use std::time::Instant;

use serde_json::Value;
use xyquench_core::dynamics::BoundaryReport;
use xyquench_core::oracle::{self, RingSpec};
use xyquench_core::ModelParams;

use crate::config::{ConfigError, Mode, RunConfig};
use crate::output::{self, Sidecar, Table};
use crate::scan::{self, Pool};

#[derive(Debug, thiserror::Error)]
pub enum RunError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("numerical failure: {0}")]
    Numerical(xyquench_core::Error),
    #[error("{0}")]
    Input(xyquench_core::Error),
    #[error("i/o: {0}")]
    Io(String),
}

impl RunError {
    /// 1 for bad input, 2 for numerical failure, 3 for i/o.
    pub fn exit_code(&self) -> i32 {
        match self {
            RunError::Config(_) | RunError::Input(_) => 1,
            RunError::Numerical(_) => 2,
            RunError::Io(_) => 3,
        }
    }
}

impl From<xyquench_core::Error> for RunError {
    fn from(e: xyquench_core::Error) -> Self {
        if e.is_numerical() {
            RunError::Numerical(e)
        } else {
            RunError::Input(e)
        }
    }
}

/// In-memory result of a run.
#[derive(Debug, Clone)]
pub struct Report {
    pub table: Table,
    pub summary: Value,
    pub workers: usize,
}

impl Report {
    pub fn csv(&self) -> Result<Vec<u8>, RunError> {
        self.table.to_csv().map_err(|e| RunError::Io(e.to_string()))
    }
}

/// Validate `config` and compute its table without touching the disk.
pub fn execute(config: &RunConfig) -> Result<Report, RunError> {
    config.validate()?;
    let pool = Pool::new(config.workers).map_err(|e| RunError::Io(e.to_string()))?;
    let grid = config.grid();
    let spec = config.quadrature_spec();
    let opt = config.optimizer_settings();
    let gammas = config.gammas();
    let lambdas = config.lambdas();

    let (table, summary) = match config.mode {
        Mode::Series => {
            let params = ModelParams::new(config.lambda, config.gamma)?;
            let s = scan::time_series(&pool, &params, config.pair.into(), config.variant.into(), grid, &spec, &opt)?;
            let summary = output::series_summary(std::slice::from_ref(&s));
            (output::series_table(&s), summary)
        }
        Mode::Sweep => {
            let all = scan::sweep(&pool, &gammas, &lambdas, config.pair.into(), config.variant.into(), grid, &spec, &opt)?;
            (output::sweep_table(&all), output::series_summary(&all))
        }
        Mode::Cmax => {
            let curves = gammas
                .iter()
                .map(|&g| scan::cmax_curve(&pool, g, &lambdas, grid, &spec, &opt))
                .collect::<Result<Vec<_>, _>>()?;
            (output::cmax_table(&curves), output::cmax_summary(&curves))
        }
        Mode::Boundary => {
            let mut scans = Vec::new();
            let mut reports = Vec::new();
            for &g in &gammas {
                let zi = scan::zero_intervals(&pool, g, &lambdas, grid, &spec)?;
                let report = BoundaryReport::from_classifier(g, lambdas.clone(), zi.clone()).map_err(|e| e.to_string());
                scans.push((g, lambdas.clone(), zi));
                reports.push((g, report));
            }
            (output::boundary_table(&scans), output::boundary_summary(&reports))
        }
        Mode::NnnScan => {
            let scans = gammas
                .iter()
                .map(|&g| scan::nnn_onset_and_deadband(&pool, g, &lambdas, grid, &spec))
                .collect::<Result<Vec<_>, _>>()?;
            (output::nnn_table(&scans), output::nnn_summary(&scans))
        }
        Mode::OracleCompare => {
            // Sequential: the exact evolution steps forward through the grid.
            let ring = RingSpec::new(config.sites, ModelParams::new(config.lambda, config.gamma)?)?;
            let times: Vec<f64> = grid.times().collect();
            let report = oracle::arbitration_report(&ring, &times, &spec)?;
            (output::oracle_table(&report), output::oracle_summary(&report))
        }
    };
    Ok(Report { table, summary, workers: pool.workers() })
}

/// [`execute`], then write the CSV and its JSON sidecar.
pub fn run(config: &RunConfig) -> Result<Report, RunError> {
    let started = Instant::now();
    let report = execute(config)?;
    let io = |e: std::io::Error| RunError::Io(e.to_string());
    if let Some(dir) = config.out.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(io)?;
    }
    fs::write(&config.out, report.csv()?).map_err(io)?;
    let sidecar = Sidecar::new(config, started.elapsed(), report.workers, report.table.rows.len(), &report.summary);
    let json = serde_json::to_string_pretty(&sidecar).map_err(|e| RunError::Io(e.to_string()))?;
    fs::write(config.sidecar_path(), json + "\n").map_err(io)?;
    Ok(report)
}
