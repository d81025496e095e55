//! Run configuration, validated in full before any computation starts.

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use xyquench_core::dynamics::{self, TimeGrid};
use xyquench_core::oracle::MAX_ED_SITES;
use xyquench_core::{ModelParams, OptimizerSettings, Pair, QuadratureSpec, Variant};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    /// Measures and matrix elements along one time series.
    Series,
    /// Measures on a (γ, λ, t) grid.
    Sweep,
    /// First maximum of the nearest-pair classical correlation versus λ.
    Cmax,
    /// Longest zero-concurrence interval versus λ and the sudden-death boundary.
    Boundary,
    /// Next-nearest entanglement onset times and dead bands.
    NnnScan,
    /// Thermodynamic-limit matrices against exact diagonalization of a ring.
    OracleCompare,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum PairArg {
    Nn,
    Nnn,
}

impl From<PairArg> for Pair {
    fn from(p: PairArg) -> Self {
        match p {
            PairArg::Nn => Pair::Nearest,
            PairArg::Nnn => Pair::NextNearest,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum VariantArg {
    Wick,
    Printed,
}

impl From<VariantArg> for Variant {
    fn from(v: VariantArg) -> Self {
        match v {
            VariantArg::Wick => Variant::WickDerived,
            VariantArg::Printed => Variant::AsPrinted,
        }
    }
}

/// Inclusive `start:stop:step` grid.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Range {
    pub start: f64,
    pub stop: f64,
    pub step: f64,
}

impl Range {
    pub fn values(&self) -> Vec<f64> {
        dynamics::uniform_grid(self.start, self.stop, self.step).unwrap_or_default()
    }
}

impl FromStr for Range {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let parts: Vec<&str> = s.split(':').collect();
        let [a, b, c] = parts[..] else {
            return Err(format!("expected start:stop:step, got `{s}`"));
        };
        let num = |x: &str| x.trim().parse::<f64>().map_err(|e| format!("`{x}`: {e}"));
        Ok(Self { start: num(a)?, stop: num(b)?, step: num(c)? })
    }
}

impl fmt::Display for Range {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}:{}", self.start, self.stop, self.step)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QuadratureConfig {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub min_panels: usize,
    pub max_panels: usize,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        let q = QuadratureSpec::default();
        Self { rel_tol: q.rel_tol, abs_tol: q.abs_tol, min_panels: q.min_panels, max_panels: q.max_panels }
    }
}

impl From<QuadratureConfig> for QuadratureSpec {
    fn from(q: QuadratureConfig) -> Self {
        Self {
            rel_tol: q.rel_tol,
            abs_tol: q.abs_tol,
            min_panels: q.min_panels,
            max_panels: q.max_panels,
            ..QuadratureSpec::default()
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OptimizerConfig {
    pub theta_points: usize,
    pub phi_points: usize,
    pub starts: usize,
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        let o = OptimizerSettings::default();
        Self { theta_points: o.theta_points, phi_points: o.phi_points, starts: o.starts, tol: o.tol, max_iter: o.max_iter }
    }
}

impl From<OptimizerConfig> for OptimizerSettings {
    fn from(o: OptimizerConfig) -> Self {
        Self { theta_points: o.theta_points, phi_points: o.phi_points, starts: o.starts, tol: o.tol, max_iter: o.max_iter }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub mode: Mode,
    pub lambda: f64,
    pub gamma: f64,
    /// Coupling grid for the scanning modes.
    pub lambda_range: Option<Range>,
    /// Anisotropies for the scanning modes; empty means `[gamma]`.
    #[serde(default)]
    pub gamma_list: Vec<f64>,
    pub pair: PairArg,
    pub variant: VariantArg,
    pub t_max: f64,
    pub dt: f64,
    #[serde(default)]
    pub quadrature: QuadratureConfig,
    #[serde(default)]
    pub optimizer: OptimizerConfig,
    /// Ring length for `oracle-compare`.
    pub sites: usize,
    /// CSV path; the sidecar goes next to it with a `.json` extension.
    pub out: PathBuf,
    pub workers: usize,
    /// Reserved. Every algorithm here is deterministic.
    #[serde(default)]
    pub seed: Option<u64>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            mode: Mode::Series,
            lambda: 1.0,
            gamma: 1.0,
            lambda_range: None,
            gamma_list: Vec::new(),
            pair: PairArg::Nn,
            variant: VariantArg::Wick,
            t_max: 10.0,
            dt: 0.01,
            quadrature: QuadratureConfig::default(),
            optimizer: OptimizerConfig::default(),
            sites: MAX_ED_SITES,
            out: PathBuf::from("xyquench.csv"),
            workers: 1,
            seed: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[error("invalid `{field}`: {reason}")]
pub struct ConfigError {
    pub field: String,
    pub reason: String,
}

fn bad(field: &str, reason: impl Into<String>) -> ConfigError {
    ConfigError { field: field.to_owned(), reason: reason.into() }
}

fn from_core(e: xyquench_core::Error) -> ConfigError {
    match e {
        xyquench_core::Error::InvalidParameter { field, reason } => bad(field, reason),
        other => bad("config", other.to_string()),
    }
}

impl RunConfig {
    pub fn sidecar_path(&self) -> PathBuf {
        self.out.with_extension("json")
    }

    pub fn gammas(&self) -> Vec<f64> {
        if self.gamma_list.is_empty() {
            vec![self.gamma]
        } else {
            self.gamma_list.clone()
        }
    }

    pub fn lambdas(&self) -> Vec<f64> {
        self.lambda_range.map(|r| r.values()).unwrap_or_default()
    }

    pub fn grid(&self) -> TimeGrid {
        TimeGrid { t_max: self.t_max, dt: self.dt }
    }

    pub fn quadrature_spec(&self) -> QuadratureSpec {
        self.quadrature.into()
    }

    pub fn optimizer_settings(&self) -> OptimizerSettings {
        self.optimizer.into()
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.workers == 0 {
            return Err(bad("workers", "must be at least 1"));
        }
        TimeGrid::new(self.t_max, self.dt).map_err(from_core)?;
        self.quadrature_spec().validate().map_err(|e| {
            let mut err = from_core(e);
            err.field = format!("quadrature.{}", err.field);
            err
        })?;
        self.optimizer_settings().validate().map_err(|e| {
            let mut err = from_core(e);
            err.field = format!("optimizer.{}", err.field);
            err
        })?;
        if self.out.extension().is_some_and(|e| e == "json") {
            return Err(bad("out", "must not end in .json, which is reserved for the sidecar"));
        }

        match self.mode {
            Mode::Series => {
                ModelParams::new(self.lambda, self.gamma).map_err(from_core)?;
            }
            Mode::OracleCompare => {
                ModelParams::new(self.lambda, self.gamma).map_err(from_core)?;
                if self.sites < 4 || !self.sites.is_multiple_of(2) || self.sites > MAX_ED_SITES {
                    return Err(bad("sites", format!("must be even and in [4, {MAX_ED_SITES}]")));
                }
            }
            Mode::Sweep | Mode::Cmax | Mode::Boundary | Mode::NnnScan => {
                self.validate_scan()?;
            }
        }
        Ok(())
    }

    fn validate_scan(&self) -> Result<(), ConfigError> {
        let range = self.lambda_range.ok_or_else(|| bad("lambda_range", "required by this mode"))?;
        if ![range.start, range.stop, range.step].iter().all(|x| x.is_finite()) {
            return Err(bad("lambda_range", "bounds and step must be finite"));
        }
        dynamics::uniform_grid(range.start, range.stop, range.step).map_err(|e| bad("lambda_range", from_core(e).reason))?;
        if range.start < 0.0 {
            return Err(bad("lambda_range", "couplings must be non-negative"));
        }
        if self.mode == Mode::Boundary && range.values().len() < 2 {
            return Err(bad("lambda_range", "boundary needs at least two couplings"));
        }
        for &g in &self.gammas() {
            let ok = if self.mode == Mode::Cmax { g > 0.0 && g <= 1.0 } else { (0.0..=1.0).contains(&g) };
            if !ok {
                let field = if self.gamma_list.is_empty() { "gamma" } else { "gamma_list" };
                let allowed = if self.mode == Mode::Cmax { "(0, 1]" } else { "[0, 1]" };
                return Err(bad(field, format!("{g} lies outside {allowed}")));
            }
        }
        Ok(())
    }
}
