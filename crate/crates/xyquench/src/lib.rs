//! Front end for `xyquench-core`: run configuration, a worker pool for the
//! λ/γ/t scans, and deterministic CSV output with a JSON sidecar.
//!
//! ```no_run
//! use xyquench::{run, Mode, Range, RunConfig};
//!
//! let config = RunConfig {
//!     mode: Mode::Cmax,
//!     gamma: 1.0,
//!     lambda_range: Some(Range { start: 0.5, stop: 1.5, step: 0.01 }),
//!     out: "cmax.csv".into(),
//!     workers: 8,
//!     ..RunConfig::default()
//! };
//! let report = run(&config).unwrap();
//! println!("{}", report.summary);
//! ```

pub mod config;
pub mod output;
mod run;
pub mod scan;

pub use config::{ConfigError, Mode, PairArg, Range, RunConfig, VariantArg};
pub use run::{execute, run, Report, RunError};
