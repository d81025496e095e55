use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use xyquench::output::config_from_json;
use xyquench::{run, Mode, PairArg, Range, RunConfig, VariantArg};

/// Post-quench correlations of neighbouring spins in the transverse-field XY chain.
///
/// Flags override values loaded with --config, which override the defaults.
#[derive(Parser, Debug)]
#[command(version, about, allow_negative_numbers = true)]
struct Cli {
    /// Re-run from a JSON sidecar (or a bare config object).
    #[arg(long, value_name = "PATH")]
    config: Option<PathBuf>,

    #[arg(long, value_enum)]
    mode: Option<Mode>,

    #[arg(long)]
    lambda: Option<f64>,

    #[arg(long)]
    gamma: Option<f64>,

    /// Coupling grid for scans, e.g. 0.5:1.5:0.01.
    #[arg(long, value_name = "A:B:STEP")]
    lambda_range: Option<Range>,

    /// Comma-separated anisotropies for scans.
    #[arg(long, value_delimiter = ',', num_args = 1..)]
    gamma_list: Option<Vec<f64>>,

    #[arg(long, value_enum)]
    pair: Option<PairArg>,

    /// Next-nearest matrix element convention.
    #[arg(long, value_enum)]
    variant: Option<VariantArg>,

    #[arg(long)]
    tmax: Option<f64>,

    #[arg(long)]
    dt: Option<f64>,

    /// Relative tolerance of the momentum integrals.
    #[arg(long)]
    tol: Option<f64>,

    /// Ring length for oracle-compare.
    #[arg(long)]
    sites: Option<usize>,

    /// CSV output; the sidecar is written next to it as .json.
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,

    #[arg(long, value_name = "N")]
    workers: Option<usize>,

    /// Reserved; all algorithms are deterministic.
    #[arg(long)]
    seed: Option<u64>,
}

impl Cli {
    fn into_config(self) -> Result<RunConfig, String> {
        let mut c = match &self.config {
            Some(path) => {
                let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
                config_from_json(&text).map_err(|e| format!("invalid `config` ({}): {e}", path.display()))?
            }
            None => RunConfig::default(),
        };
        macro_rules! set {
            ($($flag:ident => $field:expr),* $(,)?) => {
                $(if let Some(v) = self.$flag { $field = v; })*
            };
        }
        set! {
            mode => c.mode,
            lambda => c.lambda,
            gamma => c.gamma,
            gamma_list => c.gamma_list,
            pair => c.pair,
            variant => c.variant,
            tmax => c.t_max,
            dt => c.dt,
            tol => c.quadrature.rel_tol,
            sites => c.sites,
            out => c.out,
            workers => c.workers,
        }
        if self.lambda_range.is_some() {
            c.lambda_range = self.lambda_range;
        }
        if self.seed.is_some() {
            c.seed = self.seed;
        }
        Ok(c)
    }
}

fn main() -> ExitCode {
    // Usage errors are input errors: exit 1, keeping 2 for numerical failures.
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if e.use_stderr() => {
            let _ = e.print();
            return ExitCode::from(1);
        }
        Err(e) => e.exit(),
    };
    let config = match cli.into_config() {
        Ok(c) => c,
        Err(msg) => {
            eprintln!("error: {msg}");
            return ExitCode::from(1);
        }
    };
    match run(&config) {
        Ok(report) => {
            println!("wrote {} ({} rows) and {}", config.out.display(), report.table.rows.len(), config.sidecar_path().display());
            println!("{}", report.summary);
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
