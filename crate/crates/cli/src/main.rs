//! `rmtlab`: sample sparse random matrices, measure their spectra, and run
//! reproducible Monte-Carlo campaigns from declarative configs or presets.

// `!(x > 0.0)` guards intentionally reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod commands;
mod config;
mod presets;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use rmtlab_core::error::Error as CoreError;
use rmtlab_core::geometry::LcdParams;

const AFTER_HELP: &str = "\
Config file sections and defaults:
  [ensemble]    n, p (required); dist = \"rademacher\" | \"gaussian\" |
                { kind = \"pareto\", rho } | { kind = \"bernoulli\", mu } |
                { kind = \"constant\", value }  (default rademacher);
                diagonal = \"iid\" (default) | \"zero\"; shift = scalar or
                per-index array (default 0); adjacency = false (default).
  [experiment]  name, trials, statistic (required); master_seed = 0;
                condition_k, eps_grid, sweep = [[n, p], ..], shift_r,
                pattern = { j_cols, jprime_cols, threshold = 1.0 }: optional.
  [lcd]         p (required); delta0 = 0.1; theta_max and grid_step default
                to 400x and 1e-4x the universal lower bound (delta0 p)^-1/2.
  [output]      dir = \".\"; prefix = experiment name.

Exit codes: 0 success, 2 validation error, 3 I/O error, 4 no convergence.";

#[derive(Parser)]
#[command(name = "rmtlab", version, about, after_help = AFTER_HELP)]
struct Cli {
    /// Worker threads for trial execution (0 = all cores).
    #[arg(long, global = true, default_value_t = 0)]
    threads: usize,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sample one matrix from the [ensemble] config and write it in the
    /// coordinate text format.
    Gen {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Overrides the config's master seed.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Print extreme singular values of a matrix file as JSON.
    Spectral {
        matrix: PathBuf,
        /// Relative tolerance of the iterative estimators.
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
        /// Force the full Jacobi SVD instead of the iterative fast path.
        #[arg(long)]
        full_svd: bool,
    },
    /// Run a Monte-Carlo campaign; writes <name>.csv and
    /// <name>.summary.json under --out (a .FAILED marker on error).
    Experiment {
        /// Campaign config (TOML). Exactly one of --config/--preset.
        #[arg(long, conflicts_with = "preset")]
        config: Option<PathBuf>,
        /// Built-in campaign: thm1.1, thm1.2ii, thm1.4, thm1.7, zero-row.
        #[arg(long)]
        preset: Option<String>,
        #[arg(long, default_value = ".")]
        out: PathBuf,
        /// Overrides the campaign's master seed.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Grid-certified least common denominator of a unit-vector file
    /// (one coordinate per line).
    Lcd {
        vector: PathBuf,
        /// Sparsity probability entering the detection threshold
        /// (required unless a --config [lcd] section provides it).
        #[arg(long)]
        p: Option<f64>,
        /// Config file whose [lcd] section supplies defaults.
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        delta0: Option<f64>,
        /// Search cap (default: 400x the universal lower bound).
        #[arg(long)]
        theta_max: Option<f64>,
        /// Scan step (default: 1e-4x the universal lower bound).
        #[arg(long)]
        grid_step: Option<f64>,
    },
}

/// CLI-level error with an exit-code triage.
#[derive(Debug)]
pub enum CliError {
    Validation(String),
    Io(String),
    NonConvergence(String),
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Validation(m) | CliError::Io(m) | CliError::NonConvergence(m) => {
                write!(f, "{m}")
            }
        }
    }
}

impl From<CoreError> for CliError {
    fn from(e: CoreError) -> Self {
        match e {
            CoreError::Io(inner) => CliError::Io(inner.to_string()),
            CoreError::NonConvergence(_) => CliError::NonConvergence(e.to_string()),
            _ => CliError::Validation(e.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Validation(_) => 2,
            CliError::Io(_) => 3,
            CliError::NonConvergence(_) => 4,
        }
    }
}

fn configure_threads(threads: usize) {
    #[cfg(feature = "parallel")]
    if threads > 0 {
        if let Err(e) =
            rayon::ThreadPoolBuilder::new().num_threads(threads).build_global()
        {
            eprintln!("warning: thread pool already initialized ({e})");
        }
    }
    #[cfg(not(feature = "parallel"))]
    if threads > 1 {
        eprintln!("warning: built without the parallel feature; running single-threaded");
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    configure_threads(cli.threads);
    match cli.command {
        Command::Gen { config, out, seed } => commands::cmd_gen(&config, &out, seed),
        Command::Spectral { matrix, tol, full_svd } => {
            commands::cmd_spectral(&matrix, tol, full_svd)
        }
        Command::Experiment { config, preset, out, seed } => {
            let (mut spec, out_dir, prefix) = match (config, preset) {
                (Some(path), None) => {
                    let doc = config::ConfigDocument::load(&path)?;
                    let spec = doc.experiment_spec()?;
                    let output = doc.output.as_ref();
                    let dir = output
                        .and_then(|o| o.dir.clone())
                        .map(PathBuf::from)
                        .unwrap_or(out);
                    (spec, dir, output.and_then(|o| o.prefix.clone()))
                }
                (None, Some(name)) => (presets::preset(&name)?, out, None),
                _ => {
                    return Err(CliError::Validation(
                        "experiment needs exactly one of --config or --preset".into(),
                    ))
                }
            };
            if let Some(s) = seed {
                spec.master_seed = s;
            }
            let outcome = commands::cmd_experiment(&spec, &out_dir, prefix.as_deref())?;
            eprintln!(
                "wrote {} and {}",
                outcome.csv_path.display(),
                outcome.json_path.display()
            );
            Ok(())
        }
        Command::Lcd { vector, p, config, delta0, theta_max, grid_step } => {
            let from_config = match &config {
                Some(path) => config::ConfigDocument::load(path)?.lcd_params()?,
                None => None,
            };
            let p = p.or(from_config.as_ref().map(|c| c.p)).ok_or_else(|| {
                CliError::Validation("lcd needs --p or a --config [lcd] section".into())
            })?;
            if !(p > 0.0 && p <= 1.0) {
                return Err(CliError::Validation(format!("p must be in (0, 1], got {p}")));
            }
            let mut params = LcdParams::for_sparsity(p);
            params.delta0 = delta0
                .or(from_config.as_ref().map(|c| c.delta0))
                .unwrap_or(params.delta0);
            // Defaults track delta0 through the universal bound.
            let theta_min = params.universal_lower_bound();
            params.theta_max = theta_max
                .or(from_config.as_ref().map(|c| c.theta_max))
                .unwrap_or(400.0 * theta_min);
            params.grid_step = grid_step
                .or(from_config.as_ref().map(|c| c.grid_step))
                .unwrap_or(1e-4 * theta_min);
            params.validate().map_err(CliError::from)?;
            commands::cmd_lcd(&vector, params)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
