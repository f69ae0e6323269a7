//! `rfclt` — command-line driver for random-field CLT experiments.
//!
//! Each subcommand runs one experiment from `rfclt-core` and persists its
//! results as a checksummed artifact directory (see [`artifacts`]). Errors
//! are reported as a single JSON object on stderr and mapped to stable exit
//! codes:
//!
//! | code | meaning                                   |
//! |------|-------------------------------------------|
//! | 0    | success                                   |
//! | 2    | command-line usage error (from the parser)|
//! | 3    | configuration violation                   |
//! | 4    | filesystem I/O failure                    |
//! | 5    | computation/module failure                |

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

pub mod artifacts;
pub mod commands;

use artifacts::Format;
use rfclt_core::meixner::Family;
use rfclt_core::CoreError;

/// CLI failure carrying a stable exit code and a machine-readable kind.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    /// Invalid configuration (file schema, parameter domain). Exit 3.
    #[error("{0}")]
    Config(String),
    /// Filesystem failure while reading inputs or writing artifacts. Exit 4.
    #[error("{0}")]
    Io(String),
    /// A computation inside the experiment modules failed. Exit 5.
    #[error("{0}")]
    Module(CoreError),
}

impl From<CoreError> for CliError {
    fn from(e: CoreError) -> Self {
        match e {
            CoreError::Config(msg) => CliError::Config(format!("configuration error: {msg}")),
            other => CliError::Module(other),
        }
    }
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 3,
            CliError::Io(_) => 4,
            CliError::Module(_) => 5,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            CliError::Config(_) => "config",
            CliError::Io(_) => "io",
            CliError::Module(_) => "module",
        }
    }
}

/// Monte Carlo experiments on stationary random fields: simulation,
/// orthogonal-polynomial checks, covariance estimation, and CLT tests.
#[derive(Parser, Debug)]
#[command(name = "rfclt", version, about)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// Output directory (default: $RFCLT_OUT_ROOT/<command>, falling back
    /// to ./artifacts/<command>).
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,

    /// Master seed; overrides `master_seed` from the config file.
    #[arg(long, global = true)]
    pub seed: Option<u64>,

    /// Worker threads for replicate loops (default: all cores). Ignored in
    /// builds without the `parallel` feature.
    #[arg(long, global = true)]
    pub threads: Option<usize>,

    /// Format for tabular artifacts.
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Generate field replicates at the largest configured window and dump
    /// every realization.
    Simulate {
        /// Experiment configuration (JSON).
        #[arg(long)]
        config: PathBuf,
    },
    /// Compare floating-point recurrence coefficients of an orthogonal
    /// polynomial system against the exact-rational moment oracle.
    PolyCheck {
        /// Marginal family of the system.
        #[arg(long, value_enum)]
        family: FamilyArg,
        /// Lévy exponent parameter λ (> 0).
        #[arg(long)]
        lambda: f64,
        /// Second family parameter: Pascal γ ∈ (0,1) or Meixner-CH angle
        /// a ∈ (−π/2, π/2). Defaults: normal/poisson 0, gamma 1.
        #[arg(long)]
        fixed_param: Option<f64>,
        /// Largest polynomial degree to check.
        #[arg(long, default_value_t = 6)]
        nmax: usize,
    },
    /// Estimate the limiting covariance matrix of the configured functions
    /// from replicated fields.
    EstimateCov {
        /// Experiment configuration (JSON).
        #[arg(long)]
        config: PathBuf,
    },
    /// Orthogonalize the configured functions in the estimated covariance
    /// geometry (fails on degenerate directions).
    GramSchmidt {
        /// Experiment configuration (JSON).
        #[arg(long)]
        config: PathBuf,
    },
    /// Replicate the normalized window functional and test each coordinate
    /// for Gaussian limit behaviour.
    CltTest {
        /// Experiment configuration (JSON).
        #[arg(long)]
        config: PathBuf,
    },
    /// Track the variance of the normalized functional across the window
    /// sequence to expose degenerate (collapsing-variance) directions.
    VarianceScan {
        /// Experiment configuration (JSON).
        #[arg(long)]
        config: PathBuf,
    },
    /// Verify that the Lipschitz covering net approximates random
    /// Lipschitz-1 functions within its pitch.
    NetCheck {
        /// Net resolution; the net has 2^(2m) members.
        #[arg(long)]
        m: usize,
        /// Net pitch c (> 0): guaranteed sup-norm error bound on the grid.
        #[arg(long)]
        c: f64,
        /// Number of random test functions.
        #[arg(long, default_value_t = 100)]
        trials: usize,
    },
}

impl Command {
    /// Stable command name, used for default output paths and manifests.
    pub fn name(&self) -> &'static str {
        match self {
            Command::Simulate { .. } => "simulate",
            Command::PolyCheck { .. } => "poly-check",
            Command::EstimateCov { .. } => "estimate-cov",
            Command::GramSchmidt { .. } => "gram-schmidt",
            Command::CltTest { .. } => "clt-test",
            Command::VarianceScan { .. } => "variance-scan",
            Command::NetCheck { .. } => "net-check",
        }
    }
}

/// Clap-facing mirror of [`Family`] (kebab-case values on the command line).
#[derive(ValueEnum, Clone, Copy, Debug)]
pub enum FamilyArg {
    Normal,
    Gamma,
    Poisson,
    Pascal,
    MeixnerCh,
}

impl From<FamilyArg> for Family {
    fn from(f: FamilyArg) -> Family {
        match f {
            FamilyArg::Normal => Family::Normal,
            FamilyArg::Gamma => Family::Gamma,
            FamilyArg::Poisson => Family::Poisson,
            FamilyArg::Pascal => Family::Pascal,
            FamilyArg::MeixnerCh => Family::MeixnerCh,
        }
    }
}

/// Parses arguments, runs the selected command, prints the artifact
/// directory on success, and maps failures to exit codes with a JSON error
/// report on stderr.
pub fn main_entry() -> ExitCode {
    let cli = Cli::parse();
    configure_threads(cli.threads);
    match commands::run(&cli) {
        Ok(dir) => {
            println!("{}", dir.display());
            ExitCode::SUCCESS
        }
        Err(err) => {
            let report = serde_json::json!({
                "error": {
                    "code": err.exit_code(),
                    "kind": err.kind(),
                    "message": err.to_string(),
                }
            });
            eprintln!("{report}");
            ExitCode::from(err.exit_code())
        }
    }
}

#[cfg(feature = "parallel")]
fn configure_threads(threads: Option<usize>) {
    if let Some(n) = threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            // Only fails if a global pool already exists; results are
            // thread-count independent, so carry on.
            log::warn!("could not set thread count to {n}: {e}");
        }
    }
}

#[cfg(not(feature = "parallel"))]
fn configure_threads(threads: Option<usize>) {
    if threads.is_some() {
        log::warn!("--threads has no effect: built without the `parallel` feature");
    }
}
