//! `gaplab`: solve for construction parameters, generate sequences, and
//! tabulate partial-sum traces, discrepancies and Monte Carlo ensembles.
//!
//! Exit codes: 0 success, 2 usage or configuration error, 3 I/O error.

mod commands;
mod config;
mod output;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

/// Environment variable overriding the per-invocation stream-element ceiling.
pub const MAX_ELEMENTS_VAR: &str = "GAPLAB_MAX_ELEMENTS";

#[derive(Debug)]
pub enum CliError {
    Config(String),
    Core(gaplab::Error),
    Io { path: PathBuf, source: std::io::Error },
}

impl CliError {
    pub fn io(path: &Path, source: std::io::Error) -> Self {
        Self::Io {
            path: path.to_path_buf(),
            source,
        }
    }

    fn exit_code(&self) -> u8 {
        match self {
            Self::Config(_) | Self::Core(_) => 2,
            Self::Io { .. } => 3,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Self::Config(msg) => write!(f, "configuration error: {msg}"),
            Self::Core(e) => write!(f, "{e}"),
            Self::Io { path, source } => write!(f, "I/O error on {}: {source}", path.display()),
        }
    }
}

impl From<gaplab::Error> for CliError {
    fn from(e: gaplab::Error) -> Self {
        Self::Core(e)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
    Bin,
}

#[derive(Debug, Parser)]
#[command(name = "gaplab", version, about = "Random integer sequences with gaps in {1,2} and prescribed iterated-logarithm constants")]
pub struct Cli {
    /// Selection seed (generate, signs) or master seed overriding the config.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Worker threads for Monte Carlo ensembles.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Directory receiving CSV/JSON outputs and run manifests.
    #[arg(long, global = true, default_value = ".")]
    pub out_dir: PathBuf,
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Smallest block length and selection probability for a target constant.
    Solve(SolveArgs),
    /// Write the sequence values up to a limit.
    Generate(SeqArgs),
    /// Partial sums and normalized ratios at checkpoints.
    Trace(ConfigArgs),
    /// Star and extremal discrepancies of a generated sequence or a point file.
    Disc(DiscArgs),
    /// Ensemble of traces over evaluation points and seeds.
    Mc(ConfigArgs),
    /// The +-1 sign sequence marking membership in the sequence.
    Signs(SeqArgs),
}

#[derive(Debug, Args)]
#[group(required = true, multiple = false)]
pub struct SolveArgs {
    /// Target iterated-logarithm constant.
    #[arg(long, allow_negative_numbers = true)]
    pub lil: Option<f64>,
    /// Target discrepancy constant.
    #[arg(long, allow_negative_numbers = true)]
    pub disc: Option<f64>,
}

#[derive(Debug, Args)]
pub struct SeqArgs {
    /// Block length.
    #[arg(long, conflicts_with = "lil")]
    pub lambda: Option<u64>,
    /// Selection probability.
    #[arg(long, conflicts_with = "lil", required_unless_present = "lil")]
    pub p: Option<f64>,
    /// Solve for (lambda, p) from a target constant instead.
    #[arg(long)]
    pub lil: Option<f64>,
    /// Largest value considered.
    #[arg(long)]
    pub limit: u64,
    /// Output file; standard output when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ConfigArgs {
    /// JSON run configuration, or a manifest from an earlier run.
    #[arg(long)]
    pub config: PathBuf,
}

#[derive(Debug, Args)]
#[group(required = true, multiple = false)]
pub struct DiscArgs {
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Text file with one point in [0, 1) per line.
    #[arg(long)]
    pub points: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match commands::run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("gaplab: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
