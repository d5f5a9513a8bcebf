//! `hlars`: least-angle path fits with optional marginality constraints,
//! seeded replication studies, and validation of exported results.
//!
//! Exit codes: 0 success, 1 invariant failure, 2 usage or input problems,
//! 3 numerical failures.

mod commands;
mod error;
mod io;
mod manifest;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use hlars_core::{AlgorithmKind, DesignKind};

use crate::error::CliError;

#[derive(Parser)]
#[command(
    name = "hlars",
    version,
    about = "Least angle regression with marginality constraints"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Fit a path on a CSV data set and export path/correlation tables
    Fit(FitArgs),
    /// Run a seeded replication study and export the selection histogram
    Replicate(ReplicateArgs),
    /// Re-validate exported fit outputs against their source data
    Check(CheckArgs),
    /// Generate a benchmark data set as CSV
    Gen(GenArgs),
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
pub enum DesignArg {
    /// Main effects only
    Main,
    /// Mains plus all squares and pairwise products
    Full,
}

impl DesignArg {
    pub fn kind(self) -> DesignKind {
        match self {
            DesignArg::Main => DesignKind::MainOnly,
            DesignArg::Full => DesignKind::FullSecondOrder,
        }
    }
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
pub enum AlgorithmArg {
    /// Plain least angle regression
    Lars,
    /// Marginality-constrained least angle regression
    Mlars,
}

impl AlgorithmArg {
    pub fn kind(self) -> AlgorithmKind {
        match self {
            AlgorithmArg::Lars => AlgorithmKind::Lars,
            AlgorithmArg::Mlars => AlgorithmKind::ModifiedLars,
        }
    }
}

#[derive(Args)]
pub struct FitArgs {
    /// Input CSV with a header row and numeric columns
    #[arg(long)]
    pub input: PathBuf,
    /// Name of the response column
    #[arg(long, default_value = "Y")]
    pub response: String,
    #[arg(long, value_enum, default_value_t = DesignArg::Main)]
    pub design: DesignArg,
    #[arg(long, value_enum, default_value_t = AlgorithmArg::Lars)]
    pub algorithm: AlgorithmArg,
    /// Dependency structure for mlars: "auto" or a JSON file
    #[arg(long)]
    pub deps: Option<String>,
    /// Output directory for path.csv, corr.csv, manifest.json
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Args)]
pub struct ReplicateArgs {
    /// Simulation model
    #[arg(long, default_value = "model1", value_parser = clap::builder::PossibleValuesParser::new(["model1"]))]
    pub model: String,
    /// Sample size per replication
    #[arg(long, default_value_t = 500)]
    pub n: usize,
    /// Number of replications
    #[arg(long, default_value_t = 1000)]
    pub reps: usize,
    /// Noise standard deviation
    #[arg(long, default_value_t = 0.05)]
    pub noise_sd: f64,
    /// Master seed; per-replication seeds are derived from it
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, value_enum, default_value_t = DesignArg::Main)]
    pub design: DesignArg,
    #[arg(long, value_enum, default_value_t = AlgorithmArg::Lars)]
    pub algorithm: AlgorithmArg,
    /// Keep histogram rows for steps 1..=k only ("none" keeps everything)
    #[arg(long, default_value = "none")]
    pub truncate: String,
    /// Output directory for hist.csv, manifest.json
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Args)]
pub struct CheckArgs {
    /// Directory holding path.csv, corr.csv, manifest.json from a fit run
    #[arg(long)]
    pub dir: PathBuf,
    /// Source data CSV; defaults to the input recorded in the manifest
    #[arg(long)]
    pub input: Option<PathBuf>,
}

#[derive(Args)]
pub struct GenArgs {
    /// Simulation model
    #[arg(long, default_value = "model1", value_parser = clap::builder::PossibleValuesParser::new(["model1"]))]
    pub model: String,
    /// Sample size
    #[arg(long, default_value_t = 500)]
    pub n: usize,
    /// Noise standard deviation
    #[arg(long, default_value_t = 0.05)]
    pub noise_sd: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Output CSV file
    #[arg(long)]
    pub out: PathBuf,
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Fit(args) => commands::fit::run(&args),
        Command::Replicate(args) => commands::replicate::run(&args),
        Command::Check(args) => commands::check::run(&args),
        Command::Gen(args) => commands::gen::run(&args),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{e}");
            ExitCode::from(e.exit_code())
        }
    }
}
