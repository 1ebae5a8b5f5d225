//! `coocscale` command-line tool.
//!
//! Exit codes: 0 success, 1 configuration error, 2 I/O error, 3 dimension
//! error.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use coocscale::{CoocMode, Fallback, Method};

mod commands;

#[derive(Debug, Parser)]
#[command(name = "coocscale", version, about = "Co-occurrence guided image downscaling")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Downscale one image.
    Downscale(CommonArgs),
    /// Run every method at the same factor and write a quality report.
    Compare(CommonArgs),
    /// Time guide construction, learning and filtering on random planes.
    Bench(BenchArgs),
    /// Learn the co-occurrence table and report its kernel properties.
    Diagnose(CommonArgs),
}

#[derive(Debug, Args)]
pub struct CommonArgs {
    #[arg(short, long)]
    pub input: Option<PathBuf>,

    /// Output file (downscale) or directory (compare, diagnose).
    #[arg(short, long)]
    pub output: Option<PathBuf>,

    /// Integer downscale factor per axis.
    #[arg(short = 'd', long = "factor", default_value_t = 2)]
    pub factor: usize,

    /// Co-occurrence window radius; defaults to the factor.
    #[arg(short = 'k', long = "radius")]
    pub radius: Option<usize>,

    /// Guide smoothing in output pixels; 0 disables it.
    #[arg(long, default_value_t = 0.5)]
    pub sigma: f64,

    #[arg(long, default_value = "cooc")]
    pub method: Method,

    /// input-pairs or guide-indexed.
    #[arg(long, default_value = "input-pairs")]
    pub mode: CoocMode,

    /// guide-value or uniform-mean.
    #[arg(long, default_value = "guide-value")]
    pub fallback: Fallback,

    /// Center-crop to the largest multiple of the factor.
    #[arg(long)]
    pub crop: bool,

    /// Report path; `.json` selects JSON, anything else CSV.
    #[arg(long)]
    pub report: Option<PathBuf>,

    /// Suppress key=value output.
    #[arg(short, long)]
    pub quiet: bool,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    /// Comma-separated side lengths of the square test planes.
    #[arg(long, value_delimiter = ',', default_value = "256,512")]
    pub sizes: Vec<usize>,

    /// Comma-separated window radii; defaults to the factor.
    #[arg(long, value_delimiter = ',')]
    pub radii: Vec<usize>,

    #[arg(short = 'd', long = "factor", default_value_t = 2)]
    pub factor: usize,

    #[arg(long, default_value_t = 0.5)]
    pub sigma: f64,

    #[arg(long, default_value_t = 5)]
    pub repeats: usize,

    #[arg(long, default_value_t = 0x5eed)]
    pub seed: u64,

    /// CSV output path; CSV goes to stdout when absent.
    #[arg(long)]
    pub report: Option<PathBuf>,

    #[arg(short, long)]
    pub quiet: bool,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            let _ = err.print();
            return if err.use_stderr() {
                ExitCode::from(commands::EXIT_CONFIG)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match commands::run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(err.exit_code())
        }
    }
}
