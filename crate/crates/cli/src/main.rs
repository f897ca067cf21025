//! `qwmq`: ingest price data, solve knapsack portfolios classically and with
//! the walk-mixer QAOA, and sweep layer or Trotter counts.

mod commands;
mod source;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use qwm_qaoa::driver::DEFAULT_BUDGET;
use qwm_qaoa::Backend;

#[derive(Parser)]
#[command(
    name = "qwmq",
    version,
    about = "Quantum-walk-mixer QAOA for knapsack portfolio selection"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build a knapsack instance from prices or a bundled fixture.
    Ingest {
        #[command(flatten)]
        source: SourceArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Exact classical optimum.
    Bks {
        #[command(flatten)]
        source: SourceArgs,
    },
    /// Optimize the angles, simulate, and write a run report.
    Solve {
        #[command(flatten)]
        source: SourceArgs,
        #[command(flatten)]
        run: RunArgs,
        #[arg(long, default_value_t = 3)]
        p: usize,
        #[arg(long, default_value_t = 3)]
        m: u32,
        /// Sample this many measurements instead of exact probabilities.
        #[arg(long, default_value_t = 0)]
        shots: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// One run per point of a `p` or `m` range, as CSV. Without an instance
    /// source every bundled fixture is swept.
    Sweep {
        #[command(flatten)]
        source: SourceArgs,
        #[command(flatten)]
        run: RunArgs,
        #[arg(long, value_enum)]
        axis: Axis,
        /// Inclusive range such as `1..5`.
        #[arg(long, value_parser = parse_range)]
        range: (u32, u32),
        /// Layer count while sweeping `m`.
        #[arg(long, default_value_t = 3)]
        p: usize,
        /// Trotter steps while sweeping `p`.
        #[arg(long, default_value_t = 3)]
        m: u32,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Summarize a run report JSON or sweep CSV.
    Report { file: PathBuf },
}

#[derive(Args, Default)]
pub struct SourceArgs {
    /// Bundled instance: stocks2 .. stocks8.
    #[arg(long, conflicts_with_all = ["prices", "instance"])]
    pub fixture: Option<String>,
    /// CSV with a `date` column followed by one column per ticker.
    #[arg(long, requires = "tickers", conflicts_with = "instance")]
    pub prices: Option<PathBuf>,
    /// Comma-separated tickers to read from `--prices`.
    #[arg(long, value_delimiter = ',', requires = "prices")]
    pub tickers: Vec<String>,
    /// First date kept (inclusive), YYYY-MM-DD.
    #[arg(long, requires = "prices")]
    pub start: Option<chrono::NaiveDate>,
    /// Last date kept (exclusive), YYYY-MM-DD.
    #[arg(long, requires = "prices")]
    pub end: Option<chrono::NaiveDate>,
    /// Instance JSON as written by `ingest`.
    #[arg(long)]
    pub instance: Option<PathBuf>,
}

#[derive(Args)]
pub struct RunArgs {
    /// Objective evaluations per layer.
    #[arg(long, default_value_t = DEFAULT_BUDGET)]
    pub budget: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Refine all 2p angles together after the layer-wise pass.
    #[arg(long)]
    pub joint_opt: bool,
    #[arg(long, value_enum, default_value_t = BackendArg::Sector)]
    pub backend: BackendArg,
    /// Record wall-clock milliseconds (outputs stop being reproducible).
    #[arg(long)]
    pub timing: bool,
}

#[derive(Clone, Copy, ValueEnum)]
pub enum BackendArg {
    Sector,
    Circuit,
}

impl From<BackendArg> for Backend {
    fn from(b: BackendArg) -> Self {
        match b {
            BackendArg::Sector => Backend::Sector,
            BackendArg::Circuit => Backend::Circuit,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Axis {
    P,
    M,
}

fn parse_range(s: &str) -> Result<(u32, u32), String> {
    let (a, b) = s
        .split_once("..")
        .ok_or_else(|| format!("expected A..B, got {s:?}"))?;
    let a: u32 = a
        .trim()
        .parse()
        .map_err(|e| format!("bad range start: {e}"))?;
    let b: u32 = b
        .trim()
        .trim_start_matches('=')
        .parse()
        .map_err(|e| format!("bad range end: {e}"))?;
    if a == 0 || b < a {
        return Err(format!("range {s:?} must satisfy 1 <= A <= B"));
    }
    Ok((a, b))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Ingest { source, out } => commands::ingest(&source, out.as_deref()),
        Command::Bks { source } => commands::bks(&source),
        Command::Solve {
            source,
            run,
            p,
            m,
            shots,
            out,
        } => commands::solve(&source, &run, p, m, shots, out.as_deref()),
        Command::Sweep {
            source,
            run,
            axis,
            range,
            p,
            m,
            out,
        } => commands::sweep(&source, &run, axis, range, p, m, out.as_deref()),
        Command::Report { file } => commands::report(&file),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
