//! `robust-contracts`: solves and verifies robust contract design instances.

mod commands;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use thiserror::Error;

use robust_contracts::ContractError;

const LONG_ABOUT: &str = "\
Solves and verifies robust contract design instances.

Input files are JSON documents with a top-level \"kind\":

  {\"kind\": \"single\", \"actions\": [{\"outcomes\": [[y, p], ...], \"cost\": c}, ...]}

  {\"kind\": \"team\",
   \"agents\": [{\"labels\": [\"idle\", \"work\"], \"costs\": [0, 0.05]}, ...],
   \"profiles\": [{\"actions\": [i1, i2, ...], \"outcomes\": [[y, p], ...]}, ...]}

Outcomes are nonnegative and probabilities sum to 1. The null action is added
to single-agent files when missing. Team tables need a costless profile;
labels are optional.

Exit codes: 0 success or pass, 1 invalid input or arguments, 2 a verification
check failed. Set ROBUST_CONTRACTS_LOG (error, warn, info, debug, trace) for
diagnostics on stderr.";

#[derive(Parser, Debug)]
#[command(name = "robust-contracts", version, about = "Robust contract design solver and verifier", long_about = LONG_ABOUT)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Optimal randomized linear contract for one agent.
    SolveSingle(SolveArgs),
    /// Optimal randomized linear contract for a team.
    SolveTeam(SolveArgs),
    /// Certifies the optimal value with the adversary and random supersets.
    Verify(VerifyArgs),
    /// Advantage of randomization for one action with E[y] = 1 and cost c0.
    RatioCurve(RatioArgs),
    /// Cross-checks the optimal value against the discretized linear programs.
    LpCheck(LpArgs),
}

#[derive(Args, Debug)]
struct SolveArgs {
    /// Technology file.
    #[arg(long)]
    input: PathBuf,
    /// Writes the contract's CDF as CSV.
    #[arg(long)]
    output: Option<PathBuf>,
    /// Rows of the CDF table.
    #[arg(long, default_value_t = 101, value_parser = positive)]
    grid: usize,
    /// Random points of the team optimality check.
    #[arg(long, default_value_t = 1000)]
    trials: usize,
    #[arg(long, default_value_t = 42)]
    seed: u64,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    /// Technology file.
    #[arg(long)]
    input: PathBuf,
    /// Writes a CSV summary of the checks.
    #[arg(long)]
    output: Option<PathBuf>,
    /// Random tabular contracts tried against the adversary.
    #[arg(long, default_value_t = 10_000)]
    grid: usize,
    /// Random supersets for the lower bound; 0 skips it.
    #[arg(long, default_value_t = 1000)]
    trials: usize,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Slack allowed above the value in the upper-bound check.
    #[arg(long, default_value_t = robust_contracts::adversary::UPPER_BOUND_TOL, value_parser = positive_real)]
    tolerance: f64,
    /// Shifts the certified value before comparison (negative control).
    #[arg(long, hide = true, default_value_t = 0.0, allow_negative_numbers = true)]
    shift_value: f64,
}

#[derive(Args, Debug)]
struct RatioArgs {
    /// Writes the curve to this file instead of stdout.
    #[arg(long)]
    output: Option<PathBuf>,
    #[arg(long, default_value_t = 0.01)]
    from: f64,
    #[arg(long, default_value_t = 0.99)]
    to: f64,
    #[arg(long, default_value_t = 0.01, value_parser = positive_real)]
    step: f64,
}

#[derive(Args, Debug)]
struct LpArgs {
    /// Technology file.
    #[arg(long)]
    input: PathBuf,
    /// Writes a CSV summary of the checks.
    #[arg(long)]
    output: Option<PathBuf>,
    /// Payment levels per outcome in the contract grid.
    #[arg(long, default_value_t = 8, value_parser = positive)]
    grid: usize,
    /// Slope points of the reduction programs.
    #[arg(long, default_value_t = 200, value_parser = positive)]
    trials: usize,
    /// Tolerance of the duality and reduction comparisons.
    #[arg(long, default_value_t = 1e-6, value_parser = positive_real)]
    tolerance: f64,
}

fn positive(s: &str) -> Result<usize, String> {
    match s.parse::<usize>() {
        Ok(v) if v > 0 => Ok(v),
        _ => Err(format!("`{s}` is not a positive integer")),
    }
}

fn positive_real(s: &str) -> Result<f64, String> {
    match s.parse::<f64>() {
        Ok(v) if v.is_finite() && v > 0.0 => Ok(v),
        _ => Err(format!("`{s}` is not a positive number")),
    }
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{path}: {source}")]
    Read { path: PathBuf, source: std::io::Error },
    #[error("{path}: {source}")]
    Input { path: PathBuf, source: ContractError },
    #[error(transparent)]
    Contract(#[from] ContractError),
    #[error("{0}")]
    Usage(String),
    #[error("writing output: {0}")]
    Io(#[from] std::io::Error),
    #[error("writing CSV: {0}")]
    Csv(#[from] csv::Error),
}

/// Whether every check of a command passed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Pass,
    Fail,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("ROBUST_CONTRACTS_LOG", "warn"))
        .format_timestamp(None)
        .init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    let mut stdout = std::io::stdout().lock();
    let result = match cli.command {
        Command::SolveSingle(a) => commands::solve_single(&a, &mut stdout),
        Command::SolveTeam(a) => commands::solve_team(&a, &mut stdout),
        Command::Verify(a) => commands::verify(&a, &mut stdout),
        Command::RatioCurve(a) => commands::ratio_curve(&a, &mut stdout),
        Command::LpCheck(a) => commands::lp_check(&a, &mut stdout),
    };
    match result {
        Ok(Verdict::Pass) => ExitCode::SUCCESS,
        Ok(Verdict::Fail) => ExitCode::from(2),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
