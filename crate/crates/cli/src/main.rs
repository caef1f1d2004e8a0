//! `gencol`: solve, check and inspect discrete optimal transport problems.
//!
//! Exit codes: 0 success (or exhaustion), 1 input error, 2 iteration cap
//! reached, 3 dense oracle guard exceeded, 4 a `verify` check failed.

mod commands;
mod error;
mod problem;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

pub const EXIT_OK: u8 = 0;
pub const EXIT_INPUT: u8 = 1;
pub const EXIT_MAX_ITER: u8 = 2;
pub const EXIT_GUARD: u8 = 3;
pub const EXIT_CHECK_FAILED: u8 = 4;

#[derive(Debug, Parser)]
#[command(name = "gencol", version, about = "Genetic column generation for discrete optimal transport")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum InitMode {
    /// `initial_set` from the problem file if present, else northwest corner.
    Auto,
    Northwest,
    File,
}

impl InitMode {
    pub fn name(self) -> &'static str {
        match self {
            InitMode::Auto => "auto",
            InitMode::Northwest => "northwest",
            InitMode::File => "file",
        }
    }
}

#[derive(Debug, clap::Args)]
pub struct SolveArgs {
    /// Problem document (JSON).
    problem: PathBuf,
    /// Active-set multiplier; |omega| <= ceil(beta * sum of sizes).
    #[arg(long, default_value_t = 3.0)]
    beta: f64,
    /// two-marginal, single-entry or many-entry (default by arity).
    #[arg(long)]
    rule: Option<String>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Cap on accepted children.
    #[arg(long, default_value_t = 100_000)]
    max_iter: u64,
    /// Relative acceptance threshold, scaled by 1 + max |cost|.
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long, value_enum, default_value_t = InitMode::Auto)]
    init: InitMode,
    /// CSV of iter,objective,omega_size.
    #[arg(long)]
    trajectory_out: Option<PathBuf>,
    /// Result document; stdout if omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run GenCol on a problem.
    Solve(SolveArgs),
    /// Solve the full LP densely (products up to 1e6 configurations).
    Oracle {
        problem: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check a result against its problem.
    Verify {
        result: PathBuf,
        problem: PathBuf,
        /// Search for improving cycles up to this length (two marginals).
        #[arg(long)]
        ccm_k: Option<usize>,
        /// Scan the full product for configurations with positive gain.
        #[arg(long)]
        dual_cert: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the three-marginal instance where the single-entry rule stalls.
    Counterexample {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 10_000)]
        max_iter: u64,
        /// Also write the instance as a problem document.
        #[arg(long)]
        write_problem: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match &cli.command {
        Command::Solve(args) => commands::solve(args),
        Command::Oracle { problem, out } => commands::oracle(problem, out.as_deref()),
        Command::Verify {
            result,
            problem,
            ccm_k,
            dual_cert,
            out,
        } => commands::verify(result, problem, *ccm_k, *dual_cert, out.as_deref()),
        Command::Counterexample {
            seed,
            max_iter,
            write_problem,
            out,
        } => commands::counterexample(*seed, *max_iter, write_problem.as_ref(), out.as_deref()),
    };
    match outcome {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
