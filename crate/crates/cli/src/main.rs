//! `sparse-mc`: build and check sparse subdivision bifiltrations.
//!
//! Exit codes: 0 success, 1 configuration error, 2 input error,
//! 3 numerical failure, 4 verification violations, 5 friends cap exceeded.

mod commands;
mod config;

use std::fmt;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use sparse_multicover::lpsolver::LpError;
use sparse_multicover::Error;

use crate::config::InputArgs;

#[derive(Debug, Parser)]
#[command(name = "sparse-mc", version, about = "Sparse subdivision bifiltrations of point clouds")]
struct Cli {
    /// More log output on stderr (repeatable).
    #[arg(short, long, action = clap::ArgAction::Count, global = true)]
    verbose: u8,

    /// Worker threads; 0 uses all cores.
    #[arg(long, default_value_t = 0, global = true)]
    threads: usize,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Build the bifiltration and write it to a file.
    Build {
        #[command(flatten)]
        input: InputArgs,

        /// Output file; defaults to the input path with extension `.sb`.
        #[arg(short, long)]
        output: Option<PathBuf>,

        /// Write elements and staircases only, no chains.
        #[arg(long)]
        poset_only: bool,
    },
    /// Check the construction against its guarantees and brute-force oracles.
    Verify {
        #[command(flatten)]
        input: InputArgs,

        /// Random probe points for the interleaving check.
        #[arg(long, default_value_t = 200)]
        probes: usize,

        /// Scales for the interleaving check.
        #[arg(long, default_value_t = 20)]
        scales: usize,

        /// Largest order k for the interleaving check.
        #[arg(long, default_value_t = 5)]
        max_k: usize,

        /// Write a JSON summary here.
        #[arg(long)]
        report: Option<PathBuf>,

        /// Test hook: corrupt one staircase before comparing.
        #[arg(long, hide = true)]
        corrupt_staircase: bool,
    },
    /// Print size statistics as CSV.
    Stats {
        #[command(flatten)]
        input: InputArgs,

        /// Rerun on these input prefix sizes.
        #[arg(long, value_delimiter = ',')]
        scaling: Option<Vec<usize>>,

        /// Write per-point insertion, slowing and disappearance times as CSV.
        #[arg(long)]
        times: Option<PathBuf>,
    },
    /// Solve `min s  s.t. |p_i - z|^2 <= alpha_i s + beta_i` for a CSV of
    /// rows `p1,..,pd,alpha,beta`.
    Miniball {
        #[arg(short, long)]
        input: PathBuf,

        /// Skip the first line of the input.
        #[arg(long)]
        header: bool,

        /// Seed for the constraint order.
        #[arg(long, env = "SPARSE_MC_SEED", default_value_t = 0)]
        seed: u64,
    },
}

/// A failed command: exit code plus a message naming the stage.
#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub stage: &'static str,
    pub message: String,
}

impl Failure {
    pub fn new(code: u8, stage: &'static str, message: impl fmt::Display) -> Self {
        Failure {
            code,
            stage,
            message: message.to_string(),
        }
    }

    /// Classifies a library error raised in `stage`.
    pub fn from_error(stage: &'static str, e: Error) -> Self {
        let code = match &e {
            Error::Config(_) | Error::OracleLimit { .. } => 1,
            Error::Geometry(_) | Error::Io { .. } | Error::Format { .. } => 2,
            Error::Lp(LpError::NumericalFailure(_)) => 3,
            Error::Lp(_) => 2,
            Error::FriendsCapExceeded { .. } => 5,
        };
        Failure::new(code, stage, e)
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.stage, self.message)
    }
}

fn init_logging(verbose: u8) {
    let level = match verbose {
        0 => log::LevelFilter::Warn,
        1 => log::LevelFilter::Info,
        2 => log::LevelFilter::Debug,
        _ => log::LevelFilter::Trace,
    };
    env_logger::Builder::new()
        .filter_level(level)
        .parse_default_env()
        .format_timestamp(None)
        .init();
}

fn run(cli: Cli) -> Result<(), Failure> {
    if cli.threads > 0 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(cli.threads)
            .build_global()
            .map_err(|e| Failure::new(1, "config", format!("thread pool: {e}")))?;
    }
    match cli.command {
        Command::Build {
            input,
            output,
            poset_only,
        } => commands::build(&input, output, poset_only),
        Command::Verify {
            input,
            probes,
            scales,
            max_k,
            report,
            corrupt_staircase,
        } => {
            let opts = commands::VerifyOptions {
                probes,
                scales,
                max_k,
                report,
                corrupt_staircase,
            };
            commands::verify(&input, &opts)
        }
        Command::Stats {
            input,
            scaling,
            times,
        } => commands::stats(&input, scaling.as_deref(), times.as_deref()),
        Command::Miniball {
            input,
            header,
            seed,
        } => commands::miniball(&input, header, seed),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    init_logging(cli.verbose);
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {f}");
            ExitCode::from(f.code)
        }
    }
}
