//! Command-line front end: instance files in, deterministic reports out.

pub mod commands;
pub mod format;
pub mod instance;

use std::ffi::OsString;
use std::ops::RangeInclusive;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use ibp_core::equilibrium::{
    SolveOptions, DEFAULT_MAX_ITERATIONS, DEFAULT_SOLVER, DEFAULT_TOLERANCE,
};
use ibp_core::paradox::DEFAULT_DECISION_THRESHOLD;

pub use commands::{exit, CliError, Report};

#[derive(Debug, Parser)]
#[command(
    name = "ibp",
    version,
    about = "Informational Braess paradox toolkit for multi-OD routing games"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct SolverArgs {
    /// Stop once the largest Wardrop violation is at most this value.
    #[arg(long = "tol", default_value_t = DEFAULT_TOLERANCE)]
    pub tolerance: f64,
    #[arg(long = "max-iters", default_value_t = DEFAULT_MAX_ITERATIONS)]
    pub max_iterations: usize,
    /// Equilibrium backend: conditional-gradient or active-set.
    #[arg(long, default_value = DEFAULT_SOLVER)]
    pub solver: String,
}

impl SolverArgs {
    fn choice(&self) -> commands::SolverChoice<'_> {
        commands::SolverChoice {
            name: &self.solver,
            options: SolveOptions::default()
                .with_tolerance(self.tolerance)
                .with_max_iterations(self.max_iterations),
        }
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Decide whether the network is immune to the paradox.
    Classify {
        path: PathBuf,
        #[arg(long)]
        json: bool,
    },
    /// Compute an information-constrained Wardrop equilibrium.
    Solve {
        path: PathBuf,
        #[command(flatten)]
        solver: SolverArgs,
        #[arg(long)]
        json: bool,
    },
    /// Compare type 0's equilibrium latency before and after its extension.
    CheckIbp {
        path: PathBuf,
        #[command(flatten)]
        solver: SolverArgs,
        #[arg(long, default_value_t = DEFAULT_DECISION_THRESHOLD)]
        threshold: f64,
        #[arg(long)]
        json: bool,
    },
    /// Build a paradox instance on a network that is not immune.
    Synthesize {
        path: PathBuf,
        /// Output file; defaults to `<stem>.witness.json` next to the input.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        json: bool,
    },
    /// Sample random games on the network looking for the paradox.
    Search {
        path: PathBuf,
        #[arg(long, default_value_t = 1000)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Integer traffic rates, as `min:max`.
        #[arg(long, default_value = "1:10", value_parser = parse_range)]
        rates: RangeInclusive<u32>,
        /// Integer latency constants, as `min:max`.
        #[arg(long, default_value = "0:25", value_parser = parse_range)]
        constants: RangeInclusive<u32>,
        /// Integer latency slopes, as `min:max`.
        #[arg(long, default_value = "0:4", value_parser = parse_range)]
        slopes: RangeInclusive<u32>,
        #[arg(long = "tol", default_value_t = DEFAULT_TOLERANCE)]
        tolerance: f64,
        #[arg(long = "max-iters", default_value_t = DEFAULT_MAX_ITERATIONS)]
        max_iterations: usize,
        #[arg(long, default_value_t = DEFAULT_DECISION_THRESHOLD)]
        threshold: f64,
        /// Output file for a witness; defaults to `<stem>.search-witness.json`.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Print one line per trial.
        #[arg(long)]
        transcript: bool,
        #[arg(long)]
        json: bool,
    },
    /// Reproduce the 47 to 48 latency increase on the three-vertex gadget.
    Demo {
        #[arg(long)]
        json: bool,
    },
}

fn parse_range(s: &str) -> Result<RangeInclusive<u32>, String> {
    let (lo, hi) = s
        .split_once(':')
        .ok_or_else(|| format!("expected `min:max`, got `{s}`"))?;
    let lo: u32 = lo
        .trim()
        .parse()
        .map_err(|e| format!("bad minimum `{lo}`: {e}"))?;
    let hi: u32 = hi
        .trim()
        .parse()
        .map_err(|e| format!("bad maximum `{hi}`: {e}"))?;
    if lo > hi {
        return Err(format!("empty range {lo}:{hi}"));
    }
    Ok(lo..=hi)
}

pub fn run(cli: &Cli) -> Result<Report, CliError> {
    match &cli.command {
        Command::Classify { path, json } => commands::classify(path, *json),
        Command::Solve { path, solver, json } => commands::solve(path, &solver.choice(), *json),
        Command::CheckIbp {
            path,
            solver,
            threshold,
            json,
        } => commands::check_ibp(path, &solver.choice(), *threshold, *json),
        Command::Synthesize { path, out, json } => {
            commands::synthesize(path, out.as_deref(), *json)
        }
        Command::Search {
            path,
            trials,
            seed,
            rates,
            constants,
            slopes,
            tolerance,
            max_iterations,
            threshold,
            out,
            transcript,
            json,
        } => commands::search(
            path,
            &commands::SearchArgs {
                trials: *trials,
                seed: *seed,
                rates: rates.clone(),
                constants: constants.clone(),
                slopes: slopes.clone(),
                tolerance: *tolerance,
                max_iterations: *max_iterations,
                threshold: *threshold,
                out: out.clone(),
                transcript: *transcript,
            },
            *json,
        ),
        Command::Demo { json } => commands::demo(*json),
    }
}

/// Full invocation as the binary performs it: exit code, standard output
/// and standard error.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Invocation {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

pub fn invoke<I, T>(args: I) -> Invocation
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            let code = e.exit_code();
            return if e.use_stderr() {
                Invocation {
                    code,
                    stdout: String::new(),
                    stderr: text,
                }
            } else {
                Invocation {
                    code,
                    stdout: text,
                    stderr: String::new(),
                }
            };
        }
    };
    match run(&cli) {
        Ok(report) => Invocation {
            code: report.code,
            stdout: report.text,
            stderr: String::new(),
        },
        Err(e) => Invocation {
            code: e.exit_code(),
            stdout: String::new(),
            stderr: format!("error: {e}\n"),
        },
    }
}
