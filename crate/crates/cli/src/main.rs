//! Command-line front end: generate families, run identity batteries,
//! compute zeros and run limit studies from a JSON problem file.
//!
//! Exit codes: 0 everything passed, 1 an identity or convergence check
//! failed (reports are still written), 2 invalid input, 3 numerical failure.

mod commands;
mod output;
mod spec;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use commands::Options;
use spec::ProblemSpec;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("invalid input: {0}")]
    Validation(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error("i/o error: {0}")]
    Io(String),
}

impl CliError {
    fn io(e: impl std::fmt::Display) -> CliError {
        CliError::Io(e.to_string())
    }

    fn code(&self) -> u8 {
        match self {
            CliError::Validation(_) | CliError::Io(_) => 2,
            CliError::Numerical(_) => 3,
        }
    }
}

pub enum Outcome {
    Pass,
    Fail,
}

#[derive(Parser)]
#[command(
    name = "mbop",
    version,
    about = "Matrix biorthogonal polynomials from block three-term recurrences"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Polynomial coefficients of V, G and their associated families (JSON).
    Generate(Common),
    /// Identity residual battery (JSON array of reports).
    Identities(Common),
    /// Zeros of the truncated recurrences (CSV: k, n, re, im).
    Zeros(Common),
    /// Limit studies (CSV: target, x_re, x_im, n, error; plus <out>.summary.json).
    Asymptotics(Common),
}

#[derive(Args)]
struct Common {
    /// Problem specification (JSON).
    #[arg(long)]
    spec: PathBuf,
    /// Output file, written atomically.
    #[arg(long)]
    out: PathBuf,
    /// Seed for randomly generated coefficients.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Allow evaluation points inside the Gershgorin disk.
    #[arg(long)]
    force_inside_spectrum: bool,
    /// Uniform tolerance replacing the spec's tolerance table.
    #[arg(long)]
    tol: Option<f64>,
    /// Scale C_INDEX by FACTOR after validation (fault injection).
    #[arg(long, hide = true, value_parser = parse_corruption)]
    corrupt_c: Option<(usize, f64)>,
}

fn parse_corruption(s: &str) -> Result<(usize, f64), String> {
    let (i, f) = s.split_once('=').ok_or("expected INDEX=FACTOR")?;
    let i = i.trim().parse().map_err(|e| format!("index: {e}"))?;
    let f = f.trim().parse().map_err(|e| format!("factor: {e}"))?;
    Ok((i, f))
}

type Handler = fn(&ProblemSpec, &std::path::Path, &Options) -> Result<Outcome, CliError>;

fn run(cli: Cli) -> Result<Outcome, CliError> {
    let (common, cmd): (&Common, Handler) = match &cli.command {
        Command::Generate(c) => (c, commands::generate),
        Command::Identities(c) => (c, commands::identities),
        Command::Zeros(c) => (c, commands::zeros_cmd),
        Command::Asymptotics(c) => (c, commands::asymptotics),
    };
    let spec = ProblemSpec::load(&common.spec)?;
    let opts = Options {
        seed: common.seed,
        force_inside_spectrum: common.force_inside_spectrum,
        tol: common.tol,
        corrupt_c: common.corrupt_c,
    };
    cmd(&spec, &common.out, &opts)
}

fn main() -> ExitCode {
    mbop::par::configure_threads_from_env();
    match run(Cli::parse()) {
        Ok(Outcome::Pass) => ExitCode::SUCCESS,
        Ok(Outcome::Fail) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code())
        }
    }
}
