mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use rem_core::RemError;

/// Fit, diagnose and simulate dyadic relational event models.
#[derive(Parser, Debug)]
#[command(name = "rem", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Fit a model and write summary.txt, fit.json, residuals.csv and ranks.csv.
    Fit(FitArgs),
    /// Adequacy diagnostics for a fit.json artifact.
    Diagnose(DiagnoseArgs),
    /// Simulate an exact-time edgelist from a parameter vector.
    Simulate(SimulateArgs),
    /// Compare two fits of the same history by BIC.
    Compare(CompareArgs),
}

/// Options shared by `fit` and `simulate`.
#[derive(Args, Debug, Clone)]
struct ModelArgs {
    /// TOML config file; flags override its values.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Number of actors.
    #[arg(long)]
    n: Option<usize>,
    /// Effects, comma separated (e.g. `CovInt,PSAB-BA,RRecSnd`).
    #[arg(long, num_args = 1..)]
    effects: Vec<String>,
    /// Covariate binding `NAME=PATH`; repeatable.
    #[arg(long = "covar", value_parser = config::parse_binding)]
    covariates: Vec<(String, PathBuf)>,
    /// 1-based id of the actor standing for the whole group.
    #[arg(long)]
    group_actor: Option<usize>,
    /// Output directory (default: $REM_OUT_DIR, else the working directory).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct FitArgs {
    #[command(flatten)]
    model: ModelArgs,
    /// Edgelist CSV (`t,s,r`) or JSON.
    #[arg(long)]
    edgelist: Option<PathBuf>,
    /// `ordinal` or `exact`.
    #[arg(long)]
    timing: Option<String>,
    #[arg(long)]
    max_iter: Option<usize>,
    /// Gradient tolerance.
    #[arg(long)]
    tol: Option<f64>,
    /// Accepted for symmetry with `simulate`; fitting is deterministic.
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Args, Debug)]
struct DiagnoseArgs {
    /// fit.json written by `rem fit`.
    #[arg(long)]
    fit: PathBuf,
    /// Flag events whose rank exceeds this upper quantile of the support.
    #[arg(long, conflicts_with = "residual_threshold")]
    rank_quantile: Option<f64>,
    /// Flag events whose deviance residual exceeds this value (ordinal only).
    #[arg(long)]
    residual_threshold: Option<f64>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct SimulateArgs {
    #[command(flatten)]
    model: ModelArgs,
    /// Parameter vector: JSON array or comma/whitespace separated numbers.
    #[arg(long)]
    theta: Option<PathBuf>,
    /// Stop after this many events.
    #[arg(long, conflicts_with = "horizon")]
    events: Option<usize>,
    /// Stop at this time.
    #[arg(long)]
    horizon: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Args, Debug)]
struct CompareArgs {
    first: PathBuf,
    second: PathBuf,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug)]
pub enum CliError {
    /// Bad input or configuration (exit 2).
    Input(String),
    /// Numerical or convergence failure (exit 3).
    Numerical(String),
}

impl CliError {
    pub fn input(msg: impl Into<String>) -> Self {
        CliError::Input(msg.into())
    }

    fn code(&self) -> u8 {
        match self {
            CliError::Input(_) => 2,
            CliError::Numerical(_) => 3,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Input(m) | CliError::Numerical(m) => f.write_str(m),
        }
    }
}

impl From<RemError> for CliError {
    fn from(e: RemError) -> Self {
        if e.is_numerical() {
            CliError::Numerical(e.to_string())
        } else {
            CliError::Input(e.to_string())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Fit(a) => commands::fit(a),
        Command::Diagnose(a) => commands::diagnose(a),
        Command::Simulate(a) => commands::simulate(a),
        Command::Compare(a) => commands::compare(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code())
        }
    }
}
