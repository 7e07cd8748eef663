//! `steer`: steering predictions, scenario sweeps, LHS membership checks,
//! counting simulations and the reproduction report.
//!
//! Exit codes: 0 success, 2 configuration error, 3 numeric failure,
//! 4 indeterminate LHS verdict.

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use steering::Error;

#[derive(Parser, Debug)]
#[command(name = "steer", version, about = "Rotationally invariant EPR-steering numerics")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Predicted correlation matrix and RIS/NSS assessments for a state and two frames.
    Predict(PredictArgs),
    /// Run a scenario sweep over Alice's in-plane angle.
    Sweep(SweepArgs),
    /// Test a correlation matrix for a local-hidden-state model.
    Lhs(LhsArgs),
    /// Simulate counts for one setting configuration and estimate the parameters.
    Simulate(SimulateArgs),
    /// Compare published values with the ideal model and simulations.
    Reproduce(ReproduceArgs),
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Csv,
    Json,
}

#[derive(Args, Debug)]
pub struct Output {
    /// Write to this file instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
}

#[derive(Args, Debug)]
pub struct PredictArgs {
    /// JSON with `state`, `alice_frame` and `bob_frame`.
    #[arg(long, required_unless_present = "example_config")]
    pub config: Option<PathBuf>,
    /// Print a valid configuration template and exit.
    #[arg(long)]
    pub example_config: bool,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Args, Debug)]
pub struct SweepArgs {
    /// Scenario JSON.
    #[arg(long, required_unless_present = "example_config")]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub example_config: bool,
    /// Overrides the scenario seed.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Overrides pairs_per_setting.
    #[arg(long)]
    pub pairs: Option<u64>,
    /// Overrides sys_angle_deg.
    #[arg(long)]
    pub sys_angle_deg: Option<f64>,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Args, Debug)]
pub struct LhsArgs {
    /// JSON with `matrix` (rows) and optional `bob_frame` and `tol`.
    #[arg(long, conflicts_with_all = ["matrix", "werner"])]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub example_config: bool,
    /// Inline matrix as JSON rows, e.g. '[[-0.8,0],[0,-0.8]]'.
    #[arg(long, conflicts_with = "werner", allow_hyphen_values = true)]
    pub matrix: Option<String>,
    /// Generate M = -W·I with `--dims` rows and columns.
    #[arg(long)]
    pub werner: Option<f64>,
    #[arg(long, default_value_t = 2)]
    pub dims: usize,
    /// Circle grid step for two Bob settings.
    #[arg(long, default_value_t = 1.0)]
    pub grid_deg: f64,
    /// Fibonacci sphere size for three Bob settings.
    #[arg(long, default_value_t = 10_000)]
    pub sphere_points: usize,
    /// Feasibility tolerance on the gauge.
    #[arg(long)]
    pub tol: Option<f64>,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Args, Debug)]
pub struct SimulateArgs {
    /// JSON with `state`, frames and counting options.
    #[arg(long, required_unless_present = "example_config")]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub example_config: bool,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub pairs: Option<u64>,
    #[arg(long)]
    pub sys_angle_deg: Option<f64>,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Args, Debug)]
pub struct ReproduceArgs {
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub pairs: Option<u64>,
    #[arg(long)]
    pub sys_angle_deg: Option<f64>,
    #[command(flatten)]
    pub output: Output,
}

fn exit_code(err: &Error) -> u8 {
    match err {
        Error::Indeterminate { .. } => 4,
        Error::NoConvergence { .. } | Error::Lp(_) => 3,
        _ => 2,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Predict(a) => commands::predict(a),
        Command::Sweep(a) => commands::sweep(a),
        Command::Lhs(a) => commands::lhs(a),
        Command::Simulate(a) => commands::simulate(a),
        Command::Reproduce(a) => commands::reproduce(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
