mod commands;
mod error;
mod output;
mod scene;

use clap::{Args, Parser, Subcommand, ValueEnum};
use error::CliError;
use serde::Serialize;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser, Debug)]
#[command(name = "enclosure", version, about = "Enclosure-method reconstruction of sound-hard polygonal obstacles")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Forward solve and Cauchy data on the measurement circle.
    Solve(Params),
    /// Support-function estimates and convex hull reconstruction.
    Hull(Params),
    /// Far-field operator and regularization sweeps.
    Farfield(Params),
    /// Linear-sampling indicator map.
    Lsm(Params),
    /// Self-checks against analytic oracles.
    OracleCheck(Params),
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    /// Point source at the scene's `source`.
    Pointsource,
    /// Plane wave travelling from the source side toward the center.
    Planewave,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct Params {
    /// Scene JSON file.
    #[arg(long)]
    scene: Option<PathBuf>,
    /// Output directory.
    #[arg(long, default_value = "out")]
    #[serde(skip)]
    out: PathBuf,
    #[arg(long, default_value_t = enclosure::indicator::DEFAULT_TAU_MIN)]
    tau_min: f64,
    #[arg(long, default_value_t = enclosure::indicator::DEFAULT_TAU_MAX)]
    tau_max: f64,
    #[arg(long, default_value_t = enclosure::indicator::DEFAULT_TAU_COUNT)]
    tau_count: usize,
    /// Probe directions for `hull` (default 64) or far-field grid size (default 32).
    #[arg(long)]
    directions: Option<usize>,
    /// Quadrature nodes per edge, a multiple of 16.
    #[arg(long, default_value_t = 64)]
    mesh_nodes: usize,
    /// Algebraic grading exponent toward corners.
    #[arg(long, default_value_t = 4.0)]
    grade: f64,
    /// Nodes on the measurement circle (default: enough for --tau-max).
    #[arg(long)]
    trace_n: Option<usize>,
    #[arg(long, default_value_t = 1e-8)]
    alpha_min: f64,
    #[arg(long, default_value_t = 1e-2)]
    alpha_max: f64,
    #[arg(long, value_enum, default_value_t = Mode::Pointsource)]
    mode: Mode,
    /// Use the analytic far-field operator of a disc of this radius at the scene center.
    #[arg(long)]
    disc: Option<f64>,
    /// Sampling grid points per side for `lsm`.
    #[arg(long, default_value_t = 41)]
    grid: usize,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Solve(p) => commands::solve(p),
        Command::Hull(p) => commands::hull(p),
        Command::Farfield(p) => commands::farfield(p),
        Command::Lsm(p) => commands::lsm(p),
        Command::OracleCheck(p) => commands::oracle_check(p),
    };
    match result {
        Ok(files) => {
            for f in files {
                println!("{}", f.display());
            }
            ExitCode::SUCCESS
        }
        Err(e) => report(&e),
    }
}

fn report(e: &CliError) -> ExitCode {
    eprintln!("{}", serde_json::json!({ "error": e.code(), "message": e.to_string() }));
    ExitCode::from(e.exit_code() as u8)
}
