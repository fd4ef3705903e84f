use std::path::PathBuf;

use chrono::NaiveDate;
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

#[derive(Debug, Parser)]
#[command(
    name = "ito-lab",
    version,
    about = "Brownian motion, Itô integrals and log-price projections"
)]
pub struct Cli {
    /// Cap on worker threads. Outputs do not depend on it.
    #[arg(long, global = true)]
    pub threads: Option<usize>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Sample Brownian paths on a uniform grid over [0, T].
    SimulateBm(SimulateBm),
    /// Itô isometry and mesh-refinement convergence for a built-in integrand.
    ItoDemo(ItoDemo),
    /// Estimate drift and volatility from a `date,close` price file.
    Calibrate(Calibrate),
    /// Simulate a projection ensemble of log-price paths.
    Project(Project),
    /// Correlate an ensemble with a historical series.
    Correlate(Correlate),
    /// calibrate → project → correlate in one run.
    Experiment(Experiment),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::SimulateBm(_) => "simulate-bm",
            Command::ItoDemo(_) => "ito-demo",
            Command::Calibrate(_) => "calibrate",
            Command::Project(_) => "project",
            Command::Correlate(_) => "correlate",
            Command::Experiment(_) => "experiment",
        }
    }
}

#[derive(Debug, Args, Serialize)]
pub struct SimulateBm {
    #[arg(long)]
    pub steps: usize,
    #[arg(long, default_value_t = 1.0)]
    pub t_end: f64,
    #[arg(long, default_value_t = 1)]
    pub paths: usize,
    #[arg(long, env = "ITOLAB_SEED", default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum IntegrandArg {
    One,
    Bm,
    SinBm,
}

#[derive(Debug, Args, Serialize)]
pub struct ItoDemo {
    #[arg(long, value_enum, default_value_t = IntegrandArg::Bm)]
    pub integrand: IntegrandArg,
    /// Steps of the base grid; the isometry check runs on this grid.
    #[arg(long, default_value_t = 256)]
    pub steps: usize,
    /// Number of successive refinements compared.
    #[arg(long, default_value_t = 4)]
    pub levels: usize,
    #[arg(long, default_value_t = 10_000)]
    pub paths: usize,
    #[arg(long, default_value_t = 1.0)]
    pub t_end: f64,
    #[arg(long, env = "ITOLAB_SEED", default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ModeArg {
    Standard,
    Paper,
}

#[derive(Debug, Args, Serialize)]
pub struct Calibrate {
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long, value_enum, default_value_t = ModeArg::Standard)]
    pub mode: ModeArg,
    /// First date (inclusive) of the calibration window.
    #[arg(long)]
    pub start: Option<NaiveDate>,
    /// Last date (inclusive) of the calibration window.
    #[arg(long)]
    pub end: Option<NaiveDate>,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args, Serialize)]
pub struct Project {
    /// Daily log-price drift Γ.
    #[arg(
        long,
        allow_negative_numbers = true,
        required_unless_present = "params"
    )]
    pub gamma: Option<f64>,
    /// Daily log-price diffusion Σ.
    #[arg(
        long,
        allow_negative_numbers = true,
        required_unless_present = "params"
    )]
    pub sigma: Option<f64>,
    /// Read Γ and Σ from a `calibrate` output instead.
    #[arg(long, conflicts_with_all = ["gamma", "sigma"])]
    pub params: Option<PathBuf>,
    #[arg(long, allow_negative_numbers = true)]
    pub initial: f64,
    #[arg(long)]
    pub days: usize,
    #[arg(long, default_value_t = 10)]
    pub paths: usize,
    #[arg(long, env = "ITOLAB_SEED", default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Copy, Default, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum BasisArg {
    /// Price levels.
    #[default]
    Levels,
    /// Log-prices (sensitivity variant).
    Log,
}

#[derive(Debug, Args, Serialize)]
pub struct Correlate {
    #[arg(long)]
    pub ensemble: PathBuf,
    #[arg(long)]
    pub historical: PathBuf,
    #[arg(long, value_enum, default_value_t = BasisArg::Levels)]
    pub on: BasisArg,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args, Serialize)]
pub struct Experiment {
    #[arg(long)]
    pub input: PathBuf,
    /// First calibration date; defaults to the start of the file.
    #[arg(long)]
    pub calib_start: Option<NaiveDate>,
    /// Last calibration date; defaults to the last date before `--test-start`.
    #[arg(long)]
    pub calib_end: Option<NaiveDate>,
    /// First date of the projection window; its close is the initial price.
    #[arg(long)]
    pub test_start: NaiveDate,
    /// Last date of the projection window; defaults to the end of the file.
    #[arg(long)]
    pub test_end: Option<NaiveDate>,
    #[arg(long, value_enum, default_value_t = ModeArg::Standard)]
    pub mode: ModeArg,
    #[arg(long, default_value_t = 1000)]
    pub paths: usize,
    #[arg(long, env = "ITOLAB_SEED", default_value_t = 0)]
    pub seed: u64,
    #[arg(long, value_enum, default_value_t = BasisArg::Levels)]
    pub on: BasisArg,
    /// Directory receiving params.json, historical.csv, ensemble.csv and
    /// trace.csv, each with a manifest.
    #[arg(long)]
    pub out_dir: PathBuf,
}
