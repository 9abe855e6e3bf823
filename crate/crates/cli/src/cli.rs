//! Command-line interface definitions.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::config::Overrides;

#[derive(Debug, Parser)]
#[command(
    name = "seiprd",
    about = "SEIPRD epidemic model calibration, forecasting, and scoring workbench",
    version
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate synthetic surveillance CSVs from known parameters.
    Simulate(SimulateArgs),
    /// Calibrate the model at a single σ_β and write posterior draws.
    Calibrate(CalibrateArgs),
    /// Build posterior-predictive forecasts from stored draws.
    Forecast(ForecastArgs),
    /// Score stored draws against held-out observations.
    Score(ScoreArgs),
    /// Run the full σ_β sweep: calibrate, forecast, and score per value.
    Sweep(CommonArgs),
}

/// Flags shared by every subcommand; each overrides the config file.
#[derive(Debug, Args, Clone)]
pub struct CommonArgs {
    /// TOML configuration file (flags override its values).
    #[arg(long, value_name = "PATH")]
    pub config: Option<PathBuf>,

    /// Deaths CSV (date,count).
    #[arg(long, value_name = "PATH")]
    pub deaths: Option<PathBuf>,

    /// Hospital admissions CSV (date,count).
    #[arg(long, value_name = "PATH")]
    pub admissions: Option<PathBuf>,

    /// Symptom-report calls CSV (date,count).
    #[arg(long, value_name = "PATH")]
    pub calls: Option<PathBuf>,

    /// Population size N.
    #[arg(long)]
    pub population: Option<u64>,

    /// Calibration window start (YYYY-MM-DD).
    #[arg(long, value_name = "DATE")]
    pub window_start: Option<String>,

    /// Calibration window end (YYYY-MM-DD).
    #[arg(long, value_name = "DATE")]
    pub window_end: Option<String>,

    /// Forecast horizon in days.
    #[arg(long)]
    pub horizon: Option<u32>,

    /// σ_β values (comma-separated).
    #[arg(long, value_name = "LIST", value_delimiter = ',')]
    pub sigma_beta: Option<Vec<f64>>,

    /// Number of independent chains.
    #[arg(long)]
    pub chains: Option<usize>,

    /// Draws per chain, including warmup.
    #[arg(long)]
    pub samples: Option<usize>,

    /// Warmup draws discarded per chain.
    #[arg(long)]
    pub warmup: Option<usize>,

    /// Sampler target acceptance rate.
    #[arg(long)]
    pub target_accept: Option<f64>,

    /// Integrator sub-steps per day.
    #[arg(long)]
    pub substeps: Option<u32>,

    /// RNG seed.
    #[arg(long)]
    pub seed: Option<u64>,

    /// Output directory.
    #[arg(long, value_name = "DIR")]
    pub out: Option<PathBuf>,
}

impl CommonArgs {
    pub fn overrides(&self) -> Overrides {
        Overrides {
            deaths: self.deaths.clone(),
            admissions: self.admissions.clone(),
            calls: self.calls.clone(),
            population: self.population,
            window_start: self.window_start.clone(),
            window_end: self.window_end.clone(),
            horizon: self.horizon,
            sigma_beta: self.sigma_beta.clone(),
            n_chains: self.chains,
            n_samples: self.samples,
            n_warmup: self.warmup,
            target_accept: self.target_accept,
            substeps_per_day: self.substeps,
            seed: self.seed,
            out_dir: self.out.clone(),
        }
    }
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub common: CommonArgs,

    /// Use the bundled desk-scale scenario instead of a [synthetic] config
    /// section.
    #[arg(long)]
    pub preset: Option<Preset>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Preset {
    /// Six β knots over 120 days, N = 10^6.
    Desk,
}

#[derive(Debug, Args)]
pub struct CalibrateArgs {
    #[command(flatten)]
    pub common: CommonArgs,
}

#[derive(Debug, Args)]
pub struct ForecastArgs {
    #[command(flatten)]
    pub common: CommonArgs,

    /// Stored draws CSV from `calibrate`.
    #[arg(long, value_name = "PATH")]
    pub draws: PathBuf,
}

#[derive(Debug, Args)]
pub struct ScoreArgs {
    #[command(flatten)]
    pub common: CommonArgs,

    /// Stored draws CSV from `calibrate`.
    #[arg(long, value_name = "PATH")]
    pub draws: PathBuf,
}
