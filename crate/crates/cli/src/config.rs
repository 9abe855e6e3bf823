//! Run configuration: defaults, TOML config file, and command-line flags,
//! merged in that order (flags win).

use std::path::{Path, PathBuf};

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use seiprd::dates;
use seiprd::mcmc::{ChainConfig, InitDraw};
use seiprd::params::ParamLayout;

use crate::error::{CliError, Result};

/// Default σ_β sweep grid.
pub const DEFAULT_SIGMA_GRID: [f64; 7] = [0.0005, 0.001, 0.0025, 0.005, 0.01, 0.025, 0.05];

fn parse_date(s: &str) -> Result<NaiveDate> {
    NaiveDate::parse_from_str(s, "%Y-%m-%d")
        .map_err(|e| CliError::Config(format!("invalid date '{s}': {e}")))
}

/// Fully resolved run configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub deaths: Option<PathBuf>,
    pub admissions: Option<PathBuf>,
    pub calls: Option<PathBuf>,
    pub population: u64,
    /// First day of the calibration window.
    pub window_start: NaiveDate,
    /// Last day of the calibration window.
    pub window_end: NaiveDate,
    /// Forecast horizon in days after the window end.
    pub horizon: u32,
    pub sigma_beta: Vec<f64>,
    pub n_chains: usize,
    pub n_samples: usize,
    pub n_warmup: usize,
    pub target_accept: f64,
    pub substeps_per_day: u32,
    pub seed: u64,
    pub out_dir: PathBuf,
    /// Explicit knot dates; derived from the default schedules when absent.
    pub beta_knots: Option<Vec<NaiveDate>>,
    pub rho_admissions_knots: Option<Vec<NaiveDate>>,
    pub rho_calls_knots: Option<Vec<NaiveDate>>,
    pub init: InitIntervals,
    pub synthetic: Option<SyntheticConfig>,
}

/// Constrained initialisation intervals per parameter block.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InitIntervals {
    pub alpha1: (f64, f64),
    pub alpha2: (f64, f64),
    pub beta: (f64, f64),
    pub d_l: (f64, f64),
    pub d_i: (f64, f64),
    pub d_p: (f64, f64),
    pub omega: (f64, f64),
}

impl Default for InitIntervals {
    fn default() -> Self {
        InitIntervals {
            alpha1: (0.7, 0.9999),
            alpha2: (0.1, 0.9),
            beta: (0.05, 1.0),
            d_l: (2.0, 7.0),
            d_i: (2.0, 8.0),
            d_p: (8.0, 18.0),
            omega: (0.005, 0.012),
        }
    }
}

impl InitIntervals {
    /// Initialisation table for a layout: custom intervals for the
    /// epidemic-defining blocks, uniform(-2,2) unconstrained for the rest.
    pub fn table(&self, layout: &ParamLayout) -> Vec<InitDraw> {
        let mut table = vec![InitDraw::default_block(); layout.dim()];
        let unit = |(lo, hi): (f64, f64)| InitDraw::UnitInterval { lo, hi };
        let pos = |(lo, hi): (f64, f64)| InitDraw::Positive { lo, hi };
        table[ParamLayout::ALPHA1] = unit(self.alpha1);
        table[ParamLayout::ALPHA2] = unit(self.alpha2);
        for j in 0..layout.n_beta() {
            table[layout.beta_index(j)] = pos(self.beta);
        }
        table[layout.d_l_index()] = pos(self.d_l);
        table[layout.d_i_index()] = pos(self.d_i);
        table[layout.d_p_index()] = pos(self.d_p);
        table[layout.omega_index()] = unit(self.omega);
        table
    }
}

/// Generating parameters for `simulate`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SyntheticConfig {
    pub alpha1: f64,
    pub alpha2: f64,
    pub beta_knots: Vec<String>,
    pub beta_values: Vec<f64>,
    pub d_l: f64,
    pub d_i: f64,
    pub d_p: f64,
    pub omega: f64,
    pub phi_deaths: f64,
    pub phi_admissions: f64,
    pub phi_calls: f64,
    pub rho_admissions_knots: Vec<String>,
    pub rho_admissions_values: Vec<f64>,
    pub rho_calls_knots: Vec<String>,
    pub rho_calls_values: Vec<f64>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            deaths: None,
            admissions: None,
            calls: None,
            population: 56_000_000,
            window_start: NaiveDate::from_ymd_opt(2020, 3, 24).unwrap(),
            window_end: NaiveDate::from_ymd_opt(2020, 12, 31).unwrap(),
            horizon: 21,
            sigma_beta: DEFAULT_SIGMA_GRID.to_vec(),
            n_chains: 6,
            n_samples: 512,
            n_warmup: 256,
            target_accept: 0.234,
            substeps_per_day: 4,
            seed: 0,
            out_dir: PathBuf::from("out"),
            beta_knots: None,
            rho_admissions_knots: None,
            rho_calls_knots: None,
            init: InitIntervals::default(),
            synthetic: None,
        }
    }
}

/// TOML schema mirroring [`RunConfig`], all fields optional.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileConfig {
    seed: Option<u64>,
    data: Option<DataSection>,
    window: Option<WindowSection>,
    sweep: Option<SweepSection>,
    chains: Option<ChainsSection>,
    integrator: Option<IntegratorSection>,
    knots: Option<KnotsSection>,
    init: Option<InitIntervals>,
    output: Option<OutputSection>,
    synthetic: Option<SyntheticConfig>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct DataSection {
    deaths: Option<PathBuf>,
    admissions: Option<PathBuf>,
    calls: Option<PathBuf>,
    population: Option<u64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct WindowSection {
    start: Option<String>,
    end: Option<String>,
    horizon: Option<u32>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct SweepSection {
    sigma_beta: Option<Vec<f64>>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct ChainsSection {
    n_chains: Option<usize>,
    n_samples: Option<usize>,
    n_warmup: Option<usize>,
    target_accept: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct IntegratorSection {
    substeps_per_day: Option<u32>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct KnotsSection {
    beta: Option<Vec<String>>,
    rho_admissions: Option<Vec<String>>,
    rho_calls: Option<Vec<String>>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct OutputSection {
    dir: Option<PathBuf>,
}

/// Command-line overrides, applied after the config file.
#[derive(Debug, Default, Clone)]
pub struct Overrides {
    pub deaths: Option<PathBuf>,
    pub admissions: Option<PathBuf>,
    pub calls: Option<PathBuf>,
    pub population: Option<u64>,
    pub window_start: Option<String>,
    pub window_end: Option<String>,
    pub horizon: Option<u32>,
    pub sigma_beta: Option<Vec<f64>>,
    pub n_chains: Option<usize>,
    pub n_samples: Option<usize>,
    pub n_warmup: Option<usize>,
    pub target_accept: Option<f64>,
    pub substeps_per_day: Option<u32>,
    pub seed: Option<u64>,
    pub out_dir: Option<PathBuf>,
}

impl RunConfig {
    /// Defaults, then the config file (if given), then flag overrides.
    pub fn resolve(config_path: Option<&Path>, overrides: &Overrides) -> Result<Self> {
        let mut cfg = RunConfig::default();
        if let Some(path) = config_path {
            let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
            let file: FileConfig = toml::from_str(&text)
                .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
            cfg.apply_file(file)?;
        }
        cfg.apply_overrides(overrides)?;
        cfg.validate()?;
        Ok(cfg)
    }

    fn apply_file(&mut self, file: FileConfig) -> Result<()> {
        if let Some(seed) = file.seed {
            self.seed = seed;
        }
        if let Some(data) = file.data {
            self.deaths = data.deaths.or(self.deaths.take());
            self.admissions = data.admissions.or(self.admissions.take());
            self.calls = data.calls.or(self.calls.take());
            if let Some(n) = data.population {
                self.population = n;
            }
        }
        if let Some(window) = file.window {
            if let Some(s) = window.start {
                self.window_start = parse_date(&s)?;
            }
            if let Some(e) = window.end {
                self.window_end = parse_date(&e)?;
            }
            if let Some(h) = window.horizon {
                self.horizon = h;
            }
        }
        if let Some(sweep) = file.sweep {
            if let Some(s) = sweep.sigma_beta {
                self.sigma_beta = s;
            }
        }
        if let Some(chains) = file.chains {
            if let Some(v) = chains.n_chains {
                self.n_chains = v;
            }
            if let Some(v) = chains.n_samples {
                self.n_samples = v;
            }
            if let Some(v) = chains.n_warmup {
                self.n_warmup = v;
            }
            if let Some(v) = chains.target_accept {
                self.target_accept = v;
            }
        }
        if let Some(integ) = file.integrator {
            if let Some(v) = integ.substeps_per_day {
                self.substeps_per_day = v;
            }
        }
        if let Some(knots) = file.knots {
            self.beta_knots = parse_knot_dates(knots.beta)?;
            self.rho_admissions_knots = parse_knot_dates(knots.rho_admissions)?;
            self.rho_calls_knots = parse_knot_dates(knots.rho_calls)?;
        }
        if let Some(init) = file.init {
            self.init = init;
        }
        if let Some(output) = file.output {
            if let Some(dir) = output.dir {
                self.out_dir = dir;
            }
        }
        self.synthetic = file.synthetic.or(self.synthetic.take());
        Ok(())
    }

    fn apply_overrides(&mut self, ov: &Overrides) -> Result<()> {
        if let Some(v) = &ov.deaths {
            self.deaths = Some(v.clone());
        }
        if let Some(v) = &ov.admissions {
            self.admissions = Some(v.clone());
        }
        if let Some(v) = &ov.calls {
            self.calls = Some(v.clone());
        }
        if let Some(v) = ov.population {
            self.population = v;
        }
        if let Some(v) = &ov.window_start {
            self.window_start = parse_date(v)?;
        }
        if let Some(v) = &ov.window_end {
            self.window_end = parse_date(v)?;
        }
        if let Some(v) = ov.horizon {
            self.horizon = v;
        }
        if let Some(v) = &ov.sigma_beta {
            self.sigma_beta = v.clone();
        }
        if let Some(v) = ov.n_chains {
            self.n_chains = v;
        }
        if let Some(v) = ov.n_samples {
            self.n_samples = v;
        }
        if let Some(v) = ov.n_warmup {
            self.n_warmup = v;
        }
        if let Some(v) = ov.target_accept {
            self.target_accept = v;
        }
        if let Some(v) = ov.substeps_per_day {
            self.substeps_per_day = v;
        }
        if let Some(v) = ov.seed {
            self.seed = v;
        }
        if let Some(v) = &ov.out_dir {
            self.out_dir = v.clone();
        }
        Ok(())
    }

    fn validate(&self) -> Result<()> {
        if self.window_start >= self.window_end {
            return Err(CliError::Config(format!(
                "calibration window start {} must precede end {}",
                self.window_start, self.window_end
            )));
        }
        if dates::day_of(self.window_start) < 1 {
            return Err(CliError::Config(format!(
                "calibration window must start on or after {} (daily deaths need a previous day)",
                dates::date_of(1)
            )));
        }
        if self.sigma_beta.is_empty() || self.sigma_beta.iter().any(|&s| !(s > 0.0)) {
            return Err(CliError::Config(
                "sigma_beta values must be a non-empty list of positives".into(),
            ));
        }
        if self.horizon == 0 {
            return Err(CliError::Config("forecast horizon must be >= 1".into()));
        }
        if self.n_warmup >= self.n_samples {
            return Err(CliError::Config(
                "chain warmup must be smaller than the per-chain sample count".into(),
            ));
        }
        if self.substeps_per_day == 0 {
            return Err(CliError::Config("substeps_per_day must be >= 1".into()));
        }
        if self.population < 6 {
            return Err(CliError::Config("population must be >= 6".into()));
        }
        Ok(())
    }

    pub fn window_start_day(&self) -> i64 {
        dates::day_of(self.window_start)
    }

    pub fn window_end_day(&self) -> i64 {
        dates::day_of(self.window_end)
    }

    /// Knot schedules as model-day grids: explicit dates when configured,
    /// otherwise the default schedules derived from the calibration window.
    pub fn knot_schedules(&self) -> Result<(Vec<f64>, Vec<f64>, Vec<f64>)> {
        let end = self.window_end_day();
        let beta = match &self.beta_knots {
            Some(dates_) => dates_to_days(dates_)?,
            None => default_beta_schedule(end),
        };
        let rho_adm = match &self.rho_admissions_knots {
            Some(dates_) => dates_to_days(dates_)?,
            None => default_rho_admissions_schedule(end),
        };
        let rho_calls = match &self.rho_calls_knots {
            Some(dates_) => dates_to_days(dates_)?,
            None => default_rho_calls_schedule(end),
        };
        Ok((beta, rho_adm, rho_calls))
    }

    /// Parameter layout implied by the knot schedules.
    pub fn layout(&self) -> Result<ParamLayout> {
        let (beta, rho_adm, rho_calls) = self.knot_schedules()?;
        ParamLayout::new(beta, rho_adm, rho_calls).map_err(CliError::from)
    }

    /// Chain configuration for one calibration job.
    pub fn chain_config(&self, layout: &ParamLayout, seed: u64) -> ChainConfig {
        ChainConfig {
            n_chains: self.n_chains,
            n_samples: self.n_samples,
            n_warmup: self.n_warmup,
            seed,
            target_accept: self.target_accept,
            init: self.init.table(layout),
        }
    }
}

fn parse_knot_dates(dates_: Option<Vec<String>>) -> Result<Option<Vec<NaiveDate>>> {
    match dates_ {
        None => Ok(None),
        Some(raw) => {
            let parsed = raw
                .iter()
                .map(|s| parse_date(s))
                .collect::<Result<Vec<_>>>()?;
            Ok(Some(parsed))
        }
    }
}

fn dates_to_days(dates_: &[NaiveDate]) -> Result<Vec<f64>> {
    if dates_.len() < 2 {
        return Err(CliError::Config("knot schedules need >= 2 dates".into()));
    }
    Ok(dates_.iter().map(|&d| dates::day_of(d) as f64).collect())
}

/// β knots: model day 0 (17 Feb 2020), then day 36 (24 Mar 2020, the day
/// after the first national lockdown was announced), then weekly up to the
/// calibration window end.
pub fn default_beta_schedule(window_end_day: i64) -> Vec<f64> {
    let mut days = vec![0.0, 36.0];
    let mut d = 36 + 7;
    while d <= window_end_day {
        days.push(d as f64);
        d += 7;
    }
    days
}

/// Admission-ratio knots: day 36, then every twelve weeks.
pub fn default_rho_admissions_schedule(window_end_day: i64) -> Vec<f64> {
    let mut days = vec![36.0];
    let mut d = 36 + 84;
    while d <= window_end_day {
        days.push(d as f64);
        d += 84;
    }
    if days.len() < 2 {
        days.push((36 + 84) as f64);
    }
    days
}

/// Call-ratio knots: day 36, then every four weeks from day 64
/// (21 Apr 2020).
pub fn default_rho_calls_schedule(window_end_day: i64) -> Vec<f64> {
    let mut days = vec![36.0];
    let mut d = 64;
    while d <= window_end_day {
        days.push(d as f64);
        d += 28;
    }
    if days.len() < 2 {
        days.push(64.0);
    }
    days
}
