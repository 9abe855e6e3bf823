//! Shared machinery behind `calibrate`, `forecast`, `score`, and `sweep`:
//! data loading, one calibration job, predictive construction, scoring, and
//! the delimited-text artefacts.
//!
//! Every float is written with Rust's shortest-roundtrip formatting, so
//! files parse back to bit-identical values and reruns are byte-identical.

use std::fmt::Write as _;
use std::path::Path;

use seiprd::dates;
use seiprd::forecast::{posterior_predictive, ForecastMode, ForecastSet};
use seiprd::integrator::IntegratorConfig;
use seiprd::mcmc::{run_chains, PosteriorDraws};
use seiprd::observation::{CountSeries, ObservedData};
use seiprd::params::{from_unconstrained, ParamLayout, ParamVector};
use seiprd::posterior::Posterior;
use seiprd::prior::PriorConfig;
use seiprd::scoring::{mean_scores, score_all, DayScores, ScoreReport, ScoringRule};

use crate::config::RunConfig;
use crate::error::{CliError, Result};
use crate::ingest::ingest_csv;

pub const QUANTILE_LEVELS: [f64; 5] = [0.025, 0.25, 0.5, 0.75, 0.975];

/// Observed data as read from the CSVs, plus the calibration-window subset.
#[derive(Debug, Clone)]
pub struct LoadedData {
    pub full: ObservedData,
    pub calibration: ObservedData,
}

pub fn load_data(cfg: &RunConfig) -> Result<LoadedData> {
    let deaths = match &cfg.deaths {
        Some(p) => ingest_csv(p)?,
        None => return Err(CliError::Config("no deaths CSV configured".into())),
    };
    let admissions = match &cfg.admissions {
        Some(p) => ingest_csv(p)?,
        None => return Err(CliError::Config("no admissions CSV configured".into())),
    };
    let calls = match &cfg.calls {
        Some(p) => ingest_csv(p)?,
        None => return Err(CliError::Config("no calls CSV configured".into())),
    };
    let full = ObservedData {
        deaths,
        admissions,
        calls,
    };
    let calibration = full.window(cfg.window_start_day(), cfg.window_end_day());
    if calibration.deaths.is_empty()
        && calibration.admissions.is_empty()
        && calibration.calls.is_empty()
    {
        return Err(CliError::Config(
            "no observations fall inside the calibration window".into(),
        ));
    }
    Ok(LoadedData { full, calibration })
}

/// One calibration job: posterior at a single σ_β sampled with the
/// configured chain protocol.
pub struct Calibration {
    pub sigma_beta: f64,
    pub seed: u64,
    pub layout: ParamLayout,
    pub draws: PosteriorDraws,
    /// Retained draws mapped to the constrained scale, pooled in chain order.
    pub constrained: Vec<ParamVector>,
    /// Integrator blow-ups observed while sampling.
    pub diverged: u64,
}

pub fn calibrate(
    cfg: &RunConfig,
    data: &LoadedData,
    sigma_beta: f64,
    seed: u64,
) -> Result<Calibration> {
    let layout = cfg.layout()?;
    let posterior = Posterior::new(
        layout.clone(),
        PriorConfig::with_sigma_beta(sigma_beta),
        data.calibration.clone(),
        IntegratorConfig::new(cfg.substeps_per_day, cfg.window_end_day() as u32)?,
        cfg.population,
    )?;
    let chain_cfg = cfg.chain_config(&layout, seed);
    let draws = run_chains(&posterior, &chain_cfg)?;
    let constrained = draws
        .pooled()
        .map(|u| from_unconstrained(u, &layout).map(|(p, _)| p))
        .collect::<seiprd::Result<Vec<_>>>()?;
    Ok(Calibration {
        sigma_beta,
        seed,
        layout,
        draws,
        constrained,
        diverged: posterior.diverged_count(),
    })
}

/// Both forecast modes over the full reporting span (window start, capped
/// below at day 1, through the end of the forecast horizon).
pub fn build_forecasts(
    cfg: &RunConfig,
    layout: &ParamLayout,
    pooled: &[ParamVector],
) -> Result<[(ForecastMode, ForecastSet); 2]> {
    let span_first = cfg.window_start_day().max(1);
    let span_len = cfg.window_end_day() + cfg.horizon as i64 - span_first + 1;
    let make = |mode: ForecastMode| -> Result<ForecastSet> {
        posterior_predictive(
            pooled,
            layout,
            cfg.population,
            cfg.substeps_per_day,
            span_first - 1,
            span_len as u32,
            mode,
        )
        .map_err(CliError::from)
    };
    Ok([
        (ForecastMode::PointEstimate, make(ForecastMode::PointEstimate)?),
        (
            ForecastMode::PosteriorSamples,
            make(ForecastMode::PosteriorSamples)?,
        ),
    ])
}

/// The trailing `horizon` days of a full-span forecast: the actual
/// out-of-window forecast distributions.
pub fn forecast_window<'a>(
    cfg: &RunConfig,
    set: &'a ForecastSet,
) -> Vec<(i64, &'a seiprd::PredictiveDistribution)> {
    let first_forecast = cfg.window_end_day() + 1;
    set.days
        .iter()
        .enumerate()
        .map(|(i, d)| (set.first_day + i as i64, d))
        .filter(|(day, _)| *day >= first_forecast)
        .collect()
}

/// Score forecast-window days against held-out observations. Days absent
/// from the series are skipped; at least one must be present.
pub fn score_forecast(
    window: &[(i64, &seiprd::PredictiveDistribution)],
    observed: &CountSeries,
) -> Result<(Vec<(i64, u64, DayScores)>, ScoreReport)> {
    let mut per_day = Vec::new();
    for &(day, dist) in window {
        if let Some(count) = observed.get(day) {
            per_day.push((day, count, score_all(dist, count)?));
        }
    }
    if per_day.is_empty() {
        return Err(CliError::Config(
            "no held-out observations fall inside the forecast window".into(),
        ));
    }
    let scores: Vec<DayScores> = per_day.iter().map(|(_, _, s)| *s).collect();
    let report = mean_scores(&scores)?;
    Ok((per_day, report))
}

fn write_file(path: &Path, content: &str) -> Result<()> {
    if let Some(parent) = path.parent() {
        std::fs::create_dir_all(parent).map_err(|e| CliError::io(parent, e))?;
    }
    std::fs::write(path, content).map_err(|e| CliError::io(path, e))
}

/// Retained draws on the constrained scale: chain, iteration, log-density,
/// then one column per parameter.
pub fn write_draws_csv(path: &Path, cal: &Calibration) -> Result<()> {
    let mut out = String::from("chain,iter");
    out.push_str(",log_density");
    for name in cal.layout.names() {
        out.push(',');
        out.push_str(&name);
    }
    out.push('\n');
    let mut pooled_idx = 0;
    for (c, chain) in cal.draws.chains.iter().enumerate() {
        for (i, lp) in chain.log_density.iter().enumerate() {
            let params = &cal.constrained[pooled_idx];
            pooled_idx += 1;
            write!(out, "{c},{i},{lp}").expect("write to string");
            for v in params.values() {
                write!(out, ",{v}").expect("write to string");
            }
            out.push('\n');
        }
    }
    write_file(path, &out)
}

/// Read a draws CSV back, validating the parameter columns against the
/// layout.
pub fn read_draws_csv(path: &Path, layout: &ParamLayout) -> Result<Vec<ParamVector>> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    let mut lines = text.lines();
    let header = lines.next().ok_or_else(|| CliError::Format {
        path: path.to_path_buf(),
        row: 0,
        message: "empty draws file".into(),
    })?;
    let expected: Vec<String> = ["chain", "iter", "log_density"]
        .into_iter()
        .map(String::from)
        .chain(layout.names())
        .collect();
    if header.split(',').map(str::to_string).collect::<Vec<_>>() != expected {
        return Err(CliError::Format {
            path: path.to_path_buf(),
            row: 0,
            message: "draws header does not match the configured parameter layout".into(),
        });
    }
    let mut out = Vec::new();
    for (idx, line) in lines.enumerate() {
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != expected.len() {
            return Err(CliError::Format {
                path: path.to_path_buf(),
                row: idx + 1,
                message: format!("expected {} fields, found {}", expected.len(), fields.len()),
            });
        }
        let values = fields[3..]
            .iter()
            .map(|f| f.parse::<f64>())
            .collect::<std::result::Result<Vec<f64>, _>>()
            .map_err(|e| CliError::Format {
                path: path.to_path_buf(),
                row: idx + 1,
                message: e.to_string(),
            })?;
        out.push(ParamVector::new(values, layout).map_err(CliError::from)?);
    }
    if out.is_empty() {
        return Err(CliError::Format {
            path: path.to_path_buf(),
            row: 0,
            message: "draws file contains no draws".into(),
        });
    }
    Ok(out)
}

/// Per-parameter convergence diagnostics plus posterior moments.
pub fn write_diagnostics_csv(path: &Path, cal: &Calibration) -> Result<()> {
    let names = cal.layout.names();
    let n = cal.constrained.len() as f64;
    let mut out = String::from("parameter,rhat,rhat_degenerate,ess,mean,sd\n");
    for (p, name) in names.iter().enumerate() {
        let mean = cal.constrained.iter().map(|d| d.get(p)).sum::<f64>() / n;
        let var = cal
            .constrained
            .iter()
            .map(|d| (d.get(p) - mean).powi(2))
            .sum::<f64>()
            / (n - 1.0);
        writeln!(
            out,
            "{name},{},{},{},{mean},{}",
            cal.draws.rhat[p],
            cal.draws.rhat_degenerate[p],
            cal.draws.ess[p],
            var.sqrt()
        )
        .expect("write to string");
    }
    write_file(path, &out)
}

/// Daily predictive quantiles over the reporting span, with observed counts
/// where available.
pub fn write_quantiles_csv(
    path: &Path,
    set: &ForecastSet,
    observed: &CountSeries,
) -> Result<()> {
    let mut out = String::from("day,date,observed,mean,q025,q250,q500,q750,q975\n");
    for (i, dist) in set.days.iter().enumerate() {
        let day = set.first_day + i as i64;
        let obs = observed
            .get(day)
            .map(|c| c.to_string())
            .unwrap_or_default();
        write!(out, "{day},{},{obs},{}", dates::date_of(day), dist.mean())
            .expect("write to string");
        for q in QUANTILE_LEVELS {
            let v = dist.quantile(q).map_err(CliError::from)?;
            write!(out, ",{v}").expect("write to string");
        }
        out.push('\n');
    }
    write_file(path, &out)
}

/// Mixture components of the forecast-window distributions, for exact
/// rescoring.
pub fn write_components_csv(
    path: &Path,
    window: &[(i64, &seiprd::PredictiveDistribution)],
) -> Result<()> {
    let mut out = String::from("day,date,mu,phi\n");
    for &(day, dist) in window {
        for c in dist.components() {
            writeln!(out, "{day},{},{},{}", dates::date_of(day), c.mu, c.phi)
                .expect("write to string");
        }
    }
    write_file(path, &out)
}

/// Per-day scores over the forecast window.
pub fn write_daily_scores_csv(path: &Path, rows: &[(i64, u64, DayScores)]) -> Result<()> {
    let mut out = String::from("day,date,observed,logs,qs,sphs,rps,dss,ses,nses\n");
    for (day, count, s) in rows {
        writeln!(
            out,
            "{day},{},{count},{},{},{},{},{},{},{}",
            dates::date_of(*day),
            s.logs,
            s.qs,
            s.sphs,
            s.rps,
            s.dss,
            s.ses,
            s.nses
        )
        .expect("write to string");
    }
    write_file(path, &out)
}

/// Long-format mean scores for one or both modes.
pub fn write_mean_scores_csv(path: &Path, reports: &[(ForecastMode, &ScoreReport)]) -> Result<()> {
    let mut out = String::from("mode,rule,mean\n");
    for (mode, report) in reports {
        for rule in ScoringRule::ALL {
            writeln!(out, "{},{},{}", mode.name(), rule.label(), report.means.get(rule))
                .expect("write to string");
        }
    }
    write_file(path, &out)
}
