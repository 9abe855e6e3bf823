//! The smoothness-hyperparameter sweep: calibrate at every σ_β, build both
//! forecast modes, score against held-out observations, and emit the score
//! table, plot-ready quantile files, the best-σ selection, and a metadata
//! file with config echo, input hashes, and diagnostics.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use sha2::{Digest, Sha256};

use seiprd::forecast::ForecastMode;
use seiprd::scoring::{ScoreReport, ScoringRule};

use crate::config::RunConfig;
use crate::error::{CliError, Result};
use crate::pipeline::{
    build_forecasts, calibrate, forecast_window, load_data, score_forecast, write_components_csv,
    write_daily_scores_csv, write_diagnostics_csv, write_draws_csv, write_quantiles_csv,
    LoadedData,
};

/// Outcome of one σ_β cell.
pub enum CellOutcome {
    Done(CellResult),
    /// The cell was abandoned (e.g. chain initialisation failure); the sweep
    /// continues.
    Aborted { reason: String },
}

pub struct CellResult {
    pub sigma_beta: f64,
    pub point: ScoreReport,
    pub samples: ScoreReport,
    pub diverged: u64,
    pub dropped_draws: [usize; 2],
    pub truncation_cap_hits: usize,
    pub max_k_max: u64,
    pub warnings: usize,
}

pub struct SweepOutputs {
    pub cells: Vec<(f64, CellOutcome)>,
    pub best: BestSelection,
    pub out_dir: PathBuf,
}

/// Best σ_β per (block, rule) and per block overall.
pub struct BestSelection {
    /// (block, rule label) -> σ_β.
    pub per_rule: BTreeMap<(String, String), f64>,
    /// block -> majority winner across rules.
    pub overall: BTreeMap<String, f64>,
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Deterministic per-cell seed derivation.
pub fn cell_seed(base: u64, cell_index: usize) -> u64 {
    splitmix64(base ^ splitmix64(cell_index as u64 + 1))
}

fn sigma_dir(out_dir: &Path, sigma: f64) -> PathBuf {
    out_dir.join(format!("sigma_{sigma}"))
}

fn run_cell(
    cfg: &RunConfig,
    data: &LoadedData,
    sigma: f64,
    seed: u64,
    out_dir: &Path,
) -> Result<CellResult> {
    let cal = calibrate(cfg, data, sigma, seed)?;
    let dir = sigma_dir(out_dir, sigma);
    write_draws_csv(&dir.join("draws.csv"), &cal)?;
    write_diagnostics_csv(&dir.join("diagnostics.csv"), &cal)?;

    let forecasts = build_forecasts(cfg, &cal.layout, &cal.constrained)?;
    let mut reports: Vec<(ForecastMode, ScoreReport)> = Vec::new();
    let mut dropped = [0usize; 2];
    let mut cap_hits = 0usize;
    let mut max_k_max = 0u64;
    for (i, (mode, set)) in forecasts.iter().enumerate() {
        write_quantiles_csv(
            &dir.join(format!("quantiles_{}.csv", mode.name())),
            set,
            &data.full.deaths,
        )?;
        let window = forecast_window(cfg, set);
        write_components_csv(&dir.join(format!("components_{}.csv", mode.name())), &window)?;
        let (rows, report) = score_forecast(&window, &data.full.deaths)?;
        write_daily_scores_csv(&dir.join(format!("daily_scores_{}.csv", mode.name())), &rows)?;
        for (_, dist) in &window {
            max_k_max = max_k_max.max(dist.k_max());
            if dist.truncation_cap_hit() {
                cap_hits += 1;
            }
        }
        dropped[i] = set.dropped_draws;
        reports.push((*mode, report));
    }
    crate::pipeline::write_mean_scores_csv(
        &dir.join("mean_scores.csv"),
        &reports.iter().map(|(m, r)| (*m, r)).collect::<Vec<_>>(),
    )?;

    let point = reports
        .iter()
        .find(|(m, _)| *m == ForecastMode::PointEstimate)
        .map(|(_, r)| r.clone())
        .expect("point report present");
    let samples = reports
        .iter()
        .find(|(m, _)| *m == ForecastMode::PosteriorSamples)
        .map(|(_, r)| r.clone())
        .expect("samples report present");

    Ok(CellResult {
        sigma_beta: sigma,
        point,
        samples,
        diverged: cal.diverged,
        dropped_draws: dropped,
        truncation_cap_hits: cap_hits,
        max_k_max,
        warnings: cal.draws.warnings.len(),
    })
}

/// Whether a cell failure leaves the sweep able to continue.
fn is_recoverable(err: &CliError) -> bool {
    matches!(err, CliError::Init(_) | CliError::Numeric(_))
}

pub fn run_sweep(cfg: &RunConfig) -> Result<SweepOutputs> {
    let data = load_data(cfg)?;
    let out_dir = cfg.out_dir.clone();
    std::fs::create_dir_all(&out_dir).map_err(|e| CliError::io(&out_dir, e))?;

    let mut cells = Vec::new();
    for (i, &sigma) in cfg.sigma_beta.iter().enumerate() {
        let seed = cell_seed(cfg.seed, i);
        match run_cell(cfg, &data, sigma, seed, &out_dir) {
            Ok(result) => cells.push((sigma, CellOutcome::Done(result))),
            Err(err) if is_recoverable(&err) => cells.push((
                sigma,
                CellOutcome::Aborted {
                    reason: format!("{} ({})", err, err.category()),
                },
            )),
            Err(err) => return Err(err),
        }
    }
    if !cells.iter().any(|(_, c)| matches!(c, CellOutcome::Done(_))) {
        return Err(CliError::Init("every sweep cell failed".into()));
    }

    let best = select_best(&cells);
    write_score_table(&out_dir.join("score_table.csv"), &cells)?;
    write_best_sigma(&out_dir.join("best_sigma.csv"), &best)?;
    write_metadata(&out_dir.join("metadata.txt"), cfg, &cells)?;

    Ok(SweepOutputs {
        cells,
        best,
        out_dir,
    })
}

/// Table 3 layout: one row per mean score, one column per σ_β, the
/// point-estimate block on top of the posterior-samples block.
fn write_score_table(path: &Path, cells: &[(f64, CellOutcome)]) -> Result<()> {
    let mut out = String::from("block,rule");
    for (sigma, _) in cells {
        write!(out, ",{sigma}").expect("write to string");
    }
    out.push('\n');
    for (block, pick) in [
        ("point", 0usize),
        ("samples", 1usize),
    ] {
        for rule in ScoringRule::ALL {
            write!(out, "{block},{}", rule.label()).expect("write to string");
            for (_, outcome) in cells {
                match outcome {
                    CellOutcome::Done(cell) => {
                        let report = if pick == 0 { &cell.point } else { &cell.samples };
                        write!(out, ",{}", report.means.get(rule)).expect("write to string");
                    }
                    CellOutcome::Aborted { .. } => out.push_str(",NA"),
                }
            }
            out.push('\n');
        }
    }
    std::fs::write(path, out).map_err(|e| CliError::io(path, e))
}

/// Best σ_β per rule: lowest mean for the proper rules; for NSES the value
/// closest to one from below (closest overall if every cell is
/// over-confident). Per block, the overall winner is the majority vote
/// across rules, ties to the smaller σ_β.
fn select_best(cells: &[(f64, CellOutcome)]) -> BestSelection {
    let mut per_rule = BTreeMap::new();
    let mut overall = BTreeMap::new();
    for (block, pick) in [("point", 0usize), ("samples", 1usize)] {
        let mut votes: BTreeMap<u64, (usize, f64)> = BTreeMap::new();
        for rule in ScoringRule::ALL {
            let candidates: Vec<(f64, f64)> = cells
                .iter()
                .filter_map(|(sigma, outcome)| match outcome {
                    CellOutcome::Done(cell) => {
                        let report = if pick == 0 { &cell.point } else { &cell.samples };
                        Some((*sigma, report.means.get(rule)))
                    }
                    CellOutcome::Aborted { .. } => None,
                })
                .filter(|(_, v)| v.is_finite())
                .collect();
            if candidates.is_empty() {
                continue;
            }
            let winner = if rule.is_proper() {
                candidates
                    .iter()
                    .min_by(|a, b| a.1.total_cmp(&b.1))
                    .map(|(s, _)| *s)
                    .expect("non-empty candidates")
            } else {
                let below: Vec<&(f64, f64)> =
                    candidates.iter().filter(|(_, v)| *v <= 1.0).collect();
                if below.is_empty() {
                    candidates
                        .iter()
                        .min_by(|a, b| (a.1 - 1.0).abs().total_cmp(&(b.1 - 1.0).abs()))
                        .map(|(s, _)| *s)
                        .expect("non-empty candidates")
                } else {
                    below
                        .iter()
                        .max_by(|a, b| a.1.total_cmp(&b.1))
                        .map(|(s, _)| *s)
                        .expect("non-empty below")
                }
            };
            per_rule.insert((block.to_string(), rule.label().to_string()), winner);
            let entry = votes.entry(winner.to_bits()).or_insert((0, winner));
            entry.0 += 1;
        }
        // Highest vote count wins; ties break towards the smaller σ.
        if let Some((_, (_, sigma))) = votes
            .iter()
            .max_by(|a, b| (a.1 .0.cmp(&b.1 .0)).then(b.1 .1.total_cmp(&a.1 .1)))
        {
            overall.insert(block.to_string(), *sigma);
        }
    }
    BestSelection { per_rule, overall }
}

fn write_best_sigma(path: &Path, best: &BestSelection) -> Result<()> {
    let mut out = String::from("block,rule,sigma_beta\n");
    for ((block, rule), sigma) in &best.per_rule {
        writeln!(out, "{block},{rule},{sigma}").expect("write to string");
    }
    for (block, sigma) in &best.overall {
        writeln!(out, "{block},overall,{sigma}").expect("write to string");
    }
    std::fs::write(path, out).map_err(|e| CliError::io(path, e))
}

fn sha256_hex(path: &Path) -> Result<String> {
    let bytes = std::fs::read(path).map_err(|e| CliError::io(path, e))?;
    let digest = Sha256::digest(&bytes);
    Ok(digest.iter().map(|b| format!("{b:02x}")).collect())
}

/// Structured key-value metadata: config echo, input content hashes, and
/// per-cell diagnostics. No timestamps, so reruns are byte-identical.
fn write_metadata(path: &Path, cfg: &RunConfig, cells: &[(f64, CellOutcome)]) -> Result<()> {
    let mut kv: BTreeMap<String, String> = BTreeMap::new();
    kv.insert("config.population".into(), cfg.population.to_string());
    kv.insert("config.window.start".into(), cfg.window_start.to_string());
    kv.insert("config.window.end".into(), cfg.window_end.to_string());
    kv.insert("config.window.horizon".into(), cfg.horizon.to_string());
    kv.insert(
        "config.sweep.sigma_beta".into(),
        cfg.sigma_beta
            .iter()
            .map(|s| s.to_string())
            .collect::<Vec<_>>()
            .join(","),
    );
    kv.insert("config.chains.n_chains".into(), cfg.n_chains.to_string());
    kv.insert("config.chains.n_samples".into(), cfg.n_samples.to_string());
    kv.insert("config.chains.n_warmup".into(), cfg.n_warmup.to_string());
    kv.insert(
        "config.chains.target_accept".into(),
        cfg.target_accept.to_string(),
    );
    kv.insert(
        "config.integrator.substeps_per_day".into(),
        cfg.substeps_per_day.to_string(),
    );
    kv.insert("config.seed".into(), cfg.seed.to_string());
    let (beta, rho_adm, rho_calls) = cfg.knot_schedules()?;
    kv.insert("config.knots.beta.count".into(), beta.len().to_string());
    kv.insert(
        "config.knots.rho_admissions.count".into(),
        rho_adm.len().to_string(),
    );
    kv.insert(
        "config.knots.rho_calls.count".into(),
        rho_calls.len().to_string(),
    );

    for (name, path_opt) in [
        ("deaths", &cfg.deaths),
        ("admissions", &cfg.admissions),
        ("calls", &cfg.calls),
    ] {
        if let Some(p) = path_opt {
            kv.insert(format!("input.{name}.sha256"), sha256_hex(p)?);
        }
    }

    for (sigma, outcome) in cells {
        let prefix = format!("cell.sigma_{sigma}");
        match outcome {
            CellOutcome::Done(cell) => {
                kv.insert(format!("{prefix}.status"), "done".into());
                kv.insert(format!("{prefix}.diverged"), cell.diverged.to_string());
                kv.insert(
                    format!("{prefix}.dropped_draws.point"),
                    cell.dropped_draws[0].to_string(),
                );
                kv.insert(
                    format!("{prefix}.dropped_draws.samples"),
                    cell.dropped_draws[1].to_string(),
                );
                kv.insert(
                    format!("{prefix}.truncation.cap_hits"),
                    cell.truncation_cap_hits.to_string(),
                );
                kv.insert(
                    format!("{prefix}.truncation.max_k_max"),
                    cell.max_k_max.to_string(),
                );
                kv.insert(
                    format!("{prefix}.chain_warnings"),
                    cell.warnings.to_string(),
                );
            }
            CellOutcome::Aborted { reason } => {
                kv.insert(format!("{prefix}.status"), "aborted".into());
                kv.insert(format!("{prefix}.reason"), reason.clone());
            }
        }
    }

    let mut out = String::new();
    for (k, v) in kv {
        writeln!(out, "{k} = {v}").expect("write to string");
    }
    std::fs::write(path, out).map_err(|e| CliError::io(path, e))
}
