//! Subcommand implementations.

use std::path::Path;

use seiprd::dates;
use seiprd::scenario::desk_scale;

use crate::cli::{CalibrateArgs, ForecastArgs, Preset, ScoreArgs, SimulateArgs};
use crate::config::RunConfig;
use crate::error::{CliError, Result};
use crate::pipeline::{
    build_forecasts, calibrate, forecast_window, load_data, read_draws_csv, score_forecast,
    write_components_csv, write_daily_scores_csv, write_diagnostics_csv, write_draws_csv,
    write_mean_scores_csv, write_quantiles_csv,
};
use crate::sweep::run_sweep;
use crate::synthetic::{
    desk_synthetic_config, params_from_config, simulate_synthetic, write_series_csv,
};

fn ensure_out_dir(cfg: &RunConfig) -> Result<()> {
    std::fs::create_dir_all(&cfg.out_dir).map_err(|e| CliError::io(&cfg.out_dir, e))
}

pub fn simulate(args: &SimulateArgs) -> Result<()> {
    let mut cfg = RunConfig::resolve(args.common.config.as_deref(), &args.common.overrides())?;

    let (tp, op, echo) = match args.preset {
        Some(Preset::Desk) => {
            let sc = desk_scale();
            // The preset fixes population, window, and knots unless flags
            // explicitly override them later in this run.
            cfg.population = sc.transmission.n_population;
            cfg.window_start = dates::date_of(sc.calibration_start);
            cfg.window_end = dates::date_of(sc.calibration_end);
            cfg.horizon = sc.horizon;
            let echo = desk_synthetic_config(&sc);
            (sc.transmission, sc.observation, echo)
        }
        None => {
            let syn = cfg.synthetic.clone().ok_or_else(|| {
                CliError::Config(
                    "simulate needs a [synthetic] config section or --preset desk".into(),
                )
            })?;
            let (tp, op) = params_from_config(&syn, cfg.population)?;
            (tp, op, syn)
        }
    };

    ensure_out_dir(&cfg)?;
    // Emit from day 1 (daily deaths need a previous day) through the end of
    // the forecast window, so held-out scoring reads from the same files.
    let first = 1;
    let last = cfg.window_end_day() + cfg.horizon as i64;
    let data = simulate_synthetic(&tp, &op, first, last, cfg.substeps_per_day, cfg.seed)?;

    write_series_csv(&cfg.out_dir.join("deaths.csv"), &data.deaths)?;
    write_series_csv(&cfg.out_dir.join("admissions.csv"), &data.admissions)?;
    write_series_csv(&cfg.out_dir.join("calls.csv"), &data.calls)?;

    let truth = TruthFile {
        seed: cfg.seed,
        population: cfg.population,
        window_start: cfg.window_start.to_string(),
        window_end: cfg.window_end.to_string(),
        horizon: cfg.horizon,
        synthetic: echo,
    };
    let text = toml::to_string_pretty(&truth)
        .map_err(|e| CliError::Internal(format!("serialising truth file: {e}")))?;
    std::fs::write(cfg.out_dir.join("truth.toml"), text)
        .map_err(|e| CliError::io(cfg.out_dir.join("truth.toml"), e))?;

    println!(
        "wrote {} days of synthetic data to {}",
        last - first + 1,
        cfg.out_dir.display()
    );
    Ok(())
}

#[derive(serde::Serialize)]
struct TruthFile {
    seed: u64,
    population: u64,
    window_start: String,
    window_end: String,
    horizon: u32,
    synthetic: crate::config::SyntheticConfig,
}

fn single_sigma(cfg: &RunConfig) -> Result<f64> {
    if cfg.sigma_beta.len() != 1 {
        return Err(CliError::Config(format!(
            "this command needs exactly one sigma_beta value, got {} (pass --sigma-beta <value>)",
            cfg.sigma_beta.len()
        )));
    }
    Ok(cfg.sigma_beta[0])
}

pub fn run_calibrate(args: &CalibrateArgs) -> Result<()> {
    let cfg = RunConfig::resolve(args.common.config.as_deref(), &args.common.overrides())?;
    let sigma = single_sigma(&cfg)?;
    let data = load_data(&cfg)?;
    ensure_out_dir(&cfg)?;
    let cal = calibrate(&cfg, &data, sigma, cfg.seed)?;
    write_draws_csv(&cfg.out_dir.join("draws.csv"), &cal)?;
    write_diagnostics_csv(&cfg.out_dir.join("diagnostics.csv"), &cal)?;
    let max_rhat = cal
        .draws
        .rhat
        .iter()
        .cloned()
        .fold(f64::NAN, |a, b| if a.is_nan() || b > a { b } else { a });
    println!(
        "retained {} draws at sigma_beta = {sigma} (max split R-hat {max_rhat:.3}, {} divergent evaluations)",
        cal.constrained.len(),
        cal.diverged
    );
    for warning in &cal.draws.warnings {
        eprintln!("warning: {warning}");
    }
    Ok(())
}

pub fn run_forecast(args: &ForecastArgs) -> Result<()> {
    let cfg = RunConfig::resolve(args.common.config.as_deref(), &args.common.overrides())?;
    let data = load_data(&cfg)?;
    let layout = cfg.layout()?;
    let pooled = read_draws_csv(&args.draws, &layout)?;
    ensure_out_dir(&cfg)?;
    let forecasts = build_forecasts(&cfg, &layout, &pooled)?;
    for (mode, set) in &forecasts {
        write_quantiles_csv(
            &cfg.out_dir.join(format!("quantiles_{}.csv", mode.name())),
            set,
            &data.full.deaths,
        )?;
        let window = forecast_window(&cfg, set);
        write_components_csv(
            &cfg.out_dir.join(format!("components_{}.csv", mode.name())),
            &window,
        )?;
        if set.dropped_draws > 0 {
            eprintln!(
                "warning: {} draws dropped during {} forecasting (diverged trajectories)",
                set.dropped_draws,
                mode.name()
            );
        }
    }
    println!(
        "wrote forecast quantiles and components for {} draws to {}",
        pooled.len(),
        cfg.out_dir.display()
    );
    Ok(())
}

pub fn run_score(args: &ScoreArgs) -> Result<()> {
    let cfg = RunConfig::resolve(args.common.config.as_deref(), &args.common.overrides())?;
    let data = load_data(&cfg)?;
    let layout = cfg.layout()?;
    let pooled = read_draws_csv(&args.draws, &layout)?;
    ensure_out_dir(&cfg)?;
    let forecasts = build_forecasts(&cfg, &layout, &pooled)?;
    let mut reports = Vec::new();
    for (mode, set) in &forecasts {
        let window = forecast_window(&cfg, set);
        let (rows, report) = score_forecast(&window, &data.full.deaths)?;
        write_daily_scores_csv(
            &cfg.out_dir.join(format!("daily_scores_{}.csv", mode.name())),
            &rows,
        )?;
        reports.push((*mode, report));
    }
    write_mean_scores_csv(
        &cfg.out_dir.join("mean_scores.csv"),
        &reports.iter().map(|(m, r)| (*m, r)).collect::<Vec<_>>(),
    )?;
    for (mode, report) in &reports {
        println!(
            "{}: RPS {:.3} DSS {:.3} NSES {:.3} ({:?})",
            mode.name(),
            report.means.rps,
            report.means.dss,
            report.means.nses,
            report.nses_verdict
        );
    }
    Ok(())
}

pub fn run_sweep_cmd(common: &crate::cli::CommonArgs) -> Result<()> {
    let cfg = RunConfig::resolve(common.config.as_deref(), &common.overrides())?;
    let outputs = run_sweep(&cfg)?;
    for (sigma, outcome) in &outputs.cells {
        match outcome {
            crate::sweep::CellOutcome::Done(cell) => println!(
                "sigma_beta {sigma}: point RPS {:.3} / samples RPS {:.3}",
                cell.point.means.rps, cell.samples.means.rps
            ),
            crate::sweep::CellOutcome::Aborted { reason } => {
                println!("sigma_beta {sigma}: aborted ({reason})")
            }
        }
    }
    for (block, sigma) in &outputs.best.overall {
        println!("best sigma_beta ({block} block): {sigma}");
    }
    println!("outputs in {}", outputs.out_dir.display());
    Ok(())
}

/// Shared helper for tests: run any subcommand against an explicit config
/// path without going through the process boundary.
pub fn sweep_with_config(config: &Path) -> Result<crate::sweep::SweepOutputs> {
    let cfg = RunConfig::resolve(Some(config), &crate::config::Overrides::default())?;
    run_sweep(&cfg)
}
