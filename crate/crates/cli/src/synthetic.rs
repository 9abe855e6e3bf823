//! Synthetic surveillance data: integrate known parameters, draw
//! negative-binomial counts per day per stream, drop weekend days from the
//! calls stream to mirror the real feed.

use std::path::Path;

use chrono::NaiveDate;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use seiprd::dates;
use seiprd::integrator::{integrate_daily, IntegratorConfig};
use seiprd::model::{PiecewiseLinear, TransmissionParams};
use seiprd::observation::{
    latent_means, sample_nb, CountSeries, ObservationParams, ObservedData,
};
use seiprd::scenario::Scenario;

use crate::config::SyntheticConfig;
use crate::error::{CliError, Result};

/// Draw one synthetic dataset covering days `first_day..=last_day`.
///
/// Deaths start no earlier than day 1; admissions and calls no earlier than
/// day 0; Saturdays and Sundays are dropped from the calls stream.
pub fn simulate_synthetic(
    tp: &TransmissionParams,
    op: &ObservationParams,
    first_day: i64,
    last_day: i64,
    substeps_per_day: u32,
    seed: u64,
) -> Result<ObservedData> {
    if last_day < 1 || first_day > last_day {
        return Err(CliError::Config(format!(
            "invalid synthetic window {first_day}..{last_day}"
        )));
    }
    let cfg = IntegratorConfig::new(substeps_per_day, last_day as u32)?;
    let traj = integrate_daily(tp, &cfg)?;
    let means = latent_means(&traj, tp, op);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    let mut deaths_days = Vec::new();
    let mut deaths_counts = Vec::new();
    for day in first_day.max(1)..=last_day {
        deaths_days.push(day);
        deaths_counts.push(sample_nb(
            &mut rng,
            means.deaths.get(day).expect("death mean in span"),
            op.phi_deaths,
        ));
    }

    let mut adm_days = Vec::new();
    let mut adm_counts = Vec::new();
    for day in first_day.max(0)..=last_day {
        adm_days.push(day);
        adm_counts.push(sample_nb(
            &mut rng,
            means.admissions.get(day).expect("admission mean in span"),
            op.phi_admissions,
        ));
    }

    let mut call_days = Vec::new();
    let mut call_counts = Vec::new();
    for day in first_day.max(0)..=last_day {
        if dates::is_weekend(day) {
            continue;
        }
        call_days.push(day);
        call_counts.push(sample_nb(
            &mut rng,
            means.calls.get(day).expect("calls mean in span"),
            op.phi_calls,
        ));
    }

    Ok(ObservedData {
        deaths: CountSeries::new(deaths_days, deaths_counts)?,
        admissions: CountSeries::new(adm_days, adm_counts)?,
        calls: CountSeries::new(call_days, call_counts)?,
    })
}

/// Write one stream as a `date,count` CSV.
pub fn write_series_csv(path: &Path, series: &CountSeries) -> Result<()> {
    let mut out = String::from("date,count\n");
    for (day, count) in series.iter() {
        out.push_str(&format!("{},{count}\n", dates::date_of(day)));
    }
    std::fs::write(path, out).map_err(|e| CliError::io(path, e))
}

/// Parameters for generation, assembled from a config section.
pub fn params_from_config(
    syn: &SyntheticConfig,
    population: u64,
) -> Result<(TransmissionParams, ObservationParams)> {
    let to_days = |labels: &[String]| -> Result<Vec<f64>> {
        labels
            .iter()
            .map(|s| {
                NaiveDate::parse_from_str(s, "%Y-%m-%d")
                    .map(|d| dates::day_of(d) as f64)
                    .map_err(|e| CliError::Config(format!("invalid knot date '{s}': {e}")))
            })
            .collect()
    };
    let tp = TransmissionParams {
        alpha1: syn.alpha1,
        alpha2: syn.alpha2,
        beta: PiecewiseLinear::new(to_days(&syn.beta_knots)?, syn.beta_values.clone())?,
        d_l: syn.d_l,
        d_i: syn.d_i,
        d_p: syn.d_p,
        omega: syn.omega,
        n_population: population,
    };
    tp.validate()?;
    let op = ObservationParams {
        phi_deaths: syn.phi_deaths,
        phi_admissions: syn.phi_admissions,
        phi_calls: syn.phi_calls,
        rho_admissions: PiecewiseLinear::new(
            to_days(&syn.rho_admissions_knots)?,
            syn.rho_admissions_values.clone(),
        )?,
        rho_calls: PiecewiseLinear::new(
            to_days(&syn.rho_calls_knots)?,
            syn.rho_calls_values.clone(),
        )?,
    };
    op.validate()?;
    Ok((tp, op))
}

/// The desk preset expressed as a config section (for `truth.toml` echoes).
pub fn desk_synthetic_config(sc: &Scenario) -> SyntheticConfig {
    let fmt = |times: &[f64]| -> Vec<String> {
        times
            .iter()
            .map(|&t| dates::date_of(t as i64).to_string())
            .collect()
    };
    SyntheticConfig {
        alpha1: sc.transmission.alpha1,
        alpha2: sc.transmission.alpha2,
        beta_knots: fmt(sc.transmission.beta.knot_times()),
        beta_values: sc.transmission.beta.knot_values().to_vec(),
        d_l: sc.transmission.d_l,
        d_i: sc.transmission.d_i,
        d_p: sc.transmission.d_p,
        omega: sc.transmission.omega,
        phi_deaths: sc.observation.phi_deaths,
        phi_admissions: sc.observation.phi_admissions,
        phi_calls: sc.observation.phi_calls,
        rho_admissions_knots: fmt(sc.observation.rho_admissions.knot_times()),
        rho_admissions_values: sc.observation.rho_admissions.knot_values().to_vec(),
        rho_calls_knots: fmt(sc.observation.rho_calls.knot_times()),
        rho_calls_values: sc.observation.rho_calls.knot_values().to_vec(),
    }
}
