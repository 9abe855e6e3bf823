//! Fixed-step explicit trapezoidal (Heun) integration of the transmission
//! ODEs on a uniform sub-daily grid, recording the state at each integer day.
//!
//! The step is fixed rather than adaptive so that repeated evaluations inside
//! MCMC are bit-exact reproducible.

use crate::error::{Error, Result};
use crate::model::{initial_state, rhs, CompartmentState, TransmissionParams, N_COMPARTMENTS};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegratorConfig {
    /// Heun sub-steps per model day.
    pub substeps_per_day: u32,
    /// Last model day to record; the trajectory covers days 0..=horizon.
    pub horizon_days: u32,
}

impl IntegratorConfig {
    pub fn new(substeps_per_day: u32, horizon_days: u32) -> Result<Self> {
        if substeps_per_day == 0 {
            return Err(Error::domain("substeps_per_day must be >= 1"));
        }
        if horizon_days == 0 {
            return Err(Error::domain("horizon_days must be >= 1"));
        }
        Ok(IntegratorConfig {
            substeps_per_day,
            horizon_days,
        })
    }
}

/// One recorded state per integer model day, from day 0 to the horizon.
#[derive(Debug, Clone, PartialEq)]
pub struct DailyTrajectory {
    states: Vec<CompartmentState>,
}

impl DailyTrajectory {
    /// State at an integer day, if the trajectory covers it.
    pub fn state(&self, day: i64) -> Option<&CompartmentState> {
        if day < 0 {
            return None;
        }
        self.states.get(day as usize)
    }

    pub fn states(&self) -> &[CompartmentState] {
        &self.states
    }

    /// Last recorded day.
    pub fn horizon(&self) -> i64 {
        self.states.len() as i64 - 1
    }
}

/// One explicit-trapezoidal step: y + (h/2)·[f(t, y) + f(t+h, y + h·f(t, y))].
pub fn heun_step<const D: usize>(
    f: &impl Fn(f64, &[f64; D]) -> [f64; D],
    t: f64,
    y: &[f64; D],
    h: f64,
) -> Result<[f64; D]> {
    let k1 = f(t, y);
    let mut y_pred = [0.0; D];
    for i in 0..D {
        y_pred[i] = y[i] + h * k1[i];
    }
    let k2 = f(t + h, &y_pred);
    let mut out = [0.0; D];
    for i in 0..D {
        out[i] = y[i] + 0.5 * h * (k1[i] + k2[i]);
        if !out[i].is_finite() {
            return Err(Error::domain(format!(
                "non-finite value in Heun step at t = {t}"
            )));
        }
    }
    Ok(out)
}

/// Integrate the transmission model from its initial state, recording each
/// integer day up to the horizon.
///
/// Fails with [`Error::IntegrationDiverged`] if any state magnitude exceeds
/// ten times the population.
pub fn integrate_daily(
    params: &TransmissionParams,
    cfg: &IntegratorConfig,
) -> Result<DailyTrajectory> {
    let blowup = 10.0 * params.n_population as f64;
    let h = 1.0 / cfg.substeps_per_day as f64;
    let f = |t: f64, y: &[f64; N_COMPARTMENTS]| {
        rhs(t, &CompartmentState::from_array(*y), params).to_array()
    };

    let mut y = initial_state(params)?.to_array();
    let mut states = Vec::with_capacity(cfg.horizon_days as usize + 1);
    states.push(CompartmentState::from_array(y));

    for day in 0..cfg.horizon_days {
        for sub in 0..cfg.substeps_per_day {
            let t = day as f64 + sub as f64 * h;
            y = heun_step(&f, t, &y, h)
                .map_err(|_| Error::IntegrationDiverged {
                    day: day as usize + 1,
                })?;
            if y.iter().any(|v| v.abs() > blowup) {
                return Err(Error::IntegrationDiverged {
                    day: day as usize + 1,
                });
            }
        }
        states.push(CompartmentState::from_array(y));
    }
    Ok(DailyTrajectory { states })
}
