//! Observation model: negative-binomial likelihoods connecting the daily
//! trajectory to the three surveillance streams (deaths, hospital
//! admissions, NHS 111 symptom-report calls).

use crate::error::{Error, Result};
use crate::integrator::DailyTrajectory;
use crate::math::ln_gamma;
use crate::model::{PiecewiseLinear, TransmissionParams};
use rand::Rng;
use rand_distr::{Distribution, Gamma, Poisson};

/// Latent observation means below this are clamped up to keep the
/// likelihood finite early in the epidemic.
pub const MEAN_FLOOR: f64 = 1e-10;

/// Parameters of the observation model.
#[derive(Debug, Clone, PartialEq)]
pub struct ObservationParams {
    pub phi_deaths: f64,
    pub phi_admissions: f64,
    pub phi_calls: f64,
    /// Ratio of hospital admissions to potential patients, piecewise linear.
    pub rho_admissions: PiecewiseLinear,
    /// Ratio of symptom reports to potential reporters, piecewise linear.
    pub rho_calls: PiecewiseLinear,
}

impl ObservationParams {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("phi_deaths", self.phi_deaths),
            ("phi_admissions", self.phi_admissions),
            ("phi_calls", self.phi_calls),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::domain(format!("{name} must be > 0, got {v}")));
            }
        }
        for (name, rho) in [
            ("rho_admissions", &self.rho_admissions),
            ("rho_calls", &self.rho_calls),
        ] {
            if !rho.knot_values().iter().all(|&r| r > 0.0 && r < 1.0) {
                return Err(Error::domain(format!("{name} values must lie in (0,1)")));
            }
        }
        Ok(())
    }
}

/// The three surveillance streams.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Stream {
    Deaths,
    Admissions,
    Calls,
}

impl Stream {
    pub const ALL: [Stream; 3] = [Stream::Deaths, Stream::Admissions, Stream::Calls];

    pub fn name(self) -> &'static str {
        match self {
            Stream::Deaths => "deaths",
            Stream::Admissions => "admissions",
            Stream::Calls => "calls",
        }
    }
}

/// A day-indexed series of non-negative counts. Days are strictly
/// increasing; gaps are allowed (the calls feed skips weekends).
#[derive(Debug, Clone, Default, PartialEq)]
pub struct CountSeries {
    days: Vec<i64>,
    counts: Vec<u64>,
}

impl CountSeries {
    pub fn new(days: Vec<i64>, counts: Vec<u64>) -> Result<Self> {
        if days.len() != counts.len() {
            return Err(Error::domain("days/counts length mismatch"));
        }
        if !days.windows(2).all(|w| w[0] < w[1]) {
            return Err(Error::domain("days must be strictly increasing"));
        }
        Ok(CountSeries { days, counts })
    }

    pub fn len(&self) -> usize {
        self.days.len()
    }

    pub fn is_empty(&self) -> bool {
        self.days.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (i64, u64)> + '_ {
        self.days.iter().copied().zip(self.counts.iter().copied())
    }

    pub fn get(&self, day: i64) -> Option<u64> {
        self.days
            .binary_search(&day)
            .ok()
            .map(|idx| self.counts[idx])
    }

    /// Restrict to days in [first, last].
    pub fn window(&self, first: i64, last: i64) -> CountSeries {
        let (days, counts) = self
            .iter()
            .filter(|(d, _)| *d >= first && *d <= last)
            .unzip();
        CountSeries { days, counts }
    }
}

/// Observed data for all three streams.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ObservedData {
    pub deaths: CountSeries,
    pub admissions: CountSeries,
    pub calls: CountSeries,
}

impl ObservedData {
    pub fn stream(&self, s: Stream) -> &CountSeries {
        match s {
            Stream::Deaths => &self.deaths,
            Stream::Admissions => &self.admissions,
            Stream::Calls => &self.calls,
        }
    }

    pub fn window(&self, first: i64, last: i64) -> ObservedData {
        ObservedData {
            deaths: self.deaths.window(first, last),
            admissions: self.admissions.window(first, last),
            calls: self.calls.window(first, last),
        }
    }
}

/// Log-pmf of the mean/overdispersion negative binomial:
/// C(n+φ-1, n) · (μ/(μ+φ))^n · (φ/(μ+φ))^φ, with the binomial coefficient
/// extended to real φ via log-gamma. Variance is μ + μ²/φ.
pub fn nb_log_pmf(n: u64, mu: f64, phi: f64) -> Result<f64> {
    if !(mu > 0.0 && mu.is_finite()) {
        return Err(Error::domain(format!("nb mean must be > 0, got {mu}")));
    }
    if !(phi > 0.0 && phi.is_finite()) {
        return Err(Error::domain(format!(
            "nb dispersion must be > 0, got {phi}"
        )));
    }
    let nf = n as f64;
    let ln_coeff = ln_gamma(nf + phi) - ln_gamma(phi) - ln_gamma(nf + 1.0);
    Ok(ln_coeff + nf * (mu.ln() - (mu + phi).ln()) + phi * (phi.ln() - (mu + phi).ln()))
}

/// Draw from NegativeBinomial(μ, φ) as a Gamma(φ, μ/φ) mixture of Poissons.
pub fn sample_nb<R: Rng + ?Sized>(rng: &mut R, mu: f64, phi: f64) -> u64 {
    let shape = phi;
    let scale = mu / phi;
    let lambda = Gamma::new(shape, scale)
        .expect("valid gamma parameters")
        .sample(rng);
    if lambda <= 0.0 {
        return 0;
    }
    Poisson::new(lambda).expect("valid poisson rate").sample(rng) as u64
}

/// A day-indexed series of latent observation means.
#[derive(Debug, Clone, PartialEq)]
pub struct MeanSeries {
    first_day: i64,
    values: Vec<f64>,
}

impl MeanSeries {
    pub fn first_day(&self) -> i64 {
        self.first_day
    }

    pub fn get(&self, day: i64) -> Option<f64> {
        if day < self.first_day {
            return None;
        }
        self.values.get((day - self.first_day) as usize).copied()
    }

    pub fn iter(&self) -> impl Iterator<Item = (i64, f64)> + '_ {
        self.values
            .iter()
            .enumerate()
            .map(|(i, &v)| (self.first_day + i as i64, v))
    }
}

/// Latent means for the three streams.
#[derive(Debug, Clone, PartialEq)]
pub struct LatentMeans {
    /// Daily deaths d(t) = D(t) - D(t-1), defined from day 1.
    pub deaths: MeanSeries,
    /// Daily admissions h(t) = ρ_admissions(t) · (2/d_I) · I2(t).
    pub admissions: MeanSeries,
    /// Daily symptom calls c(t) = ρ_calls(t) · ((2/d_L)·E2(t) + (2/d_I)·I2(t)).
    pub calls: MeanSeries,
}

impl LatentMeans {
    pub fn stream(&self, s: Stream) -> &MeanSeries {
        match s {
            Stream::Deaths => &self.deaths,
            Stream::Admissions => &self.admissions,
            Stream::Calls => &self.calls,
        }
    }
}

/// Map a daily trajectory to the three latent mean series.
///
/// Compartment values are clamped at zero here (tiny integrator undershoot)
/// without mutating the trajectory itself, and all means are floored at
/// [`MEAN_FLOOR`].
pub fn latent_means(
    traj: &DailyTrajectory,
    tp: &TransmissionParams,
    op: &ObservationParams,
) -> LatentMeans {
    let states = traj.states();
    let floor = |x: f64| x.max(MEAN_FLOOR);
    let pos = |x: f64| x.max(0.0);

    let deaths = states
        .windows(2)
        .map(|w| floor(pos(w[1].d) - pos(w[0].d)))
        .collect();

    let mut admissions = Vec::with_capacity(states.len());
    let mut calls = Vec::with_capacity(states.len());
    for (day, st) in states.iter().enumerate() {
        let t = day as f64;
        let new_pending = 2.0 / tp.d_i * pos(st.i2);
        let new_infectious = 2.0 / tp.d_l * pos(st.e2);
        admissions.push(floor(op.rho_admissions.eval(t) * new_pending));
        calls.push(floor(op.rho_calls.eval(t) * (new_infectious + new_pending)));
    }

    LatentMeans {
        deaths: MeanSeries {
            first_day: 1,
            values: deaths,
        },
        admissions: MeanSeries {
            first_day: 0,
            values: admissions,
        },
        calls: MeanSeries {
            first_day: 0,
            values: calls,
        },
    }
}

/// Joint log-likelihood of the observed streams given latent means.
///
/// Each present (day, count) pair contributes one negative-binomial term;
/// missing days contribute nothing. An observed day with no corresponding
/// mean is an alignment error.
pub fn log_likelihood(
    data: &ObservedData,
    means: &LatentMeans,
    op: &ObservationParams,
) -> Result<f64> {
    let mut total = 0.0;
    for stream in Stream::ALL {
        let phi = match stream {
            Stream::Deaths => op.phi_deaths,
            Stream::Admissions => op.phi_admissions,
            Stream::Calls => op.phi_calls,
        };
        let series = means.stream(stream);
        for (day, count) in data.stream(stream).iter() {
            let mu = series.get(day).ok_or(Error::Alignment { day })?;
            total += nb_log_pmf(count, mu, phi)?;
        }
    }
    Ok(total)
}
