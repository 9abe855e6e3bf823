//! Posterior-predictive distributions for daily deaths over the forecast
//! horizon.
//!
//! Each forecast day carries an equal-weight mixture of negative binomials,
//! one component per posterior draw (or a single component in point mode).
//! The pmf is analytic rather than simulated, which keeps scores free of
//! Monte Carlo noise; the infinite support is truncated where the mixture
//! cdf reaches 1 - 1e-9 (capped, with the cap reported).

use std::sync::Mutex;

use crate::error::{Error, Result};
use crate::integrator::{integrate_daily, IntegratorConfig};
use crate::observation::{latent_means, nb_log_pmf, ObservationParams};
use crate::params::{ParamLayout, ParamVector};

/// Mass left beyond the truncation bound.
pub const TAIL_EPS: f64 = 1e-9;
/// Hard cap on the truncation bound K_max.
pub const K_MAX_CAP: u64 = 10_000_000;

/// How parameters feed the forecast trajectories.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ForecastMode {
    /// One mixture component per posterior draw.
    PosteriorSamples,
    /// A single component from the componentwise posterior mean (natural
    /// scale).
    PointEstimate,
}

impl ForecastMode {
    pub fn name(self) -> &'static str {
        match self {
            ForecastMode::PosteriorSamples => "samples",
            ForecastMode::PointEstimate => "point",
        }
    }
}

/// One negative-binomial mixture component.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NbComponent {
    pub mu: f64,
    pub phi: f64,
}

struct PmfTable {
    pmf: Vec<f64>,
    cdf: Vec<f64>,
    /// Total mass inside the table (>= 1 - TAIL_EPS unless capped).
    total_mass: f64,
    cap_hit: bool,
}

/// An equal-weight mixture of negative binomials over counts.
pub struct PredictiveDistribution {
    components: Vec<NbComponent>,
    table: OnceLock<PmfTable>,
}

impl PredictiveDistribution {
    pub fn new(components: Vec<NbComponent>) -> Result<Self> {
        if components.is_empty() {
            return Err(Error::domain("predictive mixture needs >= 1 component"));
        }
        for c in &components {
            if !(c.mu > 0.0 && c.mu.is_finite() && c.phi > 0.0 && c.phi.is_finite()) {
                return Err(Error::domain(format!(
                    "invalid mixture component (mu = {}, phi = {})",
                    c.mu, c.phi
                )));
            }
        }
        Ok(PredictiveDistribution {
            components,
            table: OnceLock::new(),
        })
    }

    pub fn components(&self) -> &[NbComponent] {
        &self.components
    }

    fn table(&self) -> &PmfTable {
        self.table.get_or_init(|| self.build_table())
    }

    fn build_table(&self) -> PmfTable {
        let weight = 1.0 / self.components.len() as f64;
        // Per-component pmf advanced by the NB recurrence:
        // p(0) = (phi/(mu+phi))^phi, p(k+1) = p(k) * (k+phi)/(k+1) * mu/(mu+phi).
        let mut comp_pmf: Vec<f64> = self
            .components
            .iter()
            .map(|c| (c.phi * (c.phi.ln() - (c.mu + c.phi).ln())).exp())
            .collect();
        let ratios: Vec<f64> = self
            .components
            .iter()
            .map(|c| c.mu / (c.mu + c.phi))
            .collect();

        let mut pmf = Vec::new();
        let mut cdf = Vec::new();
        let mut total = 0.0;
        let mut k = 0u64;
        loop {
            let pk = weight * comp_pmf.iter().sum::<f64>();
            total += pk;
            pmf.push(pk);
            cdf.push(total);
            if total >= 1.0 - TAIL_EPS || k >= K_MAX_CAP {
                break;
            }
            let kf = k as f64;
            for (i, c) in self.components.iter().enumerate() {
                comp_pmf[i] *= (kf + c.phi) / (kf + 1.0) * ratios[i];
            }
            k += 1;
        }
        PmfTable {
            pmf,
            cdf,
            total_mass: total,
            cap_hit: total < 1.0 - TAIL_EPS,
        }
    }

    /// Truncation bound: the largest count covered by the table.
    pub fn k_max(&self) -> u64 {
        self.table().pmf.len() as u64 - 1
    }

    /// True if the table stopped at the hard cap before reaching the
    /// target mass.
    pub fn truncation_cap_hit(&self) -> bool {
        self.table().cap_hit
    }

    /// Probability mass at `k`. Exact for every k: counts beyond the table
    /// are evaluated directly from the mixture.
    pub fn pmf(&self, k: u64) -> f64 {
        let table = self.table();
        if let Some(&p) = table.pmf.get(k as usize) {
            return p;
        }
        let weight = 1.0 / self.components.len() as f64;
        self.components
            .iter()
            .map(|c| nb_log_pmf(k, c.mu, c.phi).map(f64::exp).unwrap_or(0.0))
            .sum::<f64>()
            * weight
    }

    /// Cumulative mass at `k`; beyond the table it saturates at the total
    /// tabulated mass (within [`TAIL_EPS`] of one).
    pub fn cdf(&self, k: u64) -> f64 {
        let table = self.table();
        match table.cdf.get(k as usize) {
            Some(&c) => c,
            None => table.total_mass,
        }
    }

    /// Mixture mean (average of component means).
    pub fn mean(&self) -> f64 {
        self.components.iter().map(|c| c.mu).sum::<f64>() / self.components.len() as f64
    }

    /// Mixture variance by the law of total variance.
    pub fn variance(&self) -> f64 {
        let n = self.components.len() as f64;
        let mean = self.mean();
        let within = self
            .components
            .iter()
            .map(|c| c.mu + c.mu * c.mu / c.phi)
            .sum::<f64>()
            / n;
        let between = self
            .components
            .iter()
            .map(|c| (c.mu - mean).powi(2))
            .sum::<f64>()
            / n;
        within + between
    }

    /// Smallest k with cdf(k) >= q.
    pub fn quantile(&self, q: f64) -> Result<u64> {
        if !(0.0..=1.0).contains(&q) {
            return Err(Error::domain(format!("quantile level {q} outside [0,1]")));
        }
        let table = self.table();
        let idx = table.cdf.partition_point(|&c| c < q);
        Ok(idx.min(table.cdf.len() - 1) as u64)
    }
}

/// Per-day predictive distributions plus bookkeeping.
pub struct ForecastSet {
    /// First forecast day (model-day index).
    pub first_day: i64,
    /// One distribution per day of the horizon.
    pub days: Vec<PredictiveDistribution>,
    /// Posterior draws whose trajectory diverged and were dropped.
    pub dropped_draws: usize,
}

/// Build posterior-predictive death distributions for the horizon
/// immediately following `calibration_end`.
///
/// In samples mode every draw is integrated through the horizon and
/// contributes NB(d(t), φ_deaths) to each day's mixture; in point mode the
/// draws are averaged componentwise on the natural scale first and a single
/// trajectory is used. Draws whose trajectory diverges are dropped and
/// counted.
pub fn posterior_predictive(
    draws: &[ParamVector],
    layout: &ParamLayout,
    n_population: u64,
    substeps_per_day: u32,
    calibration_end: i64,
    horizon: u32,
    mode: ForecastMode,
) -> Result<ForecastSet> {
    if draws.is_empty() {
        return Err(Error::domain("no posterior draws to forecast from"));
    }
    if horizon == 0 {
        return Err(Error::domain("forecast horizon must be >= 1"));
    }
    if calibration_end < 0 {
        return Err(Error::domain("calibration end day must be >= 0"));
    }
    let first_day = calibration_end + 1;
    let total_horizon = (calibration_end + horizon as i64) as u32;
    let icfg = IntegratorConfig::new(substeps_per_day, total_horizon)?;

    let effective: Vec<ParamVector> = match mode {
        ForecastMode::PosteriorSamples => draws.to_vec(),
        ForecastMode::PointEstimate => {
            let dim = layout.dim();
            let mut mean = vec![0.0; dim];
            for d in draws {
                for (acc, v) in mean.iter_mut().zip(d.values()) {
                    *acc += v;
                }
            }
            for v in &mut mean {
                *v /= draws.len() as f64;
            }
            vec![ParamVector::new(mean, layout)?]
        }
    };

    let mut per_day: Vec<Vec<NbComponent>> =
        vec![Vec::with_capacity(effective.len()); horizon as usize];
    let mut dropped = 0usize;
    for draw in &effective {
        let tp = match draw.transmission_params(layout, n_population) {
            Ok(tp) => tp,
            Err(_) => {
                dropped += 1;
                continue;
            }
        };
        let op: ObservationParams = match draw.observation_params(layout) {
            Ok(op) => op,
            Err(_) => {
                dropped += 1;
                continue;
            }
        };
        let traj = match integrate_daily(&tp, &icfg) {
            Ok(t) => t,
            Err(_) => {
                dropped += 1;
                continue;
            }
        };
        let means = latent_means(&traj, &tp, &op);
        for (offset, day_components) in per_day.iter_mut().enumerate() {
            let day = first_day + offset as i64;
            let mu = means
                .deaths
                .get(day)
                .ok_or(Error::Alignment { day })?;
            day_components.push(NbComponent {
                mu,
                phi: op.phi_deaths,
            });
        }
    }
    if dropped == effective.len() {
        return Err(Error::domain(
            "every posterior draw diverged during forecasting",
        ));
    }

    let days = per_day
        .into_iter()
        .map(PredictiveDistribution::new)
        .collect::<Result<Vec<_>>>()?;
    Ok(ForecastSet {
        first_day,
        days,
        dropped_draws: dropped,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::test_layout;

    fn nb(mu: f64, phi: f64) -> PredictiveDistribution {
        PredictiveDistribution::new(vec![NbComponent { mu, phi }]).unwrap()
    }

    #[test]
    fn single_nb_geometric_pmf() {
        let p = nb(1.0, 1.0);
        assert!((p.pmf(0) - 0.5).abs() < 1e-12);
        assert!((p.pmf(3) - 0.0625).abs() < 1e-12);
    }

    #[test]
    fn mixture_of_identical_components_is_idempotent() {
        let single = nb(1.0, 1.0);
        let double = PredictiveDistribution::new(vec![
            NbComponent { mu: 1.0, phi: 1.0 },
            NbComponent { mu: 1.0, phi: 1.0 },
        ])
        .unwrap();
        for k in 0..100 {
            assert!((single.pmf(k) - double.pmf(k)).abs() < 1e-15);
        }
    }

    #[test]
    fn mixture_moments_by_total_variance() {
        let p = PredictiveDistribution::new(vec![
            NbComponent { mu: 1.0, phi: 1.0 },
            NbComponent { mu: 3.0, phi: 1.0 },
        ])
        .unwrap();
        assert!((p.mean() - 2.0).abs() < 1e-12);
        // (2 + 12)/2 within + 1 between.
        assert!((p.variance() - 8.0).abs() < 1e-12);
    }

    #[test]
    fn cdf_reaches_target_mass_and_is_monotone() {
        let p = PredictiveDistribution::new(vec![
            NbComponent { mu: 7.0, phi: 2.5 },
            NbComponent { mu: 30.0, phi: 1.2 },
        ])
        .unwrap();
        let kmax = p.k_max();
        assert!(p.cdf(kmax) >= 1.0 - TAIL_EPS);
        assert!(!p.truncation_cap_hit());
        let mut prev = 0.0;
        for k in 0..=kmax {
            let c = p.cdf(k);
            assert!(c >= prev);
            prev = c;
        }
    }

    #[test]
    fn mean_matches_pmf_sum() {
        let p = PredictiveDistribution::new(vec![
            NbComponent { mu: 4.0, phi: 3.0 },
            NbComponent { mu: 11.0, phi: 0.8 },
        ])
        .unwrap();
        let sum: f64 = (0..=p.k_max()).map(|k| k as f64 * p.pmf(k)).sum();
        assert!((sum - p.mean()).abs() / p.mean() < 1e-6);
    }

    #[test]
    fn quantile_is_a_median_at_half() {
        let p = nb(9.0, 2.0);
        let med = p.quantile(0.5).unwrap();
        assert!(p.cdf(med) >= 0.5);
        assert!(med == 0 || p.cdf(med - 1) < 0.5);
        assert!(p.quantile(1.1).is_err());
        assert_eq!(p.quantile(0.0).unwrap(), 0);
    }

    #[test]
    fn pmf_beyond_table_is_exact() {
        let p = nb(2.0, 1.5);
        let k = p.k_max() + 10;
        let direct = nb_log_pmf(k, 2.0, 1.5).unwrap().exp();
        assert!((p.pmf(k) - direct).abs() <= 1e-18);
    }

    fn recovery_draws(layout: &ParamLayout) -> Vec<ParamVector> {
        let mut base = vec![0.0; layout.dim()];
        base[ParamLayout::ALPHA1] = 0.99;
        base[ParamLayout::ALPHA2] = 0.5;
        for j in 0..layout.n_beta() {
            base[layout.beta_index(j)] = 0.35;
        }
        base[layout.d_l_index()] = 4.0;
        base[layout.d_i_index()] = 5.0;
        base[layout.d_p_index()] = 13.0;
        base[layout.omega_index()] = 0.009;
        base[layout.inv_phi_deaths_index()] = 0.125;
        base[layout.inv_phi_admissions_index()] = 0.1;
        base[layout.inv_phi_calls_index()] = 0.2;
        for k in 0..layout.n_rho_admissions() {
            base[layout.rho_admissions_index(k)] = 0.1;
        }
        for l in 0..layout.n_rho_calls() {
            base[layout.rho_calls_index(l)] = 0.15;
        }
        let mut second = base.clone();
        second[layout.beta_index(0)] = 0.5;
        second[layout.omega_index()] = 0.011;
        vec![
            ParamVector::new(base, layout).unwrap(),
            ParamVector::new(second, layout).unwrap(),
        ]
    }

    #[test]
    fn horizon_produces_one_distribution_per_day() {
        let layout = test_layout();
        let draws = recovery_draws(&layout);
        let fc = posterior_predictive(
            &draws,
            &layout,
            500_000,
            4,
            80,
            21,
            ForecastMode::PosteriorSamples,
        )
        .unwrap();
        assert_eq!(fc.days.len(), 21);
        assert_eq!(fc.first_day, 81);
        assert_eq!(fc.dropped_draws, 0);
        assert_eq!(fc.days[0].components().len(), 2);
    }

    #[test]
    fn single_draw_modes_coincide() {
        let layout = test_layout();
        let draws = vec![recovery_draws(&layout)[0].clone()];
        let a = posterior_predictive(
            &draws,
            &layout,
            500_000,
            4,
            60,
            7,
            ForecastMode::PosteriorSamples,
        )
        .unwrap();
        let b = posterior_predictive(
            &draws,
            &layout,
            500_000,
            4,
            60,
            7,
            ForecastMode::PointEstimate,
        )
        .unwrap();
        for (da, db) in a.days.iter().zip(&b.days) {
            assert_eq!(da.components(), db.components());
        }
    }

    #[test]
    fn point_mode_averages_on_natural_scale() {
        let layout = test_layout();
        let draws = recovery_draws(&layout);
        let fc = posterior_predictive(
            &draws,
            &layout,
            500_000,
            4,
            60,
            3,
            ForecastMode::PointEstimate,
        )
        .unwrap();
        assert_eq!(fc.days[0].components().len(), 1);
        // phi_deaths of the single component is 1 / mean(inv_phi).
        let inv_mean = (draws[0].get(layout.inv_phi_deaths_index())
            + draws[1].get(layout.inv_phi_deaths_index()))
            / 2.0;
        let phi = fc.days[0].components()[0].phi;
        assert!((phi - 1.0 / inv_mean).abs() < 1e-12);
    }
}
