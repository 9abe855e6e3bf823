//! The joint log-posterior over the unconstrained space: prior,
//! ODE-integrated likelihood, and transform Jacobian.

use std::sync::atomic::{AtomicU64, Ordering};

use crate::error::{Error, Result};
use crate::integrator::{integrate_daily, IntegratorConfig};
use crate::mcmc::{InitDraw, Target};
use crate::observation::{latent_means, log_likelihood, ObservedData};
use crate::params::{from_unconstrained, ParamLayout, ParamVector};
use crate::prior::{log_prior, PriorConfig};

/// Default initialisation table for a calibration target.
///
/// The epidemic-defining blocks (α's, β's, the durations, ω) draw uniformly
/// from realistic constrained intervals so chains never start from absurd
/// epidemics; the overdispersion and reporting-ratio blocks use the default
/// uniform (-2, 2) on the unconstrained scale. All intervals are
/// configuration, overridable by the caller.
pub fn default_init_table(layout: &ParamLayout) -> Vec<InitDraw> {
    let mut table = vec![InitDraw::default_block(); layout.dim()];
    table[ParamLayout::ALPHA1] = InitDraw::UnitInterval { lo: 0.7, hi: 0.9999 };
    table[ParamLayout::ALPHA2] = InitDraw::UnitInterval { lo: 0.1, hi: 0.9 };
    for j in 0..layout.n_beta() {
        table[layout.beta_index(j)] = InitDraw::Positive { lo: 0.05, hi: 1.0 };
    }
    table[layout.d_l_index()] = InitDraw::Positive { lo: 2.0, hi: 7.0 };
    table[layout.d_i_index()] = InitDraw::Positive { lo: 2.0, hi: 8.0 };
    table[layout.d_p_index()] = InitDraw::Positive { lo: 8.0, hi: 18.0 };
    table[layout.omega_index()] = InitDraw::UnitInterval {
        lo: 0.005,
        hi: 0.012,
    };
    table
}

/// A calibration target: evaluates the log-posterior of the unconstrained
/// parameter vector given observed surveillance data.
///
/// Divergent integrations yield -inf and are counted for diagnostics.
#[derive(Debug)]
pub struct Posterior {
    layout: ParamLayout,
    prior: PriorConfig,
    data: ObservedData,
    integrator: IntegratorConfig,
    n_population: u64,
    diverged: AtomicU64,
}

impl Posterior {
    /// Build a posterior whose trajectory spans days 0..=horizon of the
    /// integrator config. All observed days must fall inside that span
    /// (deaths from day 1).
    pub fn new(
        layout: ParamLayout,
        prior: PriorConfig,
        data: ObservedData,
        integrator: IntegratorConfig,
        n_population: u64,
    ) -> Result<Self> {
        let horizon = integrator.horizon_days as i64;
        for (day, _) in data.deaths.iter() {
            if day < 1 || day > horizon {
                return Err(Error::Alignment { day });
            }
        }
        for series in [&data.admissions, &data.calls] {
            for (day, _) in series.iter() {
                if day < 0 || day > horizon {
                    return Err(Error::Alignment { day });
                }
            }
        }
        Ok(Posterior {
            layout,
            prior,
            data,
            integrator,
            n_population,
            diverged: AtomicU64::new(0),
        })
    }

    pub fn layout(&self) -> &ParamLayout {
        &self.layout
    }

    pub fn prior(&self) -> &PriorConfig {
        &self.prior
    }

    pub fn data(&self) -> &ObservedData {
        &self.data
    }

    pub fn integrator_config(&self) -> IntegratorConfig {
        self.integrator
    }

    pub fn n_population(&self) -> u64 {
        self.n_population
    }

    /// Number of -inf evaluations caused by integrator blow-up so far.
    pub fn diverged_count(&self) -> u64 {
        self.diverged.load(Ordering::Relaxed)
    }

    /// Log-posterior on the constrained scale, without the Jacobian term.
    /// Useful for decomposition tests and reporting.
    pub fn log_density_constrained(&self, p: &ParamVector) -> f64 {
        let lp = log_prior(p, &self.layout, &self.prior);
        if lp == f64::NEG_INFINITY {
            return f64::NEG_INFINITY;
        }
        let (tp, op) = match (
            p.transmission_params(&self.layout, self.n_population),
            p.observation_params(&self.layout),
        ) {
            (Ok(tp), Ok(op)) => (tp, op),
            _ => return f64::NEG_INFINITY,
        };
        let traj = match integrate_daily(&tp, &self.integrator) {
            Ok(t) => t,
            Err(Error::IntegrationDiverged { .. }) => {
                self.diverged.fetch_add(1, Ordering::Relaxed);
                return f64::NEG_INFINITY;
            }
            Err(_) => return f64::NEG_INFINITY,
        };
        let means = latent_means(&traj, &tp, &op);
        match log_likelihood(&self.data, &means, &op) {
            Ok(ll) => lp + ll,
            Err(_) => f64::NEG_INFINITY,
        }
    }
}

impl Target for Posterior {
    fn dim(&self) -> usize {
        self.layout.dim()
    }

    fn log_density(&self, u: &[f64]) -> f64 {
        let (p, log_jacobian) = match from_unconstrained(u, &self.layout) {
            Ok(pair) => pair,
            Err(_) => return f64::NEG_INFINITY,
        };
        if !p.values().iter().all(|v| v.is_finite()) {
            return f64::NEG_INFINITY;
        }
        let lp = self.log_density_constrained(&p);
        if lp == f64::NEG_INFINITY {
            return f64::NEG_INFINITY;
        }
        lp + log_jacobian
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::observation::CountSeries;
    use crate::params::{test_layout, to_unconstrained};

    fn toy_data() -> ObservedData {
        ObservedData {
            deaths: CountSeries::new(vec![10, 11, 12], vec![1, 0, 2]).unwrap(),
            admissions: CountSeries::new(vec![8, 9], vec![5, 7]).unwrap(),
            calls: CountSeries::new(vec![7, 9], vec![20, 25]).unwrap(),
        }
    }

    fn toy_posterior() -> Posterior {
        Posterior::new(
            test_layout(),
            PriorConfig::with_sigma_beta(0.1),
            toy_data(),
            IntegratorConfig::new(4, 80).unwrap(),
            100_000,
        )
        .unwrap()
    }

    fn toy_point(layout: &ParamLayout) -> ParamVector {
        let mut v = vec![0.0; layout.dim()];
        v[ParamLayout::ALPHA1] = 0.99;
        v[ParamLayout::ALPHA2] = 0.5;
        for j in 0..layout.n_beta() {
            v[layout.beta_index(j)] = 0.4;
        }
        v[layout.d_l_index()] = 4.0;
        v[layout.d_i_index()] = 5.0;
        v[layout.d_p_index()] = 13.0;
        v[layout.omega_index()] = 0.009;
        v[layout.inv_phi_deaths_index()] = 0.2;
        v[layout.inv_phi_admissions_index()] = 0.2;
        v[layout.inv_phi_calls_index()] = 0.2;
        for k in 0..layout.n_rho_admissions() {
            v[layout.rho_admissions_index(k)] = 0.1;
        }
        for l in 0..layout.n_rho_calls() {
            v[layout.rho_calls_index(l)] = 0.15;
        }
        ParamVector::new(v, layout).unwrap()
    }

    #[test]
    fn decomposes_into_prior_likelihood_jacobian() {
        let post = toy_posterior();
        let layout = post.layout().clone();
        let p = toy_point(&layout);
        let u = to_unconstrained(&p, &layout);

        let lp_prior = log_prior(&p, &layout, post.prior());
        let tp = p.transmission_params(&layout, post.n_population()).unwrap();
        let op = p.observation_params(&layout).unwrap();
        let traj = integrate_daily(&tp, &post.integrator_config()).unwrap();
        let means = latent_means(&traj, &tp, &op);
        let ll = log_likelihood(post.data(), &means, &op).unwrap();
        let (_, log_jacobian) = from_unconstrained(&u, &layout).unwrap();

        let total = post.log_density(&u);
        assert!(
            (total - (lp_prior + ll + log_jacobian)).abs() < 1e-9,
            "{total} vs {}",
            lp_prior + ll + log_jacobian
        );
    }

    #[test]
    fn deterministic_evaluation() {
        let post = toy_posterior();
        let u = to_unconstrained(&toy_point(post.layout()), post.layout());
        assert_eq!(post.log_density(&u), post.log_density(&u));
    }

    #[test]
    fn perturbing_data_changes_only_likelihood() {
        let post = toy_posterior();
        let layout = post.layout().clone();
        let p = toy_point(&layout);
        let u = to_unconstrained(&p, &layout);
        let base = post.log_density(&u);

        let mut data = toy_data();
        data.deaths = CountSeries::new(vec![10, 11, 12], vec![1, 0, 3]).unwrap();
        let post2 = Posterior::new(
            layout.clone(),
            PriorConfig::with_sigma_beta(0.1),
            data,
            IntegratorConfig::new(4, 80).unwrap(),
            100_000,
        )
        .unwrap();
        let changed = post2.log_density(&u);

        // The difference equals the likelihood change of the single count.
        let tp = p.transmission_params(&layout, 100_000).unwrap();
        let op = p.observation_params(&layout).unwrap();
        let traj = integrate_daily(&tp, &post.integrator_config()).unwrap();
        let means = latent_means(&traj, &tp, &op);
        let mu = means.deaths.get(12).unwrap();
        let expect = crate::observation::nb_log_pmf(3, mu, op.phi_deaths).unwrap()
            - crate::observation::nb_log_pmf(2, mu, op.phi_deaths).unwrap();
        assert!(((changed - base) - expect).abs() < 1e-9);
    }

    #[test]
    fn rejects_misaligned_data() {
        let data = ObservedData {
            deaths: CountSeries::new(vec![0], vec![1]).unwrap(), // deaths start at day 1
            ..Default::default()
        };
        let err = Posterior::new(
            test_layout(),
            PriorConfig::default(),
            data,
            IntegratorConfig::new(4, 80).unwrap(),
            100_000,
        )
        .unwrap_err();
        assert_eq!(err, Error::Alignment { day: 0 });
    }

    #[test]
    fn divergent_region_counts_and_rejects() {
        // d_L small enough to destabilise the fixed step at 1 substep/day.
        let post = Posterior::new(
            test_layout(),
            PriorConfig::with_sigma_beta(0.1),
            toy_data(),
            IntegratorConfig::new(1, 80).unwrap(),
            100_000,
        )
        .unwrap();
        let layout = post.layout().clone();
        let mut p = toy_point(&layout);
        let u = {
            let mut v = p.values().to_vec();
            v[layout.d_l_index()] = 1e-4;
            p = ParamVector::new(v, &layout).unwrap();
            to_unconstrained(&p, &layout)
        };
        assert_eq!(post.log_density(&u), f64::NEG_INFINITY);
        assert_eq!(post.diverged_count(), 1);
    }
}
