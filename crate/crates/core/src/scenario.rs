//! Bundled synthetic scenario at desk scale: six contact-rate knots over 120
//! days, a population of one million, and moderate daily counts. Small
//! enough to calibrate in minutes on a workstation, large enough to exercise
//! every part of the pipeline.

use crate::model::{PiecewiseLinear, TransmissionParams};
use crate::observation::ObservationParams;
use crate::params::{ParamLayout, ParamVector};

/// A fully specified synthetic ground truth plus its calibration windows.
#[derive(Debug, Clone)]
pub struct Scenario {
    pub transmission: TransmissionParams,
    pub observation: ObservationParams,
    /// Parameter layout implied by the knot schedules.
    pub layout: ParamLayout,
    /// Step sd of the random walk the β knots were drawn to resemble;
    /// calibrating with σ_β equal to this value makes the prior well
    /// specified.
    pub walk_scale: f64,
    /// First day entering the likelihood.
    pub calibration_start: i64,
    /// Last day entering the likelihood.
    pub calibration_end: i64,
    /// Forecast horizon in days.
    pub horizon: u32,
    pub substeps_per_day: u32,
}

impl Scenario {
    /// Last day the synthetic data must cover (calibration + forecast).
    pub fn data_end(&self) -> i64 {
        self.calibration_end + self.horizon as i64
    }

    /// The generating parameters as a flat vector in layout order.
    pub fn truth_vector(&self) -> ParamVector {
        let l = &self.layout;
        let tp = &self.transmission;
        let op = &self.observation;
        let mut v = vec![0.0; l.dim()];
        v[ParamLayout::ALPHA1] = tp.alpha1;
        v[ParamLayout::ALPHA2] = tp.alpha2;
        for (j, &b) in tp.beta.knot_values().iter().enumerate() {
            v[l.beta_index(j)] = b;
        }
        v[l.d_l_index()] = tp.d_l;
        v[l.d_i_index()] = tp.d_i;
        v[l.d_p_index()] = tp.d_p;
        v[l.omega_index()] = tp.omega;
        v[l.inv_phi_deaths_index()] = 1.0 / op.phi_deaths;
        v[l.inv_phi_admissions_index()] = 1.0 / op.phi_admissions;
        v[l.inv_phi_calls_index()] = 1.0 / op.phi_calls;
        for (k, &r) in op.rho_admissions.knot_values().iter().enumerate() {
            v[l.rho_admissions_index(k)] = r;
        }
        for (k, &r) in op.rho_calls.knot_values().iter().enumerate() {
            v[l.rho_calls_index(k)] = r;
        }
        ParamVector::new(v, l).expect("truth vector matches layout")
    }
}

/// The desk-scale preset.
pub fn desk_scale() -> Scenario {
    let beta_times = vec![0.0, 24.0, 48.0, 72.0, 96.0, 120.0];
    let beta_values = vec![0.50, 0.27, 0.25, 0.28, 0.32, 0.28];
    let rho_adm_times = vec![0.0, 120.0];
    let rho_adm_values = vec![0.10, 0.14];
    let rho_calls_times = vec![0.0, 60.0, 120.0];
    let rho_calls_values = vec![0.12, 0.20, 0.16];

    let layout = ParamLayout::new(
        beta_times.clone(),
        rho_adm_times.clone(),
        rho_calls_times.clone(),
    )
    .expect("valid desk layout");

    Scenario {
        transmission: TransmissionParams {
            alpha1: 0.9997,
            alpha2: 0.4,
            beta: PiecewiseLinear::new(beta_times, beta_values).expect("valid beta knots"),
            d_l: 4.0,
            d_i: 5.0,
            d_p: 13.0,
            omega: 0.009,
            n_population: 1_000_000,
        },
        observation: ObservationParams {
            phi_deaths: 8.0,
            phi_admissions: 6.0,
            phi_calls: 4.0,
            rho_admissions: PiecewiseLinear::new(rho_adm_times, rho_adm_values)
                .expect("valid admission knots"),
            rho_calls: PiecewiseLinear::new(rho_calls_times, rho_calls_values)
                .expect("valid calls knots"),
        },
        layout,
        walk_scale: 0.15,
        calibration_start: 1,
        calibration_end: 120,
        horizon: 21,
        substeps_per_day: 4,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::integrator::{integrate_daily, IntegratorConfig};
    use crate::observation::latent_means;

    #[test]
    fn desk_truth_vector_roundtrips_through_layout() {
        let sc = desk_scale();
        let truth = sc.truth_vector();
        let tp = truth
            .transmission_params(&sc.layout, sc.transmission.n_population)
            .unwrap();
        assert_eq!(tp, sc.transmission);
        let op = truth.observation_params(&sc.layout).unwrap();
        assert!((op.phi_deaths - sc.observation.phi_deaths).abs() < 1e-12);
        assert_eq!(op.rho_calls, sc.observation.rho_calls);
    }

    #[test]
    fn desk_epidemic_is_moderate() {
        // The preset should produce a real epidemic with forecastable daily
        // death counts, without burning through the population.
        let sc = desk_scale();
        let cfg = IntegratorConfig::new(sc.substeps_per_day, sc.data_end() as u32).unwrap();
        let traj = integrate_daily(&sc.transmission, &cfg).unwrap();
        let means = latent_means(&traj, &sc.transmission, &sc.observation);
        let n = sc.transmission.n_population as f64;

        let final_s = traj.state(sc.data_end()).unwrap().s;
        let attack = 1.0 - final_s / n;
        assert!(attack > 0.05 && attack < 0.7, "attack fraction {attack}");

        let forecast_deaths: Vec<f64> = (sc.calibration_end + 1..=sc.data_end())
            .map(|d| means.deaths.get(d).unwrap())
            .collect();
        let max_d = forecast_deaths.iter().cloned().fold(0.0, f64::max);
        let min_d = forecast_deaths.iter().cloned().fold(f64::MAX, f64::min);
        assert!(max_d > 2.0, "forecast-window deaths too small: {max_d}");
        assert!(min_d < 500.0, "forecast-window deaths too large: {min_d}");
    }
}
