//! The flat calibration parameter vector, its layout, and the bijection
//! between the constrained (natural) and unconstrained sampling spaces.
//!
//! Layout order: α1, α2, β knots, d_L, d_I, d_P, ω, 1/φ for the three
//! streams, ρ_admissions knots, ρ_calls knots. Positive-support components
//! use a log transform, unit-interval components a logit transform.

use crate::error::{Error, Result};
use crate::math::{logit, sigmoid, softplus};
use crate::model::{PiecewiseLinear, TransmissionParams};
use crate::observation::ObservationParams;

/// Support type of one component.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Support {
    /// (0, ∞), log-transformed.
    Positive,
    /// (0, 1), logit-transformed.
    UnitInterval,
}

/// Fixed layout of the parameter vector, determined by the knot schedules.
#[derive(Debug, Clone, PartialEq)]
pub struct ParamLayout {
    beta_times: Vec<f64>,
    rho_admissions_times: Vec<f64>,
    rho_calls_times: Vec<f64>,
}

impl ParamLayout {
    pub fn new(
        beta_times: Vec<f64>,
        rho_admissions_times: Vec<f64>,
        rho_calls_times: Vec<f64>,
    ) -> Result<Self> {
        for (name, times) in [
            ("beta", &beta_times),
            ("rho_admissions", &rho_admissions_times),
            ("rho_calls", &rho_calls_times),
        ] {
            if times.len() < 2 {
                return Err(Error::domain(format!("{name} schedule needs >= 2 knots")));
            }
            if !times.windows(2).all(|w| w[0] < w[1]) {
                return Err(Error::domain(format!(
                    "{name} knot times must be strictly increasing"
                )));
            }
        }
        if beta_times[0] != 0.0 {
            return Err(Error::domain("beta knots must start at model day 0"));
        }
        Ok(ParamLayout {
            beta_times,
            rho_admissions_times,
            rho_calls_times,
        })
    }

    pub fn beta_times(&self) -> &[f64] {
        &self.beta_times
    }

    pub fn rho_admissions_times(&self) -> &[f64] {
        &self.rho_admissions_times
    }

    pub fn rho_calls_times(&self) -> &[f64] {
        &self.rho_calls_times
    }

    pub fn n_beta(&self) -> usize {
        self.beta_times.len()
    }

    pub fn n_rho_admissions(&self) -> usize {
        self.rho_admissions_times.len()
    }

    pub fn n_rho_calls(&self) -> usize {
        self.rho_calls_times.len()
    }

    /// Total parameter count.
    pub fn dim(&self) -> usize {
        2 + self.n_beta() + 4 + 3 + self.n_rho_admissions() + self.n_rho_calls()
    }

    pub const ALPHA1: usize = 0;
    pub const ALPHA2: usize = 1;
    pub const BETA_START: usize = 2;

    pub fn beta_index(&self, j: usize) -> usize {
        debug_assert!(j < self.n_beta());
        Self::BETA_START + j
    }

    pub fn d_l_index(&self) -> usize {
        Self::BETA_START + self.n_beta()
    }

    pub fn d_i_index(&self) -> usize {
        self.d_l_index() + 1
    }

    pub fn d_p_index(&self) -> usize {
        self.d_l_index() + 2
    }

    pub fn omega_index(&self) -> usize {
        self.d_l_index() + 3
    }

    pub fn inv_phi_deaths_index(&self) -> usize {
        self.d_l_index() + 4
    }

    pub fn inv_phi_admissions_index(&self) -> usize {
        self.d_l_index() + 5
    }

    pub fn inv_phi_calls_index(&self) -> usize {
        self.d_l_index() + 6
    }

    pub fn rho_admissions_index(&self, k: usize) -> usize {
        debug_assert!(k < self.n_rho_admissions());
        self.d_l_index() + 7 + k
    }

    pub fn rho_calls_index(&self, l: usize) -> usize {
        debug_assert!(l < self.n_rho_calls());
        self.d_l_index() + 7 + self.n_rho_admissions() + l
    }

    /// Support of component `i`.
    pub fn support(&self, i: usize) -> Support {
        if i == Self::ALPHA1 || i == Self::ALPHA2 || i == self.omega_index() {
            Support::UnitInterval
        } else if i >= self.rho_admissions_index(0) && i < self.dim() {
            Support::UnitInterval
        } else {
            Support::Positive
        }
    }

    /// Column names in layout order.
    pub fn names(&self) -> Vec<String> {
        let mut names = vec!["alpha1".to_string(), "alpha2".to_string()];
        for j in 1..=self.n_beta() {
            names.push(format!("beta{j}"));
        }
        names.extend(
            ["d_l", "d_i", "d_p", "omega", "inv_phi_deaths", "inv_phi_admissions", "inv_phi_calls"]
                .map(String::from),
        );
        for k in 1..=self.n_rho_admissions() {
            names.push(format!("rho_admissions{k}"));
        }
        for l in 1..=self.n_rho_calls() {
            names.push(format!("rho_calls{l}"));
        }
        names
    }
}

/// A parameter vector on the constrained (natural) scale.
#[derive(Debug, Clone, PartialEq)]
pub struct ParamVector {
    values: Vec<f64>,
}

impl ParamVector {
    pub fn new(values: Vec<f64>, layout: &ParamLayout) -> Result<Self> {
        if values.len() != layout.dim() {
            return Err(Error::domain(format!(
                "parameter vector length {} does not match layout dimension {}",
                values.len(),
                layout.dim()
            )));
        }
        Ok(ParamVector { values })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn get(&self, i: usize) -> f64 {
        self.values[i]
    }

    /// True if every component lies strictly inside its support.
    pub fn in_support(&self, layout: &ParamLayout) -> bool {
        self.values.iter().enumerate().all(|(i, &v)| {
            v.is_finite()
                && match layout.support(i) {
                    Support::Positive => v > 0.0,
                    Support::UnitInterval => v > 0.0 && v < 1.0,
                }
        })
    }

    /// Assemble transmission-model parameters.
    pub fn transmission_params(
        &self,
        layout: &ParamLayout,
        n_population: u64,
    ) -> Result<TransmissionParams> {
        let beta_values: Vec<f64> = (0..layout.n_beta())
            .map(|j| self.values[layout.beta_index(j)])
            .collect();
        let params = TransmissionParams {
            alpha1: self.values[ParamLayout::ALPHA1],
            alpha2: self.values[ParamLayout::ALPHA2],
            beta: PiecewiseLinear::new(layout.beta_times().to_vec(), beta_values)?,
            d_l: self.values[layout.d_l_index()],
            d_i: self.values[layout.d_i_index()],
            d_p: self.values[layout.d_p_index()],
            omega: self.values[layout.omega_index()],
            n_population,
        };
        params.validate()?;
        Ok(params)
    }

    /// Assemble observation-model parameters (φ = 1 / inv_φ).
    pub fn observation_params(&self, layout: &ParamLayout) -> Result<ObservationParams> {
        let rho_adm: Vec<f64> = (0..layout.n_rho_admissions())
            .map(|k| self.values[layout.rho_admissions_index(k)])
            .collect();
        let rho_calls: Vec<f64> = (0..layout.n_rho_calls())
            .map(|l| self.values[layout.rho_calls_index(l)])
            .collect();
        let params = ObservationParams {
            phi_deaths: 1.0 / self.values[layout.inv_phi_deaths_index()],
            phi_admissions: 1.0 / self.values[layout.inv_phi_admissions_index()],
            phi_calls: 1.0 / self.values[layout.inv_phi_calls_index()],
            rho_admissions: PiecewiseLinear::new(
                layout.rho_admissions_times().to_vec(),
                rho_adm,
            )?,
            rho_calls: PiecewiseLinear::new(layout.rho_calls_times().to_vec(), rho_calls)?,
        };
        params.validate()?;
        Ok(params)
    }
}

/// Map a constrained vector to the unconstrained space.
pub fn to_unconstrained(p: &ParamVector, layout: &ParamLayout) -> Vec<f64> {
    p.values()
        .iter()
        .enumerate()
        .map(|(i, &x)| match layout.support(i) {
            Support::Positive => x.ln(),
            Support::UnitInterval => logit(x),
        })
        .collect()
}

/// Map an unconstrained vector back to the constrained space, returning the
/// log absolute determinant of the inverse map's Jacobian.
pub fn from_unconstrained(u: &[f64], layout: &ParamLayout) -> Result<(ParamVector, f64)> {
    if u.len() != layout.dim() {
        return Err(Error::domain(format!(
            "unconstrained vector length {} does not match layout dimension {}",
            u.len(),
            layout.dim()
        )));
    }
    let mut values = Vec::with_capacity(u.len());
    let mut log_jacobian = 0.0;
    for (i, &ui) in u.iter().enumerate() {
        match layout.support(i) {
            Support::Positive => {
                values.push(ui.exp());
                log_jacobian += ui;
            }
            Support::UnitInterval => {
                values.push(sigmoid(ui));
                // log x(1-x) without underflow for large |u|.
                log_jacobian += -softplus(ui) - softplus(-ui);
            }
        }
    }
    Ok((ParamVector { values }, log_jacobian))
}

#[cfg(test)]
pub(crate) fn test_layout() -> ParamLayout {
    ParamLayout::new(
        vec![0.0, 24.0, 48.0, 72.0],
        vec![0.0, 60.0],
        vec![0.0, 30.0, 60.0],
    )
    .unwrap()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn layout_indices_partition_the_vector() {
        let l = test_layout();
        assert_eq!(l.dim(), 2 + 4 + 4 + 3 + 2 + 3);
        assert_eq!(l.beta_index(0), 2);
        assert_eq!(l.d_l_index(), 6);
        assert_eq!(l.omega_index(), 9);
        assert_eq!(l.inv_phi_calls_index(), 12);
        assert_eq!(l.rho_admissions_index(0), 13);
        assert_eq!(l.rho_calls_index(2), 17);
        assert_eq!(l.names().len(), l.dim());
        assert_eq!(l.names()[0], "alpha1");
        assert_eq!(l.names()[2], "beta1");
        assert_eq!(l.names()[17], "rho_calls3");
    }

    #[test]
    fn support_classification() {
        let l = test_layout();
        assert_eq!(l.support(ParamLayout::ALPHA1), Support::UnitInterval);
        assert_eq!(l.support(l.beta_index(2)), Support::Positive);
        assert_eq!(l.support(l.d_p_index()), Support::Positive);
        assert_eq!(l.support(l.omega_index()), Support::UnitInterval);
        assert_eq!(l.support(l.inv_phi_deaths_index()), Support::Positive);
        assert_eq!(l.support(l.rho_admissions_index(1)), Support::UnitInterval);
        assert_eq!(l.support(l.rho_calls_index(0)), Support::UnitInterval);
    }

    fn in_support_point(l: &ParamLayout) -> ParamVector {
        let values: Vec<f64> = (0..l.dim())
            .map(|i| match l.support(i) {
                Support::Positive => 0.5 + 0.1 * i as f64,
                Support::UnitInterval => 0.1 + 0.04 * (i % 20) as f64,
            })
            .collect();
        ParamVector::new(values, l).unwrap()
    }

    #[test]
    fn transform_log_at_one_and_logit_at_half() {
        let l = test_layout();
        let mut p = in_support_point(&l);
        p.values[l.beta_index(0)] = 1.0;
        p.values[ParamLayout::ALPHA1] = 0.5;
        let u = to_unconstrained(&p, &l);
        assert_eq!(u[l.beta_index(0)], 0.0);
        assert_eq!(u[ParamLayout::ALPHA1], 0.0);

        // Per-component log-Jacobian contributions: 0 for log at x=1,
        // log 0.25 for logit at x=0.5. Check via differences.
        let (_, lj_base) = from_unconstrained(&u, &l).unwrap();
        let mut u2 = u.clone();
        u2[l.beta_index(0)] = 1.0;
        let (_, lj_moved) = from_unconstrained(&u2, &l).unwrap();
        assert!((lj_moved - lj_base - 1.0).abs() < 1e-12);

        // Isolate the logit contribution at exactly u = 0.
        let single = ParamLayout::new(vec![0.0, 1.0], vec![0.0, 1.0], vec![0.0, 1.0]).unwrap();
        let zeros = vec![0.0; single.dim()];
        let (x, lj) = from_unconstrained(&zeros, &single).unwrap();
        let n_unit = (0..single.dim())
            .filter(|&i| single.support(i) == Support::UnitInterval)
            .count();
        assert_eq!(x.get(ParamLayout::ALPHA1), 0.5);
        assert!((lj - n_unit as f64 * 0.25f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn roundtrip_identity() {
        let l = test_layout();
        let p = in_support_point(&l);
        let u = to_unconstrained(&p, &l);
        let (back, _) = from_unconstrained(&u, &l).unwrap();
        for (a, b) in p.values().iter().zip(back.values()) {
            assert!((a - b).abs() <= 1e-12 * a.abs().max(1e-300));
        }
    }

    #[test]
    fn dimension_mismatch_is_rejected() {
        let l = test_layout();
        assert!(ParamVector::new(vec![0.5; 3], &l).is_err());
        assert!(from_unconstrained(&vec![0.0; 3], &l).is_err());
    }

    #[test]
    fn assembles_model_params() {
        let l = test_layout();
        let p = in_support_point(&l);
        let tp = p.transmission_params(&l, 100_000).unwrap();
        assert_eq!(tp.beta.n_knots(), 4);
        assert_eq!(tp.alpha1, p.get(ParamLayout::ALPHA1));
        let op = p.observation_params(&l).unwrap();
        assert_eq!(op.rho_calls.n_knots(), 3);
        assert!((op.phi_deaths - 1.0 / p.get(l.inv_phi_deaths_index())).abs() < 1e-15);
    }
}
