//! Prior distributions over the calibration parameters and the joint
//! log-prior density.
//!
//! The contact-rate knots carry a zero-truncated random-walk prior whose
//! step scale σ_β is the tuning hyperparameter swept by the harness; because
//! each walk step's truncation point depends on the previous knot, its
//! normaliser log Φ(β_{j-1}/σ_β) is part of the density.

use crate::math::{ln_beta_pdf, ln_exponential_pdf, ln_truncated_normal_pdf};
use crate::params::{ParamLayout, ParamVector};

/// Hyperparameters of every prior, with the defaults used for calibration.
#[derive(Debug, Clone, PartialEq)]
pub struct PriorConfig {
    /// Random-walk step sd between successive β knots.
    pub sigma_beta: f64,
    /// Beta(a, b) on α1.
    pub alpha1_beta: (f64, f64),
    /// Beta(a, b) on α2.
    pub alpha2_beta: (f64, f64),
    /// Sd of the half-normal on the first β knot.
    pub beta1_sd: f64,
    /// (mean, sd) of the zero-truncated normal on d_L.
    pub d_l_normal: (f64, f64),
    /// (mean, sd) of the zero-truncated normal on d_I.
    pub d_i_normal: (f64, f64),
    /// (mean, sd) of the zero-truncated normal on d_P.
    pub d_p_normal: (f64, f64),
    /// Beta(a, b) on ω.
    pub omega_beta: (f64, f64),
    /// Exponential rate on each 1/φ.
    pub inv_phi_rate: f64,
    /// Beta(a, b) on each ρ knot.
    pub rho_beta: (f64, f64),
}

impl PriorConfig {
    pub fn with_sigma_beta(sigma_beta: f64) -> Self {
        PriorConfig {
            sigma_beta,
            alpha1_beta: (5.0, 0.5),
            alpha2_beta: (1.1, 1.1),
            beta1_sd: 0.5,
            d_l_normal: (4.0, 3.0),
            d_i_normal: (5.0, 4.0),
            d_p_normal: (13.0, 4.0),
            omega_beta: (5.7, 624.1),
            inv_phi_rate: 5.0,
            rho_beta: (1.1, 1.1),
        }
    }
}

impl Default for PriorConfig {
    fn default() -> Self {
        PriorConfig::with_sigma_beta(0.025)
    }
}

/// Joint log-prior of a constrained parameter vector.
///
/// Returns -inf for any point outside the product support.
pub fn log_prior(p: &ParamVector, layout: &ParamLayout, cfg: &PriorConfig) -> f64 {
    if !p.in_support(layout) {
        return f64::NEG_INFINITY;
    }
    let mut lp = 0.0;
    lp += ln_beta_pdf(p.get(ParamLayout::ALPHA1), cfg.alpha1_beta.0, cfg.alpha1_beta.1);
    lp += ln_beta_pdf(p.get(ParamLayout::ALPHA2), cfg.alpha2_beta.0, cfg.alpha2_beta.1);

    // First knot: half-normal, i.e. a zero-truncated normal with mean 0.
    lp += ln_truncated_normal_pdf(p.get(layout.beta_index(0)), 0.0, cfg.beta1_sd);
    // Remaining knots: zero-truncated random walk centred at the previous knot.
    for j in 1..layout.n_beta() {
        let prev = p.get(layout.beta_index(j - 1));
        lp += ln_truncated_normal_pdf(p.get(layout.beta_index(j)), prev, cfg.sigma_beta);
    }

    lp += ln_truncated_normal_pdf(p.get(layout.d_l_index()), cfg.d_l_normal.0, cfg.d_l_normal.1);
    lp += ln_truncated_normal_pdf(p.get(layout.d_i_index()), cfg.d_i_normal.0, cfg.d_i_normal.1);
    lp += ln_truncated_normal_pdf(p.get(layout.d_p_index()), cfg.d_p_normal.0, cfg.d_p_normal.1);
    lp += ln_beta_pdf(p.get(layout.omega_index()), cfg.omega_beta.0, cfg.omega_beta.1);

    for idx in [
        layout.inv_phi_deaths_index(),
        layout.inv_phi_admissions_index(),
        layout.inv_phi_calls_index(),
    ] {
        lp += ln_exponential_pdf(p.get(idx), cfg.inv_phi_rate);
    }

    for k in 0..layout.n_rho_admissions() {
        lp += ln_beta_pdf(p.get(layout.rho_admissions_index(k)), cfg.rho_beta.0, cfg.rho_beta.1);
    }
    for l in 0..layout.n_rho_calls() {
        lp += ln_beta_pdf(p.get(layout.rho_calls_index(l)), cfg.rho_beta.0, cfg.rho_beta.1);
    }
    lp
}
