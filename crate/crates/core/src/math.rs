//! Small numerical helpers shared across modules.

use statrs::function::erf::erfc;
pub use statrs::function::gamma::ln_gamma;

pub const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_7;

/// Standard normal CDF.
pub fn std_normal_cdf(z: f64) -> f64 {
    0.5 * erfc(-z / std::f64::consts::SQRT_2)
}

/// Log-density of Normal(mean, sd) truncated to [0, ∞), including the
/// truncation normaliser log Φ(mean/sd). Returns -inf for x < 0.
pub fn ln_truncated_normal_pdf(x: f64, mean: f64, sd: f64) -> f64 {
    if x < 0.0 || !x.is_finite() {
        return f64::NEG_INFINITY;
    }
    let z = (x - mean) / sd;
    let ln_norm = std_normal_cdf(mean / sd).ln();
    -sd.ln() - LN_SQRT_2PI - 0.5 * z * z - ln_norm
}

/// Log-density of Beta(a, b). Returns -inf outside (0, 1).
pub fn ln_beta_pdf(x: f64, a: f64, b: f64) -> f64 {
    if !(x > 0.0 && x < 1.0) {
        return f64::NEG_INFINITY;
    }
    let ln_beta_fn = ln_gamma(a) + ln_gamma(b) - ln_gamma(a + b);
    (a - 1.0) * x.ln() + (b - 1.0) * (-x).ln_1p() - ln_beta_fn
}

/// Log-density of Exponential(rate). Returns -inf for x ≤ 0.
pub fn ln_exponential_pdf(x: f64, rate: f64) -> f64 {
    if x <= 0.0 || !x.is_finite() {
        return f64::NEG_INFINITY;
    }
    rate.ln() - rate * x
}

/// log(1 + e^x), overflow-safe.
pub fn softplus(x: f64) -> f64 {
    if x > 0.0 {
        x + (-x).exp().ln_1p()
    } else {
        x.exp().ln_1p()
    }
}

/// Logistic sigmoid, overflow-safe.
pub fn sigmoid(u: f64) -> f64 {
    if u >= 0.0 {
        1.0 / (1.0 + (-u).exp())
    } else {
        let e = u.exp();
        e / (1.0 + e)
    }
}

/// Inverse of `sigmoid` for x in (0, 1).
pub fn logit(x: f64) -> f64 {
    x.ln() - (-x).ln_1p()
}
