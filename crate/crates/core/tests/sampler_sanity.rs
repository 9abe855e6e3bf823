//! Sampler correctness on targets with known moments.

use seiprd::mcmc::{run_chains, ChainConfig, Target};

struct StdNormal1d;

impl Target for StdNormal1d {
    fn dim(&self) -> usize {
        1
    }
    fn log_density(&self, u: &[f64]) -> f64 {
        -0.5 * u[0] * u[0]
    }
}

/// Correlated bivariate normal with sds (1, 2) and correlation 0.8.
struct Gaussian2d;

const SD1: f64 = 1.0;
const SD2: f64 = 2.0;
const RHO: f64 = 0.8;

impl Target for Gaussian2d {
    fn dim(&self) -> usize {
        2
    }
    fn log_density(&self, u: &[f64]) -> f64 {
        let z1 = u[0] / SD1;
        let z2 = u[1] / SD2;
        -(z1 * z1 - 2.0 * RHO * z1 * z2 + z2 * z2) / (2.0 * (1.0 - RHO * RHO))
    }
}

#[test]
fn standard_normal_moments_recovered() {
    let cfg = ChainConfig {
        n_chains: 4,
        n_samples: 20_000,
        n_warmup: 2_000,
        seed: 20,
        ..ChainConfig::for_dim(1)
    };
    let draws = run_chains(&StdNormal1d, &cfg).unwrap();
    let n = draws.n_retained() as f64;
    let mean: f64 = draws.pooled().map(|d| d[0]).sum::<f64>() / n;
    let var: f64 = draws.pooled().map(|d| (d[0] - mean).powi(2)).sum::<f64>() / n;
    assert!(mean.abs() < 0.1, "pooled mean {mean}");
    assert!((var.sqrt() - 1.0).abs() < 0.15, "pooled sd {}", var.sqrt());
    // Healthy chains on an easy target.
    assert!(draws.rhat[0] < 1.05, "rhat {}", draws.rhat[0]);
    assert!(draws.ess[0] > 500.0, "ess {}", draws.ess[0]);
}

#[test]
fn correlated_gaussian_covariance_within_15_percent() {
    let cfg = ChainConfig {
        n_chains: 4,
        n_samples: 15_500,
        n_warmup: 3_000,
        seed: 77,
        ..ChainConfig::for_dim(2)
    };
    let draws = run_chains(&Gaussian2d, &cfg).unwrap();
    assert_eq!(draws.n_retained(), 50_000);

    let n = draws.n_retained() as f64;
    let mean0: f64 = draws.pooled().map(|d| d[0]).sum::<f64>() / n;
    let mean1: f64 = draws.pooled().map(|d| d[1]).sum::<f64>() / n;
    let mut c00 = 0.0;
    let mut c01 = 0.0;
    let mut c11 = 0.0;
    for d in draws.pooled() {
        c00 += (d[0] - mean0) * (d[0] - mean0);
        c01 += (d[0] - mean0) * (d[1] - mean1);
        c11 += (d[1] - mean1) * (d[1] - mean1);
    }
    c00 /= n;
    c01 /= n;
    c11 /= n;

    let true_c00 = SD1 * SD1;
    let true_c11 = SD2 * SD2;
    let true_c01 = RHO * SD1 * SD2;
    assert!((c00 - true_c00).abs() / true_c00 < 0.15, "var0 {c00}");
    assert!((c11 - true_c11).abs() / true_c11 < 0.15, "var1 {c11}");
    assert!((c01 - true_c01).abs() / true_c01 < 0.15, "cov {c01}");
}

#[test]
fn acceptance_rate_lands_near_target() {
    let cfg = ChainConfig {
        n_chains: 2,
        n_samples: 8_000,
        n_warmup: 4_000,
        seed: 5,
        ..ChainConfig::for_dim(2)
    };
    let draws = run_chains(&Gaussian2d, &cfg).unwrap();
    for chain in &draws.chains {
        assert!(
            (chain.accept_rate - cfg.target_accept).abs() < 0.1,
            "accept rate {}",
            chain.accept_rate
        );
    }
}
