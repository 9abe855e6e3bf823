//! Convergence diagnostics: split R-hat and autocorrelation-based ESS.

use crate::error::{Error, Result};

/// Variance is treated as zero below this threshold.
const VAR_EPS: f64 = 1e-300;

/// Split R-hat result for one parameter.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SplitRhat {
    pub value: f64,
    /// True when the chains carried (near-)zero variance; `value` is then 1.
    pub degenerate: bool,
}

fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

fn sample_var(xs: &[f64], m: f64) -> f64 {
    xs.iter().map(|&x| (x - m).powi(2)).sum::<f64>() / (xs.len() as f64 - 1.0)
}

fn check_inputs(chains: &[&[f64]]) -> Result<usize> {
    if chains.len() < 2 {
        return Err(Error::domain("diagnostics need >= 2 chains"));
    }
    let n = chains.iter().map(|c| c.len()).min().unwrap_or(0);
    if n < 4 {
        return Err(Error::domain("diagnostics need >= 4 draws per chain"));
    }
    Ok(n)
}

/// Split R-hat: each chain is halved and the usual within/between variance
/// ratio is computed over the half-chains.
pub fn split_rhat(chains: &[&[f64]]) -> Result<SplitRhat> {
    let n = check_inputs(chains)?;
    let half = n / 2;
    let mut halves: Vec<&[f64]> = Vec::with_capacity(chains.len() * 2);
    for c in chains {
        halves.push(&c[..half]);
        halves.push(&c[c.len() - half..]);
    }

    let m = halves.len() as f64;
    let n2 = half as f64;
    let means: Vec<f64> = halves.iter().map(|h| mean(h)).collect();
    let grand = mean(&means);
    let between = n2 / (m - 1.0) * means.iter().map(|&x| (x - grand).powi(2)).sum::<f64>();
    let within = halves
        .iter()
        .zip(&means)
        .map(|(h, &hm)| sample_var(h, hm))
        .sum::<f64>()
        / m;

    if within < VAR_EPS {
        return Ok(SplitRhat {
            value: 1.0,
            degenerate: true,
        });
    }
    let var_plus = (n2 - 1.0) / n2 * within + between / n2;
    Ok(SplitRhat {
        value: (var_plus / within).sqrt(),
        degenerate: false,
    })
}

/// Effective sample size across chains.
///
/// Combined autocorrelations follow the within/between decomposition, and
/// the lag sum truncates at the first negative paired sum.
pub fn ess(chains: &[&[f64]]) -> Result<f64> {
    let n = check_inputs(chains)?;
    let m = chains.len();
    let total = (m * n) as f64;

    let means: Vec<f64> = chains.iter().map(|c| mean(&c[..n])).collect();
    // Biased (1/n) autocovariances per chain.
    let acov = |c: &[f64], cm: f64, lag: usize| -> f64 {
        (0..n - lag)
            .map(|i| (c[i] - cm) * (c[i + lag] - cm))
            .sum::<f64>()
            / n as f64
    };

    let chain_vars: Vec<f64> = chains
        .iter()
        .zip(&means)
        .map(|(c, &cm)| acov(c, cm, 0) * n as f64 / (n as f64 - 1.0))
        .collect();
    let within = mean(&chain_vars);
    if within < VAR_EPS {
        return Ok(total);
    }
    let grand = mean(&means);
    let between_over_n = means.iter().map(|&x| (x - grand).powi(2)).sum::<f64>() / (m as f64 - 1.0);
    let var_plus = (n as f64 - 1.0) / n as f64 * within + between_over_n;

    let rho = |lag: usize| -> f64 {
        let mean_acov = chains
            .iter()
            .zip(&means)
            .map(|(c, &cm)| acov(c, cm, lag))
            .sum::<f64>()
            / m as f64;
        1.0 - (within - mean_acov) / var_plus
    };

    let mut rho_sum = 0.0;
    let mut lag = 1;
    while lag + 1 < n {
        let pair = rho(lag) + rho(lag + 1);
        if pair < 0.0 {
            break;
        }
        rho_sum += pair;
        lag += 2;
    }
    let tau = 1.0 + 2.0 * rho_sum;
    Ok(total / tau)
}
