//! Scoring rules checked against a brute-force evaluation of their defining
//! formulas, plus empirical propriety and the NSES calibration diagnostic.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use seiprd::forecast::{NbComponent, PredictiveDistribution};
use seiprd::observation::{nb_log_pmf, sample_nb};
use seiprd::scoring::{score, ScoringRule, TabulatedPmf};

/// Direct formula evaluation over an explicit finite pmf. Shares nothing
/// with the implementation but the probabilities themselves.
mod brute {
    pub fn logs(p: &[f64], x: usize) -> f64 {
        let px = p.get(x).copied().unwrap_or(0.0);
        if px <= 0.0 {
            f64::INFINITY
        } else {
            -px.ln()
        }
    }

    pub fn qs(p: &[f64], x: usize) -> f64 {
        let px = p.get(x).copied().unwrap_or(0.0);
        let norm2: f64 = p.iter().map(|v| v * v).sum();
        -2.0 * px + norm2
    }

    pub fn sphs(p: &[f64], x: usize) -> f64 {
        let px = p.get(x).copied().unwrap_or(0.0);
        let norm2: f64 = p.iter().map(|v| v * v).sum();
        -px / norm2.sqrt()
    }

    pub fn rps(p: &[f64], x: usize) -> f64 {
        // Sum over k of (P_k - 1(x <= k))^2, with P_k = 1 beyond the support.
        let last = p.len().max(x + 1);
        let mut total = 0.0;
        let mut cdf = 0.0;
        for k in 0..last {
            if k < p.len() {
                cdf += p[k];
            }
            let ind = if x <= k { 1.0 } else { 0.0 };
            total += (cdf - ind) * (cdf - ind);
        }
        total
    }

    pub fn mean_var(p: &[f64]) -> (f64, f64) {
        let mean: f64 = p.iter().enumerate().map(|(k, &v)| k as f64 * v).sum();
        let second: f64 = p
            .iter()
            .enumerate()
            .map(|(k, &v)| (k as f64) * (k as f64) * v)
            .sum();
        (mean, second - mean * mean)
    }

    pub fn dss(p: &[f64], x: usize) -> f64 {
        let (mean, var) = mean_var(p);
        let z = (x as f64 - mean) / var.sqrt();
        z * z + var.sqrt().ln() * 2.0
    }

    pub fn ses(p: &[f64], x: usize) -> f64 {
        let (mean, _) = mean_var(p);
        (x as f64 - mean) * (x as f64 - mean)
    }

    pub fn nses(p: &[f64], x: usize) -> f64 {
        let (mean, var) = mean_var(p);
        (x as f64 - mean) * (x as f64 - mean) / var
    }
}

fn random_pmf(rng: &mut ChaCha8Rng) -> Vec<f64> {
    let len = rng.random_range(2..40usize);
    let raw: Vec<f64> = (0..len).map(|_| rng.random_range(0.01..1.0f64)).collect();
    let total: f64 = raw.iter().sum();
    raw.into_iter().map(|v| v / total).collect()
}

#[test]
fn all_rules_match_brute_force_on_random_pmfs() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for case in 0..100 {
        let probs = random_pmf(&mut rng);
        let dist = TabulatedPmf::new(probs.clone()).unwrap();
        let x = rng.random_range(0..probs.len() + 5) as u64;
        let xi = x as usize;

        let checks = [
            (ScoringRule::Logarithmic, brute::logs(&probs, xi)),
            (ScoringRule::Quadratic, brute::qs(&probs, xi)),
            (ScoringRule::Spherical, brute::sphs(&probs, xi)),
            (ScoringRule::RankedProbability, brute::rps(&probs, xi)),
            (ScoringRule::DawidSebastiani, brute::dss(&probs, xi)),
            (ScoringRule::SquaredError, brute::ses(&probs, xi)),
            (ScoringRule::NormalisedSquaredError, brute::nses(&probs, xi)),
        ];
        for (rule, expected) in checks {
            let got = score(rule, &dist, x).unwrap();
            if expected.is_infinite() {
                assert!(got.is_infinite(), "case {case} {rule:?}");
            } else {
                assert!(
                    (got - expected).abs() <= 1e-10,
                    "case {case} {rule:?}: {got} vs {expected}"
                );
            }
        }
    }
}

/// NB(mu, phi) truncated onto a finite support wide enough that the tail is
/// far below the comparison tolerances.
fn nb_dist(mu: f64, phi: f64) -> PredictiveDistribution {
    PredictiveDistribution::new(vec![NbComponent { mu, phi }]).unwrap()
}

fn nb_pmf_vec(mu: f64, phi: f64, len: usize) -> Vec<f64> {
    (0..len)
        .map(|k| nb_log_pmf(k as u64, mu, phi).unwrap().exp())
        .collect()
}

#[test]
fn expected_logs_and_rps_minimised_at_the_truth() {
    // Exact expectation under truth NB(5, 2) of scoring candidate NB(m, 2),
    // for m in {3,4,5,6,7}: both proper rules must prefer m = 5.
    let truth = nb_pmf_vec(5.0, 2.0, 400);
    let tail: f64 = 1.0 - truth.iter().sum::<f64>();
    assert!(tail < 1e-10, "truncation tail {tail}");

    for rule in [ScoringRule::Logarithmic, ScoringRule::RankedProbability] {
        let mut best = (f64::INFINITY, 0u32);
        for m in 3..=7u32 {
            let candidate = nb_dist(m as f64, 2.0);
            let mut expected = 0.0;
            for (x, &px) in truth.iter().enumerate() {
                expected += px * score(rule, &candidate, x as u64).unwrap();
            }
            if expected < best.0 {
                best = (expected, m);
            }
        }
        assert_eq!(best.1, 5, "{rule:?} minimised at mu = {}", best.1);
    }
}

#[test]
fn nses_distinguishes_over_confidence_from_over_caution() {
    let (mu, phi) = (5.0, 2.0);
    let n = 100_000usize;
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    let draws: Vec<u64> = (0..n).map(|_| sample_nb(&mut rng, mu, phi)).collect();

    let mean_nses = |forecast: &PredictiveDistribution| -> f64 {
        draws
            .iter()
            .map(|&x| score(ScoringRule::NormalisedSquaredError, forecast, x).unwrap())
            .sum::<f64>()
            / n as f64
    };

    // Scoring against the truth: mean NSES near 1.
    let well_calibrated = mean_nses(&nb_dist(mu, phi));
    assert!(
        (well_calibrated - 1.0).abs() < 0.05,
        "calibrated mean NSES {well_calibrated}"
    );

    // Variance-inflated forecast (smaller phi): over-cautious, NSES < 1.
    let cautious = mean_nses(&nb_dist(mu, 0.5));
    assert!(cautious < 1.0, "inflated-variance mean NSES {cautious}");

    // Variance-deflated forecast (huge phi): over-confident, NSES > 1.
    let confident = mean_nses(&nb_dist(mu, 50.0));
    assert!(confident > 1.0, "deflated-variance mean NSES {confident}");
}
