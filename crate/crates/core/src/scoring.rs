//! Simple scoring rules for probabilistic count forecasts and their
//! mean-score aggregation.
//!
//! All rules are negatively oriented (lower is better) except that the
//! normalised squared error score is read diagnostically: above one signals
//! over-confidence, below one over-caution. The logarithmic, quadratic,
//! spherical, ranked probability, Dawid-Sebastiani, and squared error scores
//! are proper; the normalised squared error score is not, which is exactly
//! what makes it useful as a calibration diagnostic.

use crate::error::{Error, Result};
use crate::forecast::PredictiveDistribution;

/// A probability distribution over counts that the rules can score.
///
/// `truncation_bound` is the largest count the tabulated support covers;
/// sums over the support stop there (the tail mass beyond it must be
/// negligible for the scores to be meaningful).
pub trait CountDistribution {
    fn pmf(&self, k: u64) -> f64;
    fn cdf(&self, k: u64) -> f64;
    fn mean(&self) -> f64;
    fn variance(&self) -> f64;
    fn truncation_bound(&self) -> u64;
}

impl CountDistribution for PredictiveDistribution {
    fn pmf(&self, k: u64) -> f64 {
        PredictiveDistribution::pmf(self, k)
    }
    fn cdf(&self, k: u64) -> f64 {
        PredictiveDistribution::cdf(self, k)
    }
    fn mean(&self) -> f64 {
        PredictiveDistribution::mean(self)
    }
    fn variance(&self) -> f64 {
        PredictiveDistribution::variance(self)
    }
    fn truncation_bound(&self) -> u64 {
        self.k_max()
    }
}

/// An explicit finite-support pmf over {0, 1, ..., n-1}.
#[derive(Debug, Clone, PartialEq)]
pub struct TabulatedPmf {
    probs: Vec<f64>,
    cdf: Vec<f64>,
    mean: f64,
    variance: f64,
}

impl TabulatedPmf {
    pub fn new(probs: Vec<f64>) -> Result<Self> {
        if probs.is_empty() {
            return Err(Error::domain("pmf must have at least one atom"));
        }
        if probs.iter().any(|&p| !(0.0..=1.0).contains(&p)) {
            return Err(Error::domain("pmf entries must lie in [0,1]"));
        }
        let total: f64 = probs.iter().sum();
        if (total - 1.0).abs() > 1e-9 {
            return Err(Error::domain(format!("pmf sums to {total}, not 1")));
        }
        let mut cdf = Vec::with_capacity(probs.len());
        let mut acc = 0.0;
        let mut mean = 0.0;
        let mut second = 0.0;
        for (k, &p) in probs.iter().enumerate() {
            acc += p;
            cdf.push(acc);
            mean += k as f64 * p;
            second += (k as f64) * (k as f64) * p;
        }
        Ok(TabulatedPmf {
            probs,
            cdf,
            mean,
            variance: (second - mean * mean).max(0.0),
        })
    }
}

impl CountDistribution for TabulatedPmf {
    fn pmf(&self, k: u64) -> f64 {
        self.probs.get(k as usize).copied().unwrap_or(0.0)
    }
    fn cdf(&self, k: u64) -> f64 {
        match self.cdf.get(k as usize) {
            Some(&c) => c,
            None => 1.0,
        }
    }
    fn mean(&self) -> f64 {
        self.mean
    }
    fn variance(&self) -> f64 {
        self.variance
    }
    fn truncation_bound(&self) -> u64 {
        self.probs.len() as u64 - 1
    }
}

/// The seven scoring rules.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ScoringRule {
    /// logs(P, x) = -log p_x
    Logarithmic,
    /// qs(P, x) = -2 p_x + ||p||²
    Quadratic,
    /// sphs(P, x) = -p_x / ||p||
    Spherical,
    /// rps(P, x) = Σ_k (P_k - 1(x <= k))²
    RankedProbability,
    /// dss(P, x) = ((x - μ)/σ)² + 2 log σ
    DawidSebastiani,
    /// ses(P, x) = (x - μ)²
    SquaredError,
    /// nses(P, x) = ((x - μ)/σ)²
    NormalisedSquaredError,
}

impl ScoringRule {
    pub const ALL: [ScoringRule; 7] = [
        ScoringRule::Logarithmic,
        ScoringRule::Quadratic,
        ScoringRule::Spherical,
        ScoringRule::RankedProbability,
        ScoringRule::DawidSebastiani,
        ScoringRule::SquaredError,
        ScoringRule::NormalisedSquaredError,
    ];

    /// Mean-score label (uppercase per convention).
    pub fn label(self) -> &'static str {
        match self {
            ScoringRule::Logarithmic => "LogS",
            ScoringRule::Quadratic => "QS",
            ScoringRule::Spherical => "SphS",
            ScoringRule::RankedProbability => "RPS",
            ScoringRule::DawidSebastiani => "DSS",
            ScoringRule::SquaredError => "SES",
            ScoringRule::NormalisedSquaredError => "NSES",
        }
    }

    pub fn is_proper(self) -> bool {
        !matches!(self, ScoringRule::NormalisedSquaredError)
    }
}

fn squared_norm<D: CountDistribution + ?Sized>(dist: &D) -> f64 {
    (0..=dist.truncation_bound())
        .map(|k| {
            let p = dist.pmf(k);
            p * p
        })
        .sum()
}

/// Evaluate one scoring rule for an observed count.
///
/// The logarithmic score of an impossible observation is +inf (flagged by
/// callers, kept comparable in means). Rules that divide by the predictive
/// sd fail on degenerate (zero-variance) distributions.
pub fn score<D: CountDistribution + ?Sized>(
    rule: ScoringRule,
    dist: &D,
    observed: u64,
) -> Result<f64> {
    let x = observed;
    match rule {
        ScoringRule::Logarithmic => {
            let p = dist.pmf(x);
            if p <= 0.0 {
                Ok(f64::INFINITY)
            } else {
                Ok(-p.ln())
            }
        }
        ScoringRule::Quadratic => Ok(-2.0 * dist.pmf(x) + squared_norm(dist)),
        ScoringRule::Spherical => Ok(-dist.pmf(x) / squared_norm(dist).sqrt()),
        ScoringRule::RankedProbability => {
            // The sum must cover the observation even when it lies beyond
            // the tabulated support.
            let bound = dist.truncation_bound().max(x);
            let mut total = 0.0;
            for k in 0..=bound {
                let indicator = if x <= k { 1.0 } else { 0.0 };
                let diff = dist.cdf(k) - indicator;
                total += diff * diff;
            }
            Ok(total)
        }
        ScoringRule::DawidSebastiani => {
            let sd = dist.variance().sqrt();
            if sd <= 0.0 {
                return Err(Error::Degenerate(
                    "Dawid-Sebastiani score needs positive predictive variance".into(),
                ));
            }
            let z = (x as f64 - dist.mean()) / sd;
            Ok(z * z + 2.0 * sd.ln())
        }
        ScoringRule::SquaredError => {
            let d = x as f64 - dist.mean();
            Ok(d * d)
        }
        ScoringRule::NormalisedSquaredError => {
            let var = dist.variance();
            if var <= 0.0 {
                return Err(Error::Degenerate(
                    "normalised squared error needs positive predictive variance".into(),
                ));
            }
            let d = x as f64 - dist.mean();
            Ok(d * d / var)
        }
    }
}

/// Scores of one forecast day under all seven rules.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DayScores {
    pub logs: f64,
    pub qs: f64,
    pub sphs: f64,
    pub rps: f64,
    pub dss: f64,
    pub ses: f64,
    pub nses: f64,
}

impl DayScores {
    pub fn get(&self, rule: ScoringRule) -> f64 {
        match rule {
            ScoringRule::Logarithmic => self.logs,
            ScoringRule::Quadratic => self.qs,
            ScoringRule::Spherical => self.sphs,
            ScoringRule::RankedProbability => self.rps,
            ScoringRule::DawidSebastiani => self.dss,
            ScoringRule::SquaredError => self.ses,
            ScoringRule::NormalisedSquaredError => self.nses,
        }
    }
}

/// Score one day under all seven rules.
pub fn score_all<D: CountDistribution + ?Sized>(dist: &D, observed: u64) -> Result<DayScores> {
    Ok(DayScores {
        logs: score(ScoringRule::Logarithmic, dist, observed)?,
        qs: score(ScoringRule::Quadratic, dist, observed)?,
        sphs: score(ScoringRule::Spherical, dist, observed)?,
        rps: score(ScoringRule::RankedProbability, dist, observed)?,
        dss: score(ScoringRule::DawidSebastiani, dist, observed)?,
        ses: score(ScoringRule::SquaredError, dist, observed)?,
        nses: score(ScoringRule::NormalisedSquaredError, dist, observed)?,
    })
}

/// Calibration reading of a mean NSES value.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NsesVerdict {
    /// Mean NSES > 1: predictive spread too small.
    OverConfident,
    /// Mean NSES <= 1: predictive spread at least as large as needed.
    OverCautious,
}

/// Per-day scores with their horizon means.
#[derive(Debug, Clone, PartialEq)]
pub struct ScoreReport {
    pub per_day: Vec<DayScores>,
    pub means: DayScores,
    pub nses_verdict: NsesVerdict,
    /// Days whose logarithmic score was +inf (observation outside support).
    pub infinite_logs_days: usize,
}

/// Arithmetic mean of per-day scores, with the NSES mean classified.
pub fn mean_scores(per_day: &[DayScores]) -> Result<ScoreReport> {
    if per_day.is_empty() {
        return Err(Error::domain("mean scores need at least one day"));
    }
    let n = per_day.len() as f64;
    let mean_of = |f: fn(&DayScores) -> f64| per_day.iter().map(f).sum::<f64>() / n;
    let means = DayScores {
        logs: mean_of(|d| d.logs),
        qs: mean_of(|d| d.qs),
        sphs: mean_of(|d| d.sphs),
        rps: mean_of(|d| d.rps),
        dss: mean_of(|d| d.dss),
        ses: mean_of(|d| d.ses),
        nses: mean_of(|d| d.nses),
    };
    let verdict = if means.nses > 1.0 {
        NsesVerdict::OverConfident
    } else {
        NsesVerdict::OverCautious
    };
    Ok(ScoreReport {
        per_day: per_day.to_vec(),
        means,
        nses_verdict: verdict,
        infinite_logs_days: per_day.iter().filter(|d| d.logs.is_infinite()).count(),
    })
}
