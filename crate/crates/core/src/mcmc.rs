//! Gradient-free adaptive random-walk Metropolis over the unconstrained
//! space.
//!
//! Each chain adapts a diagonal proposal during warmup only: a global scale
//! moved by Robbins-Monro towards the target acceptance rate, times a
//! per-component sd estimate refreshed from the warmup history. Both freeze
//! at the end of warmup. Chains run on independent counter-derived RNG
//! streams and merge by chain index, so results are bit-exact reproducible
//! regardless of scheduling.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use crate::diagnostics::{ess, split_rhat};
use crate::error::{Error, Result};
use crate::math::{logit, sigmoid};

/// A log-density over the unconstrained parameter space.
pub trait Target: Sync {
    fn dim(&self) -> usize;
    fn log_density(&self, u: &[f64]) -> f64;
}

/// How one component of the initial point is drawn.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum InitDraw {
    /// Uniform directly on the unconstrained scale (the default block).
    Unconstrained { lo: f64, hi: f64 },
    /// Uniform on a constrained positive interval, then log-transformed.
    Positive { lo: f64, hi: f64 },
    /// Uniform on a constrained (0,1) interval, then logit-transformed.
    UnitInterval { lo: f64, hi: f64 },
}

impl InitDraw {
    /// The default block: uniform between -2 and 2, unconstrained.
    pub fn default_block() -> Self {
        InitDraw::Unconstrained { lo: -2.0, hi: 2.0 }
    }

    fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match *self {
            InitDraw::Unconstrained { lo, hi } => rng.random_range(lo..hi),
            InitDraw::Positive { lo, hi } => rng.random_range(lo..hi).ln(),
            InitDraw::UnitInterval { lo, hi } => logit(rng.random_range(lo..hi)),
        }
    }

    /// Interval check on the constrained scale, used by tests.
    pub fn contains_constrained(&self, u: f64) -> bool {
        match *self {
            InitDraw::Unconstrained { lo, hi } => u >= lo && u <= hi,
            InitDraw::Positive { lo, hi } => {
                let x = u.exp();
                x >= lo && x <= hi
            }
            InitDraw::UnitInterval { lo, hi } => {
                let x = sigmoid(u);
                x >= lo && x <= hi
            }
        }
    }
}

/// Chain protocol and adaptation settings.
#[derive(Debug, Clone, PartialEq)]
pub struct ChainConfig {
    pub n_chains: usize,
    /// Total draws per chain, including warmup.
    pub n_samples: usize,
    /// Leading draws discarded and used for adaptation.
    pub n_warmup: usize,
    pub seed: u64,
    pub target_accept: f64,
    /// One entry per parameter.
    pub init: Vec<InitDraw>,
}

impl ChainConfig {
    /// Paper protocol: 6 chains, 512 draws each, first 256 discarded.
    pub fn for_dim(dim: usize) -> Self {
        ChainConfig {
            n_chains: 6,
            n_samples: 512,
            n_warmup: 256,
            seed: 0,
            target_accept: 0.234,
            init: vec![InitDraw::default_block(); dim],
        }
    }

    pub fn validate(&self, dim: usize) -> Result<()> {
        if self.n_chains == 0 {
            return Err(Error::domain("n_chains must be >= 1"));
        }
        if self.n_warmup >= self.n_samples {
            return Err(Error::domain("n_warmup must be < n_samples"));
        }
        if self.init.len() != dim {
            return Err(Error::domain(format!(
                "init table has {} entries for a {dim}-dimensional target",
                self.init.len()
            )));
        }
        if !(self.target_accept > 0.0 && self.target_accept < 1.0) {
            return Err(Error::domain("target_accept must lie in (0,1)"));
        }
        Ok(())
    }

    pub fn n_retained(&self) -> usize {
        self.n_chains * (self.n_samples - self.n_warmup)
    }
}

/// Iterations per warmup adaptation window (sd refresh and stuck detection).
const ADAPT_WINDOW: usize = 50;
/// Floor on the per-component proposal sd estimate.
const SD_FLOOR: f64 = 1e-3;
/// Initialisation retry budget.
const MAX_INIT_RETRIES: usize = 100;

/// RNG stream for chain `index` under the shared run seed.
pub fn chain_rng(seed: u64, index: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index as u64);
    rng
}

/// Draw an initial unconstrained point with finite log-density, retrying up
/// to 100 times.
pub fn init_point<T: Target + ?Sized>(
    target: &T,
    cfg: &ChainConfig,
    chain: usize,
    rng: &mut ChaCha8Rng,
) -> Result<Vec<f64>> {
    for _ in 0..MAX_INIT_RETRIES {
        let u: Vec<f64> = cfg.init.iter().map(|d| d.sample(rng)).collect();
        if target.log_density(&u).is_finite() {
            return Ok(u);
        }
    }
    Err(Error::InitialisationFailed {
        chain,
        attempts: MAX_INIT_RETRIES,
    })
}

/// Everything recorded for one chain.
#[derive(Debug, Clone, PartialEq)]
pub struct ChainRun {
    /// Post-warmup draws, iteration-major.
    pub draws: Vec<Vec<f64>>,
    /// Log-density of each retained draw.
    pub log_density: Vec<f64>,
    pub accept_rate_warmup: f64,
    pub accept_rate: f64,
    /// Global proposal scale at every iteration (adaptation trace).
    pub scale_trace: Vec<f64>,
    /// Iterations at which the per-component sd estimate was refreshed.
    pub sd_refresh_iters: Vec<usize>,
    /// Warmup windows (by starting iteration) in which every proposal was
    /// rejected.
    pub stuck_windows: Vec<usize>,
}

/// Retained draws from all chains with convergence diagnostics.
#[derive(Debug, Clone, PartialEq)]
pub struct PosteriorDraws {
    pub chains: Vec<ChainRun>,
    /// Split R-hat per parameter.
    pub rhat: Vec<f64>,
    /// Parameters whose chains had (near-)zero variance.
    pub rhat_degenerate: Vec<bool>,
    /// Effective sample size per parameter.
    pub ess: Vec<f64>,
    /// Human-readable warnings (stuck windows, degenerate diagnostics).
    pub warnings: Vec<String>,
}

impl PosteriorDraws {
    pub fn n_retained(&self) -> usize {
        self.chains.iter().map(|c| c.draws.len()).sum()
    }

    /// All retained draws pooled in chain order.
    pub fn pooled(&self) -> impl Iterator<Item = &[f64]> + '_ {
        self.chains
            .iter()
            .flat_map(|c| c.draws.iter().map(Vec::as_slice))
    }

    /// Per-chain series of one parameter.
    pub fn param_series(&self, p: usize) -> Vec<Vec<f64>> {
        self.chains
            .iter()
            .map(|c| c.draws.iter().map(|d| d[p]).collect())
            .collect()
    }
}

fn run_single_chain<T: Target + ?Sized>(
    target: &T,
    cfg: &ChainConfig,
    chain: usize,
) -> Result<ChainRun> {
    let dim = target.dim();
    let mut rng = chain_rng(cfg.seed, chain);
    let mut x = init_point(target, cfg, chain, &mut rng)?;
    let mut lp = target.log_density(&x);

    let mut ln_scale = (2.38 / (dim as f64).sqrt()).ln();
    let mut comp_sd = vec![1.0; dim];

    // Welford accumulators over the warmup history.
    let mut count = 0u64;
    let mut mean = vec![0.0; dim];
    let mut m2 = vec![0.0; dim];

    let n_retained = cfg.n_samples - cfg.n_warmup;
    let mut draws = Vec::with_capacity(n_retained);
    let mut log_density = Vec::with_capacity(n_retained);
    let mut scale_trace = Vec::with_capacity(cfg.n_samples);
    let mut sd_refresh_iters = Vec::new();
    let mut stuck_windows = Vec::new();

    let mut accepts_warmup = 0usize;
    let mut accepts_sampling = 0usize;
    let mut window_accepts = 0usize;
    let mut proposal = vec![0.0; dim];

    for iter in 0..cfg.n_samples {
        let scale = ln_scale.exp();
        for i in 0..dim {
            let z: f64 = rng.sample(StandardNormal);
            proposal[i] = x[i] + scale * comp_sd[i] * z;
        }
        let lp_prop = target.log_density(&proposal);
        let log_ratio = lp_prop - lp;
        let accept_prob = if log_ratio.is_nan() {
            0.0
        } else {
            log_ratio.min(0.0).exp()
        };
        let u: f64 = rng.random();
        let accepted = u < accept_prob;
        if accepted {
            std::mem::swap(&mut x, &mut proposal);
            lp = lp_prop;
        }

        let warming = iter < cfg.n_warmup;
        if warming {
            if accepted {
                accepts_warmup += 1;
                window_accepts += 1;
            }
            // Robbins-Monro on the log global scale.
            let gamma = (iter as f64 + 1.0).powf(-0.6);
            ln_scale += gamma * (accept_prob - cfg.target_accept);

            count += 1;
            for i in 0..dim {
                let delta = x[i] - mean[i];
                mean[i] += delta / count as f64;
                m2[i] += delta * (x[i] - mean[i]);
            }

            if (iter + 1) % ADAPT_WINDOW == 0 {
                if window_accepts == 0 {
                    stuck_windows.push(iter + 1 - ADAPT_WINDOW);
                }
                window_accepts = 0;
                if count >= 2 * ADAPT_WINDOW as u64 {
                    for i in 0..dim {
                        let var = m2[i] / (count as f64 - 1.0);
                        comp_sd[i] = var.sqrt().max(SD_FLOOR);
                    }
                    sd_refresh_iters.push(iter);
                }
            }
        } else {
            if accepted {
                accepts_sampling += 1;
            }
            draws.push(x.clone());
            log_density.push(lp);
        }
        scale_trace.push(ln_scale.exp());
    }

    Ok(ChainRun {
        draws,
        log_density,
        accept_rate_warmup: accepts_warmup as f64 / cfg.n_warmup.max(1) as f64,
        accept_rate: accepts_sampling as f64 / n_retained as f64,
        scale_trace,
        sd_refresh_iters,
        stuck_windows,
    })
}

/// Run the configured number of independent chains and compute per-parameter
/// split R-hat and ESS on the retained draws.
pub fn run_chains<T: Target + ?Sized>(target: &T, cfg: &ChainConfig) -> Result<PosteriorDraws> {
    let dim = target.dim();
    cfg.validate(dim)?;

    let chains: Vec<ChainRun> = (0..cfg.n_chains)
        .into_par_iter()
        .map(|c| run_single_chain(target, cfg, c))
        .collect::<Result<Vec<_>>>()?;

    let mut rhat = Vec::with_capacity(dim);
    let mut rhat_degenerate = Vec::with_capacity(dim);
    let mut ess_values = Vec::with_capacity(dim);
    let mut warnings = Vec::new();

    for p in 0..dim {
        let series: Vec<Vec<f64>> = chains
            .iter()
            .map(|c| c.draws.iter().map(|d| d[p]).collect())
            .collect();
        let refs: Vec<&[f64]> = series.iter().map(Vec::as_slice).collect();
        if cfg.n_chains >= 2 && series[0].len() >= 4 {
            let r = split_rhat(&refs)?;
            if r.degenerate {
                warnings.push(format!("parameter {p}: zero-variance chains, R-hat degenerate"));
            }
            rhat.push(r.value);
            rhat_degenerate.push(r.degenerate);
            ess_values.push(ess(&refs)?);
        } else {
            rhat.push(f64::NAN);
            rhat_degenerate.push(false);
            ess_values.push(f64::NAN);
        }
    }

    for (c, chain) in chains.iter().enumerate() {
        for &w in &chain.stuck_windows {
            warnings.push(format!(
                "chain {c}: all proposals rejected in warmup window starting at iteration {w}"
            ));
        }
    }

    Ok(PosteriorDraws {
        chains,
        rhat,
        rhat_degenerate,
        ess: ess_values,
        warnings,
    })
}
