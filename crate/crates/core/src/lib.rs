//! Calibration and forecast-evaluation workbench for a SEIPRD epidemic
//! model observed through multisource count surveillance data.
//!
//! The pipeline: a nine-state compartmental ODE model with a
//! piecewise-linear contact rate ([`model`]) is integrated with a fixed-step
//! explicit trapezoidal scheme ([`integrator`]); daily trajectories map to
//! negative-binomial observation means for deaths, hospital admissions, and
//! symptom-report calls ([`observation`]); priors, parameter transforms, and
//! the joint posterior live in [`prior`], [`params`], and [`posterior`];
//! adaptive random-walk Metropolis chains with split R-hat / ESS diagnostics
//! sample it ([`mcmc`], [`diagnostics`]); posterior-predictive
//! negative-binomial mixtures forecast daily deaths ([`forecast`]); and
//! seven simple scoring rules evaluate those forecasts ([`scoring`]).

pub mod dates;
pub mod diagnostics;
pub mod error;
pub mod forecast;
pub mod integrator;
pub mod math;
pub mod mcmc;
pub mod model;
pub mod observation;
pub mod params;
pub mod posterior;
pub mod prior;
pub mod scenario;
pub mod scoring;

pub use error::{Error, Result};
pub use forecast::{ForecastMode, ForecastSet, NbComponent, PredictiveDistribution};
pub use integrator::{integrate_daily, heun_step, DailyTrajectory, IntegratorConfig};
pub use mcmc::{init_point, run_chains, ChainConfig, InitDraw, PosteriorDraws, Target};
pub use model::{initial_state, rhs, CompartmentState, PiecewiseLinear, TransmissionParams};
pub use observation::{
    latent_means, log_likelihood, nb_log_pmf, sample_nb, CountSeries, LatentMeans, ObservationParams,
    ObservedData, Stream,
};
pub use params::{from_unconstrained, to_unconstrained, ParamLayout, ParamVector, Support};
pub use posterior::Posterior;
pub use prior::{log_prior, PriorConfig};
pub use scenario::{desk_scale, Scenario};
pub use scoring::{
    mean_scores, score, score_all, CountDistribution, DayScores, NsesVerdict, ScoreReport,
    ScoringRule, TabulatedPmf,
};
