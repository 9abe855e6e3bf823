use thiserror::Error;

/// Errors produced by the model, integrator, calibration, and scoring layers.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    /// A parameter or argument is outside its domain.
    #[error("domain error: {0}")]
    Domain(String),

    /// The ODE integration blew up (non-finite or |value| > 10·N).
    #[error("integration diverged at model day {day}")]
    IntegrationDiverged { day: usize },

    /// An observation falls on a day the trajectory does not cover.
    #[error("observed day {day} lies outside the trajectory span")]
    Alignment { day: i64 },

    /// No finite-density initial point was found within the retry budget.
    #[error("chain {chain} initialisation failed after {attempts} attempts")]
    InitialisationFailed { chain: usize, attempts: usize },

    /// A scoring rule that divides by the predictive sd was given a
    /// zero-variance distribution.
    #[error("degenerate predictive distribution: {0}")]
    Degenerate(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}
