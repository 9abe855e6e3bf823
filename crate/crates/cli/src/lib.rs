//! Library surface of the command-line harness, exposed so integration and
//! acceptance tests can drive the pipeline in-process.

pub mod cli;
pub mod commands;
pub mod config;
pub mod error;
pub mod ingest;
pub mod pipeline;
pub mod sweep;
pub mod synthetic;

pub use config::{Overrides, RunConfig};
pub use error::{CliError, Result};
pub use ingest::ingest_csv;
pub use sweep::{run_sweep, CellOutcome, SweepOutputs};
pub use synthetic::simulate_synthetic;
