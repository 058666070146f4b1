//! Batch experiments for the PXP ergotropy study.
//!
//! Each experiment reads a [`config::RunConfig`], writes CSV or JSON outputs
//! into the configured directory and keeps a JSON manifest next to them.

pub mod config;
pub mod eigenstudy;
mod error;
pub mod fitreport;
pub mod manifest;
pub mod quench;
pub mod separate;
pub mod tables;
pub mod transfer;

pub use error::{RunError, RunResult};

use config::{Experiment, RunConfig};

/// Runs the experiment named in `cfg`.
pub fn run(cfg: &RunConfig) -> RunResult<()> {
    match cfg.experiment {
        Experiment::Eigenstudy => eigenstudy::run_eigenstudy(cfg).map(drop),
        Experiment::Quench => quench::run_quench(cfg).map(drop),
        Experiment::Analytics => transfer::run_analytics(cfg).map(drop),
        Experiment::Separate => separate::run_separate(cfg).map(drop),
        Experiment::Fit => fitreport::run_fit(cfg).map(drop),
    }
}
