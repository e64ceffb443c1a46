//! Experiment drivers behind the `hqi` binary.
//!
//! Each subcommand resolves an [`ExperimentConfig`] against its defaults,
//! runs on the current rayon pool and returns an [`Outcome`]: a main CSV
//! table, auxiliary tables and the tolerance checks that set the exit code.

pub mod config;
pub mod functions;
pub mod output;
pub mod preset;
pub mod run;

pub use config::ExperimentConfig;
pub use output::{Cell, Check, Outcome, Table};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error(transparent)]
    Core(#[from] hqi_core::Error),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Experiment {
    Converge,
    Harmonic,
    Saturation,
    MomentsCheck,
    Deriv,
}

impl Experiment {
    pub fn name(self) -> &'static str {
        match self {
            Experiment::Converge => "converge",
            Experiment::Harmonic => "harmonic",
            Experiment::Saturation => "saturation",
            Experiment::MomentsCheck => "moments-check",
            Experiment::Deriv => "deriv",
        }
    }
}

/// Command-line overrides applied on top of the file.
#[derive(Debug, Clone, Copy, Default)]
pub struct Overrides {
    pub tail_tol: Option<f64>,
    pub seed: Option<u64>,
}

pub const DEFAULT_SEED: u64 = 20240607;

/// Runs one experiment on the current thread pool.
pub fn run(kind: Experiment, cfg: &ExperimentConfig, over: Overrides) -> Result<Outcome, CliError> {
    let mut cfg = cfg.clone();
    if over.tail_tol.is_some() {
        cfg.tail_tol = over.tail_tol;
    }
    if over.seed.is_some() {
        cfg.seed = over.seed;
    }
    let mut out = match kind {
        Experiment::Converge => run::converge::run(&cfg)?,
        Experiment::Harmonic => run::harmonic::run(&cfg)?,
        Experiment::Saturation => run::saturation::run(&cfg)?,
        Experiment::MomentsCheck => run::moments::run(&cfg)?,
        Experiment::Deriv => run::deriv::run(&cfg)?,
    };
    out.header.insert(0, ("command".into(), kind.name().into()));
    Ok(out)
}
