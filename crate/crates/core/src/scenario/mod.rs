//! Scenario front end: configuration, trajectory runs and CSV datasets.

mod config;
mod output;
mod runs;

use std::path::PathBuf;

use thiserror::Error;

use crate::coherence::LogBase;
use crate::dynamics::{DynamicsError, SystemParams};

pub use config::{default_sweep, load_config, parse_angle, parse_config, ConfigSource};
pub use output::{compare_csv, format_number, single_csv, steady_csv, sweep_csv, CSV_COLUMNS};
pub use runs::{
    run_compare, run_figures, run_single, run_sweep, simulate_compare, simulate_single,
    simulate_sweep, steady_path_for, SteadySummary, SweepResult, FIGURE_FILES, STEADY_TOL,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Run,
    Compare,
    Sweep,
    Figures,
}

impl Command {
    pub fn default_output(self) -> &'static str {
        match self {
            Command::Run => "run.csv",
            Command::Compare => "compare.csv",
            Command::Sweep => "sweep.csv",
            Command::Figures => "figures",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioConfig {
    pub command: Command,
    pub params: SystemParams,
    pub t_end: f64,
    pub dt: f64,
    pub sample_every: usize,
    /// Ω/γ₀ values for sweeps.
    pub sweep: Option<Vec<f64>>,
    pub output_path: PathBuf,
    pub log_base: LogBase,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        Self {
            command: Command::Run,
            params: SystemParams::default(),
            t_end: 10.0,
            dt: crate::dynamics::DEFAULT_DT,
            sample_every: crate::dynamics::DEFAULT_SAMPLE_EVERY,
            sweep: None,
            output_path: PathBuf::from(Command::Run.default_output()),
            log_base: LogBase::Two,
        }
    }
}

#[derive(Debug, Error)]
pub enum ScenarioError {
    /// `--help` or `--version` output; not a failure.
    #[error("{0}")]
    Help(String),
    #[error("usage error: {0}")]
    Usage(String),
    #[error("conflicting options: {0}")]
    Conflict(String),
    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("numerical error: {0}")]
    Numerical(#[from] DynamicsError),
}

impl ScenarioError {
    /// Process exit code: 0 help, 2 usage, 3 numerical, 4 I/O.
    pub fn exit_code(&self) -> i32 {
        match self {
            ScenarioError::Help(_) => 0,
            ScenarioError::Usage(_) | ScenarioError::Conflict(_) => 2,
            ScenarioError::Numerical(_) => 3,
            ScenarioError::Io { .. } => 4,
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        ScenarioError::Io {
            path: path.into(),
            source,
        }
    }
}
