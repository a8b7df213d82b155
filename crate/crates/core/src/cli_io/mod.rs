//! File formats and run orchestration: scenario files, measured profiles,
//! trajectory CSV, reports, plot scripts and manifests.

mod keyvalue;
pub mod output;
pub mod profile;
pub mod run;
pub mod scenario_file;

use std::path::PathBuf;

use thiserror::Error;

use crate::scenario::ScenarioError;

pub use keyvalue::KeyValues;
pub use output::{
    emit_plot_script, read_trajectory, CsvTrajectoryWriter, PlotKind, TRAJECTORY_HEADER,
};
pub use profile::{
    compare_profiles, load_measured_profile, MeasuredProfile, ProfileComparison, ProfileUnits,
};
pub use run::{
    replay_manifest, run, sweep, InitialCondition, RunConfig, RunError, RunSummary, ScenarioSource,
};
pub use scenario_file::{load_scenario, parse_scenario, scenario_to_text};

#[derive(Debug, Error)]
pub enum IoError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("duplicate key `{0}`")]
    DuplicateKey(String),
    #[error("missing keys: {}", .0.join(", "))]
    MissingKeys(Vec<String>),
    #[error("unknown keys: {}", .0.join(", "))]
    UnknownKeys(Vec<String>),
    #[error("bad value for `{key}`: `{value}`")]
    BadValue { key: String, value: String },
    #[error("bad unit for `{key}`: expected {expected}, got `{got}`")]
    BadUnit {
        key: String,
        expected: String,
        got: String,
    },
    #[error(transparent)]
    Scenario(#[from] ScenarioError),
    #[error("measured profile: {0}")]
    Profile(String),
    #[error("csv: {0}")]
    Csv(String),
}

impl IoError {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        IoError::Io {
            path: path.into(),
            source,
        }
    }

    /// Whether the error stems from bad input rather than the filesystem.
    pub fn is_validation(&self) -> bool {
        !matches!(self, IoError::Io { .. })
    }
}
