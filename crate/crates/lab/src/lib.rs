//! Seeded experiment runner for `ffwd-core`: one experiment per result,
//! versioned JSON reports, flat CSV tables, and the `ffwd` command line.

pub mod cli;
pub mod config;
pub mod experiments;
pub mod formats;
pub mod report;

pub use config::{ConfigFile, Experiment, ExperimentConfig, Format, ToleranceProfile};
pub use experiments::run_experiment;
pub use report::{Report, SCHEMA_VERSION};

#[derive(Debug, thiserror::Error)]
pub enum LabError {
    #[error(transparent)]
    Core(#[from] ffwd_core::Error),
    #[error("invalid parameter: {0}")]
    Invalid(String),
    #[error("malformed input: {0}")]
    Format(String),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    #[error("cannot write {0}: {1}")]
    Unwritable(String, std::io::Error),
}

impl LabError {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        LabError::Invalid(msg.into())
    }

    /// Whether the error comes from bad input rather than a failed run.
    pub fn is_usage(&self) -> bool {
        matches!(
            self,
            LabError::Invalid(_) | LabError::Format(_) | LabError::Json(_) | LabError::Core(ffwd_core::Error::InvalidParameter(_))
        )
    }
}
