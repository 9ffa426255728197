//! Experiment documents, staged runs, parameter sweeps and artifact
//! persistence.

mod config;
mod manifest;
mod plot;
mod run;
mod sweep;

use std::path::{Path, PathBuf};

use thiserror::Error;

use crate::analysis::AnalysisError;
use crate::dynamics::DynamicsError;
use crate::effective_model::ModelError;

pub use config::{
    load_config, load_config_file, AnalysisRequest, DirectModel, ExperimentConfig, Format,
    FrontsRequest, Integration, OutputSpec, ScheduleSpec, SpectrumRequest, DEFAULT_DT,
    DEFAULT_OUTPUT_DIR, DEFAULT_SAMPLE_EVERY,
};
pub use manifest::{
    hash_file, read_manifest, FileEntry, FrontSummary, RunManifest, RunStatus, RunSummary,
    StageTiming, MANIFEST_FILE,
};
pub use plot::{emit_plot_data, read_spectrum_csv, PlotTarget};
pub use run::{build_schedule, derive_model, run_experiment};
pub use sweep::{parse_axis, sweep, Axis, SweepOptions, SweepRow, SweepTable, DEFAULT_SWEEP_LIMIT};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Error)]
pub enum RunError {
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("invalid config: {0}")]
    Schema(String),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("validity check failed (worst ratio {worst:.3e}); rerun with --allow-invalid to proceed")]
    Validity { worst: f64 },
    #[error(transparent)]
    Dynamics(#[from] DynamicsError),
    #[error(transparent)]
    Analysis(#[from] AnalysisError),
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("not found: {0}")]
    NotFound(String),
    #[error("sweep: {0}")]
    Sweep(String),
    #[error("{stage} stage: {source}")]
    Stage {
        stage: &'static str,
        #[source]
        source: Box<RunError>,
    },
}

impl RunError {
    pub(crate) fn io(path: &Path, source: std::io::Error) -> Self {
        RunError::Io {
            path: path.to_path_buf(),
            source,
        }
    }

    pub(crate) fn at(stage: &'static str) -> impl FnOnce(RunError) -> RunError {
        move |e| match e {
            RunError::Stage { .. } => e,
            other => RunError::Stage {
                stage,
                source: Box::new(other),
            },
        }
    }

    pub fn root(&self) -> &RunError {
        match self {
            RunError::Stage { source, .. } => source.root(),
            other => other,
        }
    }

    /// Process exit status: 1 for usage and config errors, 2 for a failed
    /// validity check, 3 for numerical failures.
    pub fn exit_code(&self) -> i32 {
        match self.root() {
            RunError::Validity { .. } => 2,
            RunError::Dynamics(e) if e.is_numerical() => 3,
            RunError::Analysis(_) => 3,
            _ => 1,
        }
    }
}
