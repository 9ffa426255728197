use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::analysis::{PeakCut, SpectralVelocities};
use crate::effective_model::DerivedModel;

use super::config::ExperimentConfig;
use super::RunError;

pub const MANIFEST_FILE: &str = "manifest.json";

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FileEntry {
    /// Path relative to the run directory.
    pub name: String,
    pub kind: String,
    pub bytes: u64,
    pub sha256: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StageTiming {
    pub stage: String,
    pub seconds: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum RunStatus {
    Complete,
    Failed { stage: String, message: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FrontSummary {
    pub charge: f64,
    pub spin: f64,
    pub ratio: f64,
    pub charge_residual: f64,
    pub spin_residual: f64,
}

/// Scalars worth reading without opening the artifacts.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct RunSummary {
    pub velocity_ratio_analytic: Option<f64>,
    pub fronts: Option<FrontSummary>,
    pub spectral: Option<SpectralVelocities>,
    pub peaks: Vec<PeakCut>,
    pub ramp_energy: Option<f64>,
    pub norm_drift: Option<f64>,
    pub energy_drift: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub version: String,
    pub config: ExperimentConfig,
    pub derived: Option<DerivedModel>,
    pub summary: RunSummary,
    pub files: Vec<FileEntry>,
    pub timings: Vec<StageTiming>,
    #[serde(flatten)]
    pub status: RunStatus,
}

impl RunManifest {
    pub fn file(&self, kind: &str) -> Option<&FileEntry> {
        self.files.iter().find(|f| f.kind == kind)
    }

    pub fn is_complete(&self) -> bool {
        self.status == RunStatus::Complete
    }
}

pub fn hash_file(path: &Path) -> Result<(u64, String), RunError> {
    let bytes = fs::read(path).map_err(|e| RunError::io(path, e))?;
    Ok((bytes.len() as u64, hex::encode(Sha256::digest(&bytes))))
}

pub fn read_manifest(path: &Path) -> Result<RunManifest, RunError> {
    let path = if path.is_dir() {
        path.join(MANIFEST_FILE)
    } else {
        path.to_path_buf()
    };
    let text = fs::read_to_string(&path).map_err(|e| RunError::io(&path, e))?;
    serde_json::from_str(&text).map_err(|e| RunError::Parse {
        line: e.line(),
        column: e.column(),
        message: format!("{}: {e}", path.display()),
    })
}
