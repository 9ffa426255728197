use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::analysis::{Frame, SpectralComponent, SpectralOptions, TimeWindow, Window};
use crate::dynamics::{Grid, InitialSpec};
use crate::effective_model::{QuantumOpticsConfig, SignPolicy};

use super::RunError;

pub const DEFAULT_DT: f64 = 1e-3;
pub const DEFAULT_SAMPLE_EVERY: usize = 10;
pub const DEFAULT_OUTPUT_DIR: &str = "runs/latest";

/// Effective model given directly in simulation units.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DirectModel {
    pub mass: [f64; 2],
    pub intra: [f64; 2],
    pub v1: f64,
    pub v2: f64,
    pub rho0: [f64; 2],
}

/// Coupling program: the trap stage runs at `initial_scale` times the target
/// couplings, the ramp interpolates linearly to the target, and the hold
/// lasts until `t_final`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScheduleSpec {
    #[serde(default)]
    pub trap: f64,
    #[serde(default)]
    pub ramp: f64,
    #[serde(default = "one")]
    pub initial_scale: f64,
}

fn one() -> f64 {
    1.0
}

impl Default for ScheduleSpec {
    fn default() -> Self {
        Self {
            trap: 0.0,
            ramp: 0.0,
            initial_scale: 1.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Integration {
    #[serde(default = "default_dt")]
    pub dt: f64,
    #[serde(default)]
    pub t_final: f64,
    #[serde(default = "default_sample_every")]
    pub sample_every: usize,
}

fn default_dt() -> f64 {
    DEFAULT_DT
}

fn default_sample_every() -> usize {
    DEFAULT_SAMPLE_EVERY
}

impl Default for Integration {
    fn default() -> Self {
        Self {
            dt: DEFAULT_DT,
            t_final: 0.0,
            sample_every: DEFAULT_SAMPLE_EVERY,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FrontsRequest {
    #[serde(default = "all_times")]
    pub window: TimeWindow,
}

fn all_times() -> TimeWindow {
    TimeWindow::new(0.0, f64::MAX)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpectrumRequest {
    #[serde(default)]
    pub component: SpectralComponent,
    #[serde(default)]
    pub window: Window,
    #[serde(default)]
    pub frame: Frame,
    #[serde(default = "yes")]
    pub subtract_mean: bool,
    /// Detection length `z₀`; adds a peak cut at `q = 2π/z₀`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub detection_length: Option<f64>,
    /// Further `q` values at which to report peaks.
    #[serde(default)]
    pub peaks_q: Vec<f64>,
    /// Upper end of the linear-regime fit range. Defaults to `1/(4ξ)` with
    /// `ξ` the larger healing length.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fit_q_max: Option<f64>,
    /// Largest `|q|` written to the map export; defaults to `4 · fit_q_max`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub export_q_max: Option<f64>,
    /// Record figure-style axis units in the metadata (needs `detection_length`).
    #[serde(default)]
    pub rescale_axes: bool,
    #[serde(default = "default_prominence")]
    pub prominence: f64,
}

fn yes() -> bool {
    true
}

fn default_prominence() -> f64 {
    crate::analysis::DEFAULT_PROMINENCE
}

impl SpectrumRequest {
    pub fn options(&self) -> SpectralOptions {
        SpectralOptions {
            window: self.window,
            frame: self.frame,
            subtract_mean: self.subtract_mean,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AnalysisRequest {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fronts: Option<FrontsRequest>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub spectrum: Option<SpectrumRequest>,
}

impl AnalysisRequest {
    pub fn is_empty(&self) -> bool {
        self.fronts.is_none() && self.spectrum.is_none()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    #[default]
    Csv,
    Binary,
}

impl Format {
    pub fn extension(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Binary => "bin",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSpec {
    #[serde(default = "default_dir")]
    pub dir: PathBuf,
    #[serde(default)]
    pub format: Format,
    /// Write every sampled state, not only the initial and final ones.
    #[serde(default)]
    pub trajectory: bool,
    #[serde(default = "yes")]
    pub densities: bool,
}

fn default_dir() -> PathBuf {
    PathBuf::from(DEFAULT_OUTPUT_DIR)
}

impl Default for OutputSpec {
    fn default() -> Self {
        Self {
            dir: default_dir(),
            format: Format::Csv,
            trajectory: false,
            densities: true,
        }
    }
}

/// One experiment: model source, grid, initial fields, coupling program,
/// integration controls, analyses and output.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub quantum_optics: Option<QuantumOpticsConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub effective_model: Option<DirectModel>,
    pub grid: Grid,
    pub initial: [InitialSpec; 2],
    #[serde(default)]
    pub schedule: ScheduleSpec,
    #[serde(default)]
    pub integration: Integration,
    #[serde(default)]
    pub analysis: AnalysisRequest,
    #[serde(default)]
    pub output: OutputSpec,
    /// Reserved; the pipeline is deterministic.
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub allow_invalid: bool,
    #[serde(default)]
    pub policy: SignPolicy,
}

fn schema(msg: impl Into<String>) -> RunError {
    RunError::Schema(msg.into())
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<(), RunError> {
        match (&self.quantum_optics, &self.effective_model) {
            (Some(_), Some(_)) => {
                return Err(schema(
                    "supply exactly one of `quantum_optics` and `effective_model`, not both",
                ))
            }
            (None, None) => {
                return Err(schema(
                    "one of `quantum_optics` or `effective_model` is required",
                ))
            }
            _ => {}
        }
        self.grid
            .validate()
            .map_err(|e| schema(format!("grid: {e}")))?;
        let s = &self.schedule;
        for (key, v) in [("schedule.trap", s.trap), ("schedule.ramp", s.ramp)] {
            if !(v >= 0.0 && v.is_finite()) {
                return Err(schema(format!("{key} must be a non-negative duration, got {v}")));
            }
        }
        if !(s.initial_scale > 0.0 && s.initial_scale <= 1.0) {
            return Err(schema(format!(
                "schedule.initial_scale must lie in (0, 1], got {}",
                s.initial_scale
            )));
        }
        let i = &self.integration;
        if !(i.dt > 0.0 && i.dt.is_finite()) {
            return Err(schema(format!("integration.dt must be positive, got {}", i.dt)));
        }
        if !(i.t_final >= 0.0 && i.t_final.is_finite()) {
            return Err(schema(format!(
                "integration.t_final must be non-negative, got {}",
                i.t_final
            )));
        }
        if i.sample_every == 0 {
            return Err(schema("integration.sample_every must be at least 1"));
        }
        if let Some(sp) = &self.analysis.spectrum {
            if let Some(z0) = sp.detection_length {
                if !(z0 > 0.0 && z0.is_finite()) {
                    return Err(schema(format!(
                        "analysis.spectrum.detection_length must be positive, got {z0}"
                    )));
                }
            }
            if sp.rescale_axes && sp.detection_length.is_none() {
                return Err(schema(
                    "analysis.spectrum.rescale_axes needs analysis.spectrum.detection_length",
                ));
            }
            if !(0.0..1.0).contains(&sp.prominence) {
                return Err(schema(format!(
                    "analysis.spectrum.prominence must lie in [0, 1), got {}",
                    sp.prominence
                )));
            }
        }
        Ok(())
    }

    /// Pretty JSON that [`load_config`] reads back to an equal value.
    pub fn to_document(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }
}

/// Parses and validates a JSON experiment document.
pub fn load_config(document: &str) -> Result<ExperimentConfig, RunError> {
    let cfg: ExperimentConfig = serde_json::from_str(document).map_err(|e| RunError::Parse {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    cfg.validate()?;
    Ok(cfg)
}

pub fn load_config_file(path: &Path) -> Result<ExperimentConfig, RunError> {
    let text = std::fs::read_to_string(path).map_err(|e| RunError::io(path, e))?;
    load_config(&text).map_err(|e| match e {
        RunError::Parse {
            line,
            column,
            message,
        } => RunError::Parse {
            line,
            column,
            message: format!("{}: {message}", path.display()),
        },
        other => other,
    })
}
