use std::collections::BTreeMap;
use std::f64::consts::PI;

use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::effective_model::Tagged;

use super::fronts::VelocityFit;
use super::spectrum::{SpectralComponent, SpectralMap, SpectralOptions};
use super::velocity::SpectralVelocities;

fn tagged(value: serde_json::Value, unit: &str) -> Tagged {
    Tagged {
        value,
        unit: unit.to_string(),
    }
}

/// Flattens a front fit to `key -> {value, unit}`; the track itself is not
/// included.
pub fn velocity_document(fit: &VelocityFit) -> BTreeMap<String, Tagged> {
    let mut m = BTreeMap::new();
    m.insert("branch".into(), tagged(json!(fit.branch), "-"));
    m.insert("method".into(), tagged(json!(fit.method), "-"));
    m.insert("velocity".into(), tagged(json!(fit.velocity), "length/time"));
    m.insert("residual".into(), tagged(json!(fit.residual), "dimensionless"));
    m.insert("window_start".into(), tagged(json!(fit.window.start), "time"));
    m.insert("window_end".into(), tagged(json!(fit.window.end), "time"));
    m.insert("n_points".into(), tagged(json!(fit.track.len()), "count"));
    m
}

pub fn spectral_velocity_document(v: &SpectralVelocities) -> BTreeMap<String, Tagged> {
    let mut m = BTreeMap::new();
    m.insert("method".into(), tagged(json!("spectral_slope"), "-"));
    m.insert("charge_velocity".into(), tagged(json!(v.charge), "length/time"));
    m.insert("spin_velocity".into(), tagged(json!(v.spin), "length/time"));
    m.insert("charge_residual".into(), tagged(json!(v.charge_residual), "dimensionless"));
    m.insert("spin_residual".into(), tagged(json!(v.spin_residual), "dimensionless"));
    m.insert("velocity_ratio".into(), tagged(json!(v.charge / v.spin), "dimensionless"));
    m.insert("n_q_bins".into(), tagged(json!(v.points.len()), "count"));
    m
}

/// Optional figure-style axis units: `q` in `π/z₀` and `ω` in
/// `(π/z₀)·2√(2/5)·u`. Recorded only; exported data stay in raw units.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AxisRescale {
    pub q_unit: f64,
    pub omega_unit: f64,
    pub label: String,
}

impl AxisRescale {
    pub const LABEL: &'static str = "omega in (pi/z0)*2*sqrt(2/5)*u, q in pi/z0";

    pub fn new(detection_length: f64, sound_velocity: f64) -> Self {
        let q_unit = PI / detection_length;
        Self {
            q_unit,
            omega_unit: q_unit * 2.0 * (2.0f64 / 5.0).sqrt() * sound_velocity,
            label: Self::LABEL.to_string(),
        }
    }
}

/// Sidecar describing a spectral map export.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumMetadata {
    pub component: SpectralComponent,
    pub options: SpectralOptions,
    pub n_q: usize,
    pub n_omega: usize,
    pub dq: f64,
    pub domega: f64,
    pub sample_interval: f64,
    pub q_unit: String,
    pub omega_unit: String,
    pub intensity_unit: String,
    /// Largest `|q|` written, when the export was truncated.
    pub q_max: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rescale: Option<AxisRescale>,
}

impl SpectrumMetadata {
    pub fn new(map: &SpectralMap, q_max: Option<f64>, rescale: Option<AxisRescale>) -> Self {
        Self {
            component: map.component,
            options: map.options,
            n_q: map.q.len(),
            n_omega: map.omega.len(),
            dq: map.dq(),
            domega: map.domega(),
            sample_interval: map.sample_interval,
            q_unit: "1/length".into(),
            omega_unit: "1/time".into(),
            intensity_unit: "|field|^2 (per sample, unnormalized grid sum)".into(),
            q_max,
            rescale,
        }
    }
}
