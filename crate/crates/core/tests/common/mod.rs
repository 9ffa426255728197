#![allow(dead_code, clippy::too_many_arguments)]

use std::f64::consts::PI;
use std::path::Path;

use polariton_ll::analysis::{Frame, SpectralComponent, TimeWindow, Window};
use polariton_ll::dynamics::{Grid, InitialSpec};
use polariton_ll::effective_model::QuantumOpticsConfig;
use polariton_ll::runner::{
    load_config, DirectModel, ExperimentConfig, FrontsRequest, SpectrumRequest,
};

/// Matched components with `V₁₂/U = 0.6`, `m = ρ₀ = U = 1`.
pub fn spin_charge_model() -> DirectModel {
    DirectModel {
        mass: [1.0, 1.0],
        intra: [1.0, 1.0],
        v1: 0.3,
        v2: 0.3,
        rho0: [1.0, 1.0],
    }
}

pub fn minimal(dir: &Path) -> ExperimentConfig {
    let doc = format!(
        r#"{{
            "effective_model": {{"mass": [1, 1], "intra": [1, 1], "v1": 0.3, "v2": 0.3, "rho0": [1, 1]}},
            "grid": {{"n_points": 64, "length": 20}},
            "initial": [{{"mode": "vacuum"}}, {{"mode": "vacuum"}}],
            "output": {{"dir": {:?}}}
        }}"#,
        dir.to_str().unwrap()
    );
    load_config(&doc).unwrap()
}

fn spectrum(detection_length: f64) -> SpectrumRequest {
    SpectrumRequest {
        component: SpectralComponent::First,
        window: Window::Hann,
        frame: Frame::Condensate,
        subtract_mean: true,
        detection_length: Some(detection_length),
        peaks_q: Vec::new(),
        fit_q_max: None,
        export_q_max: None,
        rescale_axes: false,
        prominence: 0.05,
    }
}

/// Bump in component 1 on a uniform background of both components.
pub fn spin_charge_run(
    dir: &Path,
    n_points: usize,
    length: f64,
    bump_width: f64,
    dt: f64,
    t_final: f64,
    sample_every: usize,
    fronts: TimeWindow,
    detection_length: f64,
) -> ExperimentConfig {
    let mut cfg = minimal(dir);
    cfg.effective_model = Some(spin_charge_model());
    cfg.grid = Grid::new(n_points, length).unwrap();
    cfg.initial = [
        InitialSpec::BackgroundPlusBump {
            density: 1.0,
            center: length / 2.0,
            bump_fraction: 0.01,
            bump_width,
        },
        InitialSpec::uniform(1.0),
    ];
    cfg.integration.dt = dt;
    cfg.integration.t_final = t_final;
    cfg.integration.sample_every = sample_every;
    cfg.analysis.fronts = Some(FrontsRequest { window: fronts });
    cfg.analysis.spectrum = Some(spectrum(detection_length));
    cfg.output.densities = false;
    cfg
}

/// The full-size reference run: `n = 2048`, `L = 200ξ` with
/// `ξ = 1/√(2mρ₀U)`, detection length `z₀ = 20`.
pub fn reference_run(dir: &Path) -> ExperimentConfig {
    let xi = 1.0 / 2f64.sqrt();
    spin_charge_run(dir, 2048, 200.0 * xi, 5.0, 0.0025, 160.0, 100, TimeWindow::new(15.0, 45.0), 20.0)
}

/// A small, fast variant used for plumbing tests.
pub fn small_run(dir: &Path) -> ExperimentConfig {
    spin_charge_run(dir, 512, 128.0, 3.0, 0.01, 32.0, 10, TimeWindow::new(8.0, 30.0), 16.0)
}

/// Symmetric EIT configuration with photon density 1 against `n_z = 10⁴`.
pub fn optics(atom_density: f64) -> QuantumOpticsConfig {
    let gamma_1d = 0.2;
    let nu = 4.0 * PI / (0.6 * gamma_1d);
    QuantumOpticsConfig::symmetric(-3.0, 20.0, 0.5, 1.0, atom_density, gamma_1d, nu, 10.0, 10.0)
}

pub fn optics_config(dir: &Path, atom_density: f64) -> ExperimentConfig {
    let mut cfg = minimal(dir);
    cfg.effective_model = None;
    cfg.quantum_optics = Some(optics(atom_density));
    cfg
}
