use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::grid::Grid;
use super::DynamicsError;

/// The two polariton fields on a grid at one instant.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldState {
    pub grid: Grid,
    pub psi: [Vec<Complex64>; 2],
    pub t: f64,
}

impl FieldState {
    pub fn new(grid: Grid, psi1: Vec<Complex64>, psi2: Vec<Complex64>, t: f64) -> Result<Self, DynamicsError> {
        grid.validate()?;
        if psi1.len() != grid.n_points || psi2.len() != grid.n_points {
            return Err(DynamicsError::Domain(format!(
                "field lengths ({}, {}) do not match grid size {}",
                psi1.len(),
                psi2.len(),
                grid.n_points
            )));
        }
        Ok(Self {
            grid,
            psi: [psi1, psi2],
            t,
        })
    }

    pub fn density(&self, component: usize) -> Vec<f64> {
        self.psi[component].iter().map(|c| c.norm_sqr()).collect()
    }

    /// `Σ |ψ_i|² dz`.
    pub fn norm(&self, component: usize) -> f64 {
        self.psi[component].iter().map(|c| c.norm_sqr()).sum::<f64>() * self.grid.dz()
    }

    pub fn norms(&self) -> [f64; 2] {
        [self.norm(0), self.norm(1)]
    }

    /// Mirror image about `z = L/2` (index `j → n − j`).
    pub fn mirrored(&self) -> Self {
        let n = self.grid.n_points;
        let mirror = |v: &Vec<Complex64>| (0..n).map(|j| v[(n - j) % n]).collect::<Vec<_>>();
        Self {
            grid: self.grid,
            psi: [mirror(&self.psi[0]), mirror(&self.psi[1])],
            t: self.t,
        }
    }

    pub fn swapped(&self) -> Self {
        Self {
            grid: self.grid,
            psi: [self.psi[1].clone(), self.psi[0].clone()],
            t: self.t,
        }
    }
}

/// Initial profile of one component.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case", deny_unknown_fields)]
pub enum InitialSpec {
    /// Gaussian pulse `A exp(−(z−c)²/(4 z0²))` holding `photon_number`.
    Pulse {
        center: f64,
        width: f64,
        photon_number: f64,
    },
    /// Uniform background `√ρ₀ (1 + ε exp(−(z−c)²/(2w²)))`.
    BackgroundPlusBump {
        density: f64,
        center: f64,
        bump_fraction: f64,
        bump_width: f64,
    },
    Vacuum,
}

pub const MAX_BUMP_FRACTION: f64 = 0.05;

impl InitialSpec {
    pub fn uniform(density: f64) -> Self {
        InitialSpec::BackgroundPlusBump {
            density,
            center: 0.0,
            bump_fraction: 0.0,
            bump_width: 1.0,
        }
    }

    pub fn build(&self, grid: &Grid) -> Result<Vec<Complex64>, DynamicsError> {
        grid.validate()?;
        let max_width = grid.length / 4.0;
        let z = grid.positions();
        match *self {
            InitialSpec::Pulse {
                center,
                width,
                photon_number,
            } => {
                if !(width > 0.0 && width < max_width) {
                    return Err(DynamicsError::Domain(format!(
                        "pulse width {width} must lie in (0, L/4 = {max_width})"
                    )));
                }
                if !(photon_number > 0.0 && photon_number.is_finite()) {
                    return Err(DynamicsError::Domain(format!(
                        "photon number must be positive, got {photon_number}"
                    )));
                }
                let profile: Vec<f64> = z
                    .iter()
                    .map(|&zj| {
                        let d = grid.periodic_offset(zj, center);
                        (-d * d / (4.0 * width * width)).exp()
                    })
                    .collect();
                let raw: f64 = profile.iter().map(|p| p * p).sum::<f64>() * grid.dz();
                let amp = (photon_number / raw).sqrt();
                Ok(profile.iter().map(|p| Complex64::new(amp * p, 0.0)).collect())
            }
            InitialSpec::BackgroundPlusBump {
                density,
                center,
                bump_fraction,
                bump_width,
            } => {
                if !(density >= 0.0 && density.is_finite()) {
                    return Err(DynamicsError::Domain(format!(
                        "background density must be non-negative, got {density}"
                    )));
                }
                if !(0.0..=MAX_BUMP_FRACTION).contains(&bump_fraction) {
                    return Err(DynamicsError::Domain(format!(
                        "bump fraction {bump_fraction} outside [0, {MAX_BUMP_FRACTION}]"
                    )));
                }
                if !(bump_width > 0.0 && bump_width < max_width) {
                    return Err(DynamicsError::Domain(format!(
                        "bump width {bump_width} must lie in (0, L/4 = {max_width})"
                    )));
                }
                let amp = density.sqrt();
                Ok(z.iter()
                    .map(|&zj| {
                        let bump = if bump_fraction == 0.0 {
                            0.0
                        } else {
                            let d = grid.periodic_offset(zj, center);
                            bump_fraction * (-d * d / (2.0 * bump_width * bump_width)).exp()
                        };
                        Complex64::new(amp * (1.0 + bump), 0.0)
                    })
                    .collect())
            }
            InitialSpec::Vacuum => Ok(vec![Complex64::new(0.0, 0.0); grid.n_points]),
        }
    }
}

/// Builds the initial pair of fields at `t = 0`.
pub fn init_state(grid: &Grid, specs: &[InitialSpec; 2]) -> Result<FieldState, DynamicsError> {
    FieldState::new(*grid, specs[0].build(grid)?, specs[1].build(grid)?, 0.0)
}
