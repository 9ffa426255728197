use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::DynamicsError;

/// Periodic uniform grid on `[0, L)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Grid {
    pub n_points: usize,
    pub length: f64,
}

impl Grid {
    pub fn new(n_points: usize, length: f64) -> Result<Self, DynamicsError> {
        let g = Self { n_points, length };
        g.validate()?;
        Ok(g)
    }

    pub fn validate(&self) -> Result<(), DynamicsError> {
        if self.n_points < 16 || !self.n_points.is_power_of_two() {
            return Err(DynamicsError::Domain(format!(
                "grid n_points must be a power of two >= 16, got {}",
                self.n_points
            )));
        }
        if !(self.length > 0.0 && self.length.is_finite()) {
            return Err(DynamicsError::Domain(format!(
                "grid length must be positive, got {}",
                self.length
            )));
        }
        Ok(())
    }

    pub fn dz(&self) -> f64 {
        self.length / self.n_points as f64
    }

    pub fn position(&self, j: usize) -> f64 {
        j as f64 * self.dz()
    }

    pub fn positions(&self) -> Vec<f64> {
        (0..self.n_points).map(|j| self.position(j)).collect()
    }

    /// Signed mode index of FFT bin `j`, in `[−n/2, n/2)`.
    pub fn mode_index(&self, j: usize) -> i64 {
        let n = self.n_points as i64;
        let j = j as i64;
        if j < n / 2 {
            j
        } else {
            j - n
        }
    }

    /// Wavenumbers `2π j / L` in FFT order.
    pub fn wavenumbers(&self) -> Vec<f64> {
        let dk = 2.0 * PI / self.length;
        (0..self.n_points)
            .map(|j| dk * self.mode_index(j) as f64)
            .collect()
    }

    /// Signed minimum-image separation `z − c`, in `[−L/2, L/2)`.
    pub fn periodic_offset(&self, z: f64, c: f64) -> f64 {
        let l = self.length;
        (z - c + 0.5 * l).rem_euclid(l) - 0.5 * l
    }
}
