use serde::{Deserialize, Serialize};

use super::state::FieldState;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Diagnostics {
    pub t: f64,
    pub norm: [f64; 2],
    pub energy: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Sample {
    pub state: FieldState,
    pub diagnostics: Diagnostics,
}

/// Time-ordered snapshots of one evolution.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    /// Uniformly spaced samples, starting with the initial state.
    pub samples: Vec<Sample>,
    /// State at the final time, whether or not it fell on a sample.
    pub final_state: FieldState,
    pub final_diagnostics: Diagnostics,
    /// Energy change across the ramp stage, when the run covered it.
    pub ramp_energy: Option<f64>,
    pub sample_interval: f64,
}

impl Trajectory {
    pub fn times(&self) -> Vec<f64> {
        self.samples.iter().map(|s| s.state.t).collect()
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    /// Largest relative change of either norm over the samples and the final
    /// state.
    pub fn max_norm_drift(&self) -> f64 {
        let n0 = self.samples[0].diagnostics.norm;
        self.samples
            .iter()
            .map(|s| s.diagnostics.norm)
            .chain(std::iter::once(self.final_diagnostics.norm))
            .flat_map(|n| {
                (0..2).map(move |i| {
                    if n0[i] == 0.0 {
                        n[i].abs()
                    } else {
                        ((n[i] - n0[i]) / n0[i]).abs()
                    }
                })
            })
            .fold(0.0, f64::max)
    }

    pub fn max_energy_drift(&self) -> f64 {
        let e0 = self.samples[0].diagnostics.energy;
        self.samples
            .iter()
            .map(|s| s.diagnostics.energy)
            .chain(std::iter::once(self.final_diagnostics.energy))
            .map(|e| ((e - e0) / e0).abs())
            .fold(0.0, f64::max)
    }

    /// Sub-trajectory of the samples with `t ∈ [t_start, t_end]`.
    pub fn window(&self, t_start: f64, t_end: f64) -> Trajectory {
        let samples: Vec<Sample> = self
            .samples
            .iter()
            .filter(|s| s.state.t >= t_start && s.state.t <= t_end)
            .cloned()
            .collect();
        let last = samples.last().unwrap_or(&self.samples[0]).clone();
        Trajectory {
            final_state: last.state,
            final_diagnostics: last.diagnostics,
            samples,
            ramp_energy: None,
            sample_interval: self.sample_interval,
        }
    }
}

/// Readout state at release: the final held fields, unchanged.
pub fn release(trajectory: &Trajectory) -> FieldState {
    trajectory.final_state.clone()
}
