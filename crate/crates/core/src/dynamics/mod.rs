//! Split-step spectral integration of the coupled polariton field equations
//! under a staged coupling program.
//!
//! Fields are evolved as classical complex amplitudes (mean-field). For
//! matched components the in-phase and out-of-phase Bogoliubov sound speeds
//! `√(ρ₀(U ± V₁₂)/m)` coincide with the charge and spin velocities of the
//! effective model, which is what the analysis stage measures.

mod export;
mod grid;
mod integrator;
mod schedule;
mod state;
mod trajectory;

use thiserror::Error;

pub use export::{read_binary, read_csv, write_binary, write_csv, BINARY_MAGIC, CSV_HEADER};
pub use grid::Grid;
pub use integrator::{energy, evolve, step, SplitStep, MAX_NONLINEAR_PHASE};
pub use schedule::{Couplings, RampSchedule, Stage, StageMarker};
pub use state::{init_state, FieldState, InitialSpec, MAX_BUMP_FRACTION};
pub use trajectory::{release, Diagnostics, Sample, Trajectory};

#[derive(Debug, Error)]
pub enum DynamicsError {
    #[error("{0}")]
    Domain(String),
    #[error("invalid schedule: {0}")]
    Schedule(String),
    #[error(
        "nonlinear phase {phase:.3} rad at step {step} exceeds {MAX_NONLINEAR_PHASE} rad; \
         reduce dt (currently {dt})"
    )]
    NonlinearPhase { step: usize, phase: f64, dt: f64 },
    #[error("numerical blowup (NaN/Inf) at step {step}")]
    Blowup { step: usize },
    #[error("during {stage:?} stage at t = {t}: {source}")]
    Stage {
        stage: Stage,
        t: f64,
        #[source]
        source: Box<DynamicsError>,
    },
    #[error("malformed trajectory file: {0}")]
    Format(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl DynamicsError {
    /// True for failures of the integration itself rather than bad input.
    pub fn is_numerical(&self) -> bool {
        match self {
            DynamicsError::NonlinearPhase { .. } | DynamicsError::Blowup { .. } => true,
            DynamicsError::Stage { source, .. } => source.is_numerical(),
            _ => false,
        }
    }
}
