//! Observables extracted from trajectories: charge and spin density waves,
//! front velocities, the space-time spectral function and its ridges.

mod density;
mod export;
mod fronts;
mod peaks;
mod spectrum;
mod velocity;

use thiserror::Error;

pub use density::{density_waves, Branch, DensityWaves};
pub use export::{
    spectral_velocity_document, velocity_document, AxisRescale, SpectrumMetadata,
};
pub use fronts::{track_fronts, FitMethod, TimeWindow, VelocityFit, NOISE_FLOOR};
pub use peaks::{
    find_peaks, peak_positions, Peak, PeakCut, PeakOptions, DEFAULT_PROMINENCE, EMPTY_CUT,
};
pub use spectrum::{
    spectral_function, Frame, SpectralComponent, SpectralMap, SpectralOptions, Window, MIN_SAMPLES,
};
pub use velocity::{velocities_from_spectrum, SpectralVelocities, MIN_Q_BINS};

#[derive(Debug, Error)]
pub enum AnalysisError {
    #[error("{0}")]
    Domain(String),
    #[error("no signal: {0}")]
    NoSignal(String),
    #[error("insufficient data: {0}")]
    InsufficientData(String),
    #[error("ambiguous branch assignment: {0}")]
    Ambiguous(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}
