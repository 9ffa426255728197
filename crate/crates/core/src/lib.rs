//! Simulator and parameter engine for a two-component Lieb-Liniger gas of
//! stationary dark-state polaritons.
//!
//! * [`effective_model`] maps quantum-optics parameters to masses, couplings
//!   and Luttinger-liquid parameters.
//! * [`dynamics`] integrates the coupled nonlinear Schrödinger equations with
//!   a Strang split-step Fourier scheme under a staged coupling ramp.
//! * [`analysis`] extracts charge/spin density waves, front velocities and the
//!   single-particle spectral function.
//! * [`runner`] loads experiment documents, orchestrates runs and sweeps, and
//!   writes hashed artifacts.

pub mod analysis;
pub mod dynamics;
pub mod effective_model;
pub mod runner;
