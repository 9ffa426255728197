//! Strang split-step Fourier integrator for
//!
//! ```text
//! i ∂_t ψ₁ = −(1/2m₁) ∂_z² ψ₁ + (U₁|ψ₁|² + V₁₂|ψ₂|²) ψ₁
//! i ∂_t ψ₂ = −(1/2m₂) ∂_z² ψ₂ + (U₂|ψ₂|² + V₁₂|ψ₁|²) ψ₂
//! ```
//!
//! Each step is a half kinetic step in wavenumber space, a full nonlinear
//! phase rotation in position space with couplings taken at the step
//! midpoint, and another half kinetic step. Both substeps multiply by unit
//! phases, so the norms are conserved to roundoff.

use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use super::grid::Grid;
use super::schedule::{Couplings, RampSchedule, Stage};
use super::state::FieldState;
use super::trajectory::{Diagnostics, Sample, Trajectory};
use super::DynamicsError;

/// Per-step nonlinear phase above which a step is rejected.
pub const MAX_NONLINEAR_PHASE: f64 = 0.1;

pub struct SplitStep {
    grid: Grid,
    k2: Vec<f64>,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
    scratch: Vec<Complex64>,
    half_kick: Option<(f64, [f64; 2], [Vec<Complex64>; 2])>,
}

impl SplitStep {
    pub fn new(grid: Grid) -> Result<Self, DynamicsError> {
        grid.validate()?;
        let mut planner = FftPlanner::new();
        let forward = planner.plan_fft_forward(grid.n_points);
        let inverse = planner.plan_fft_inverse(grid.n_points);
        let scratch_len = forward
            .get_inplace_scratch_len()
            .max(inverse.get_inplace_scratch_len());
        Ok(Self {
            k2: grid.wavenumbers().iter().map(|k| k * k).collect(),
            grid,
            forward,
            inverse,
            scratch: vec![Complex64::new(0.0, 0.0); scratch_len],
            half_kick: None,
        })
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    /// `exp(−i k²/(2m) dt/2) / n`, cached for the current `dt` and masses.
    fn half_kick(&mut self, dt: f64, mass: [f64; 2]) -> &[Vec<Complex64>; 2] {
        let stale = match &self.half_kick {
            Some((cached_dt, cached_mass, _)) => *cached_dt != dt || *cached_mass != mass,
            None => true,
        };
        if stale {
            let inv_n = 1.0 / self.grid.n_points as f64;
            let build = |m: f64| {
                self.k2
                    .iter()
                    .map(|k2| Complex64::from_polar(inv_n, -k2 / (2.0 * m) * 0.5 * dt))
                    .collect::<Vec<_>>()
            };
            self.half_kick = Some((dt, mass, [build(mass[0]), build(mass[1])]));
        }
        &self.half_kick.as_ref().expect("just filled").2
    }

    fn kinetic_half_step(&mut self, state: &mut FieldState, dt: f64, mass: [f64; 2]) {
        self.half_kick(dt, mass);
        let Self {
            forward,
            inverse,
            scratch,
            half_kick,
            ..
        } = self;
        let factors = &half_kick.as_ref().expect("filled above").2;
        for (psi, factor) in state.psi.iter_mut().zip(factors.iter()) {
            forward.process_with_scratch(psi, scratch);
            for (c, f) in psi.iter_mut().zip(factor) {
                *c *= f;
            }
            inverse.process_with_scratch(psi, scratch);
        }
    }

    /// Advances `state` by `dt` in place. `index` labels the step in errors.
    pub fn step_in_place(
        &mut self,
        state: &mut FieldState,
        schedule: &RampSchedule,
        dt: f64,
        index: usize,
    ) -> Result<(), DynamicsError> {
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(DynamicsError::Domain(format!("dt must be positive, got {dt}")));
        }
        let c = schedule.couplings_at(state.t + 0.5 * dt);
        self.kinetic_half_step(state, dt, schedule.mass);
        nonlinear_rotation(state, &c, dt, index)?;
        self.kinetic_half_step(state, dt, schedule.mass);
        state.t += dt;
        let finite = state
            .psi
            .iter()
            .all(|p| p.iter().all(|c| c.re.is_finite() && c.im.is_finite()));
        if !finite {
            return Err(DynamicsError::Blowup { step: index });
        }
        Ok(())
    }

    /// Total energy
    /// `Σ_i [(1/2m_i)∫|∂_zψ_i|² + (U_i/2)∫ρ_i²] + V₁₂ ∫ρ₁ρ₂`,
    /// with the gradient term evaluated spectrally.
    pub fn energy(&mut self, state: &FieldState, mass: [f64; 2], c: &Couplings) -> f64 {
        let dz = self.grid.dz();
        let n = self.grid.n_points as f64;
        let mut kinetic = 0.0;
        for (i, psi) in state.psi.iter().enumerate() {
            let mut buf = psi.clone();
            self.forward.process_with_scratch(&mut buf, &mut self.scratch);
            let s: f64 = buf
                .iter()
                .zip(&self.k2)
                .map(|(f, k2)| k2 * f.norm_sqr())
                .sum();
            kinetic += s * dz / n / (2.0 * mass[i]);
        }
        let mut interaction = 0.0;
        for (a, b) in state.psi[0].iter().zip(&state.psi[1]) {
            let (n1, n2) = (a.norm_sqr(), b.norm_sqr());
            interaction += 0.5 * c.intra[0] * n1 * n1 + 0.5 * c.intra[1] * n2 * n2 + c.v12 * n1 * n2;
        }
        kinetic + interaction * dz
    }

    pub fn diagnostics(&mut self, state: &FieldState, schedule: &RampSchedule) -> Diagnostics {
        let c = schedule.couplings_at(state.t);
        Diagnostics {
            t: state.t,
            norm: state.norms(),
            energy: self.energy(state, schedule.mass, &c),
        }
    }

    /// Integrates from `state.t` to `t_final`, recording the initial state and
    /// every `sample_every`-th step.
    ///
    /// The step count is `round((t_final − t₀)/dt)` and the step is adjusted
    /// so the final time is hit exactly.
    pub fn evolve(
        &mut self,
        state: FieldState,
        schedule: &RampSchedule,
        t_final: f64,
        dt: f64,
        sample_every: usize,
    ) -> Result<Trajectory, DynamicsError> {
        if sample_every == 0 {
            return Err(DynamicsError::Domain("sample_every must be >= 1".into()));
        }
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(DynamicsError::Domain(format!("dt must be positive, got {dt}")));
        }
        let t0 = state.t;
        if !(t_final >= t0) {
            return Err(DynamicsError::Domain(format!(
                "t_final {t_final} precedes the initial time {t0}"
            )));
        }
        let n_steps = ((t_final - t0) / dt).round() as usize;
        let dt_eff = if n_steps == 0 {
            dt
        } else {
            (t_final - t0) / n_steps as f64
        };

        let mut state = state;
        let first = self.diagnostics(&state, schedule);
        let mut samples = vec![Sample {
            state: state.clone(),
            diagnostics: first,
        }];
        let ramp = schedule.stage(Stage::Ramp).filter(|m| m.end > m.start);
        let mut ramp_energy_start = None;
        let mut ramp_energy_end = None;
        if let Some(m) = ramp {
            if m.start <= t0 {
                ramp_energy_start = Some(first.energy);
            }
        }

        for k in 0..n_steps {
            self.step_in_place(&mut state, schedule, dt_eff, k).map_err(|e| {
                DynamicsError::Stage {
                    stage: schedule.stage_at(state.t),
                    t: state.t,
                    source: Box::new(e),
                }
            })?;
            // exact multiples avoid accumulated drift in the sample times
            state.t = t0 + (k + 1) as f64 * dt_eff;
            if let Some(m) = ramp {
                if ramp_energy_start.is_none() && state.t >= m.start {
                    ramp_energy_start = Some(self.diagnostics(&state, schedule).energy);
                }
                if ramp_energy_end.is_none() && state.t >= m.end {
                    ramp_energy_end = Some(self.diagnostics(&state, schedule).energy);
                }
            }
            if (k + 1) % sample_every == 0 {
                let d = self.diagnostics(&state, schedule);
                samples.push(Sample {
                    state: state.clone(),
                    diagnostics: d,
                });
            }
        }
        let final_diagnostics = self.diagnostics(&state, schedule);
        let ramp_energy = match (ramp_energy_start, ramp_energy_end) {
            (Some(a), Some(b)) => Some(b - a),
            _ => None,
        };
        Ok(Trajectory {
            samples,
            final_state: state,
            final_diagnostics,
            ramp_energy,
            sample_interval: dt_eff * sample_every as f64,
        })
    }
}

fn nonlinear_rotation(
    state: &mut FieldState,
    c: &Couplings,
    dt: f64,
    index: usize,
) -> Result<(), DynamicsError> {
    let [psi1, psi2] = &mut state.psi;
    let mut max_phase: f64 = 0.0;
    for (a, b) in psi1.iter().zip(psi2.iter()) {
        let (n1, n2) = (a.norm_sqr(), b.norm_sqr());
        let p1 = (c.intra[0] * n1 + c.v12 * n2) * dt;
        let p2 = (c.intra[1] * n2 + c.v12 * n1) * dt;
        max_phase = max_phase.max(p1.abs()).max(p2.abs());
    }
    if !(max_phase < MAX_NONLINEAR_PHASE) {
        if max_phase.is_nan() {
            return Err(DynamicsError::Blowup { step: index });
        }
        return Err(DynamicsError::NonlinearPhase {
            step: index,
            phase: max_phase,
            dt,
        });
    }
    for (a, b) in psi1.iter_mut().zip(psi2.iter_mut()) {
        let (n1, n2) = (a.norm_sqr(), b.norm_sqr());
        *a *= Complex64::from_polar(1.0, -(c.intra[0] * n1 + c.v12 * n2) * dt);
        *b *= Complex64::from_polar(1.0, -(c.intra[1] * n2 + c.v12 * n1) * dt);
    }
    Ok(())
}

/// One Strang step, returning the advanced state.
pub fn step(state: &FieldState, schedule: &RampSchedule, dt: f64) -> Result<FieldState, DynamicsError> {
    let mut solver = SplitStep::new(state.grid)?;
    let mut next = state.clone();
    solver.step_in_place(&mut next, schedule, dt, 0)?;
    Ok(next)
}

pub fn evolve(
    state: FieldState,
    schedule: &RampSchedule,
    t_final: f64,
    dt: f64,
    sample_every: usize,
) -> Result<Trajectory, DynamicsError> {
    SplitStep::new(state.grid)?.evolve(state, schedule, t_final, dt, sample_every)
}

pub fn energy(state: &FieldState, mass: [f64; 2], couplings: &Couplings) -> f64 {
    SplitStep::new(state.grid)
        .expect("state grid was validated on construction")
        .energy(state, mass, couplings)
}
