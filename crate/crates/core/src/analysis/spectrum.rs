//! Space-time power spectrum `S(q, ω)` of a field trajectory.
//!
//! Convention: a field `exp(i(k₀z − ω₀t))` puts its weight at `(k₀, ω₀)`.
//! `S = |F|² / (N_z N_t)` with `F` the unnormalized double sum, so that
//! `Σ S = Σ |ψ − ψ̄|²` over the windowed samples.

use std::f64::consts::PI;
use std::io::{BufWriter, Write};

use num_complex::Complex64;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::dynamics::Trajectory;

use super::AnalysisError;

pub const MIN_SAMPLES: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Window {
    #[default]
    Hann,
    None,
}

/// Which field the spectrum is taken of. `Charge` and `Spin` use
/// `(ψ₁ ± ψ₂)/√2`, each component first rotated to its own condensate frame.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum SpectralComponent {
    #[default]
    First,
    Second,
    Charge,
    Spin,
}

/// Reference frame for the time axis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Frame {
    /// Raw field; a uniform condensate sits at `ω = μ`.
    Lab,
    /// Each sample rotated by the phase of its spatial mean, which removes
    /// the chemical-potential rotation and puts the condensate at `ω = 0`.
    #[default]
    Condensate,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpectralOptions {
    #[serde(default)]
    pub window: Window,
    #[serde(default)]
    pub frame: Frame,
    /// Remove the space-time mean (the condensate line) before transforming.
    #[serde(default = "yes")]
    pub subtract_mean: bool,
}

fn yes() -> bool {
    true
}

impl Default for SpectralOptions {
    fn default() -> Self {
        Self {
            window: Window::Hann,
            frame: Frame::Condensate,
            subtract_mean: true,
        }
    }
}

impl SpectralOptions {
    pub fn raw() -> Self {
        Self {
            window: Window::None,
            frame: Frame::Lab,
            subtract_mean: false,
        }
    }
}

/// `S(q, ω)` on ascending `q` and `ω` grids, stored row-major by `q`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectralMap {
    pub q: Vec<f64>,
    pub omega: Vec<f64>,
    pub intensity: Vec<f64>,
    pub component: SpectralComponent,
    pub options: SpectralOptions,
    pub sample_interval: f64,
}

impl SpectralMap {
    pub fn dq(&self) -> f64 {
        self.q[1] - self.q[0]
    }

    pub fn domega(&self) -> f64 {
        self.omega[1] - self.omega[0]
    }

    pub fn at(&self, qi: usize, wi: usize) -> f64 {
        self.intensity[qi * self.omega.len() + wi]
    }

    pub fn cut(&self, qi: usize) -> &[f64] {
        let nw = self.omega.len();
        &self.intensity[qi * nw..(qi + 1) * nw]
    }

    /// Index of the `q` bin nearest `q`, and the signed offset `q_bin − q`.
    pub fn nearest_q(&self, q: f64) -> (usize, f64) {
        let i = ((q - self.q[0]) / self.dq()).round().clamp(0.0, (self.q.len() - 1) as f64) as usize;
        (i, self.q[i] - q)
    }

    pub fn total(&self) -> f64 {
        self.intensity.iter().sum()
    }

    /// Writes `q, omega, S` rows for `|q| ≤ q_max`.
    pub fn write_csv<W: Write>(&self, out: W, q_max: Option<f64>) -> Result<(), AnalysisError> {
        let mut w = BufWriter::new(out);
        writeln!(w, "q,omega,S")?;
        for (qi, q) in self.q.iter().enumerate() {
            if q_max.is_some_and(|m| q.abs() > m) {
                continue;
            }
            for (wi, om) in self.omega.iter().enumerate() {
                writeln!(w, "{},{},{}", q, om, self.at(qi, wi))?;
            }
        }
        w.flush()?;
        Ok(())
    }
}

/// Frequencies `2π m/(N Δ)` for `m ∈ [−N/2, N/2)`, ascending, and the
/// matching FFT bin of each.
fn centered_axis(n: usize, spacing: f64) -> (Vec<f64>, Vec<usize>) {
    let step = 2.0 * PI / (n as f64 * spacing);
    let half = (n / 2) as i64;
    let mut axis = Vec::with_capacity(n);
    let mut bins = Vec::with_capacity(n);
    for m in -half..(n as i64 - half) {
        axis.push(step * m as f64);
        bins.push(m.rem_euclid(n as i64) as usize);
    }
    (axis, bins)
}

fn hann(n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![1.0];
    }
    // symmetric form, invariant under reversal of the sample order
    (0..n)
        .map(|m| 0.5 * (1.0 - (2.0 * PI * m as f64 / (n - 1) as f64).cos()))
        .collect()
}

fn condensate_rotation(psi: &[Complex64]) -> Complex64 {
    let mean: Complex64 = psi.iter().sum();
    if mean.norm() == 0.0 {
        Complex64::new(1.0, 0.0)
    } else {
        (mean / mean.norm()).conj()
    }
}

pub fn spectral_function(
    trajectory: &Trajectory,
    component: SpectralComponent,
    options: SpectralOptions,
) -> Result<SpectralMap, AnalysisError> {
    let nt = trajectory.len();
    if nt < MIN_SAMPLES {
        return Err(AnalysisError::Domain(format!(
            "spectral function needs at least {MIN_SAMPLES} samples, got {nt}"
        )));
    }
    let times = trajectory.times();
    let dt = (times[nt - 1] - times[0]) / (nt - 1) as f64;
    let uniform = dt > 0.0
        && times
            .windows(2)
            .all(|w| ((w[1] - w[0]) - dt).abs() <= 1e-9 * dt);
    if !uniform {
        return Err(AnalysisError::Domain("non-uniform time sampling".into()));
    }
    let grid = trajectory.samples[0].state.grid;
    let nz = grid.n_points;

    let frame = |psi: &[Complex64]| -> Vec<Complex64> {
        match options.frame {
            Frame::Lab => psi.to_vec(),
            Frame::Condensate => {
                let r = condensate_rotation(psi);
                psi.iter().map(|c| c * r).collect()
            }
        }
    };
    // rows: one per time sample
    let mut field: Vec<Vec<Complex64>> = trajectory
        .samples
        .iter()
        .map(|s| {
            let [a, b] = &s.state.psi;
            match component {
                SpectralComponent::First => frame(a),
                SpectralComponent::Second => frame(b),
                SpectralComponent::Charge | SpectralComponent::Spin => {
                    let sign = if component == SpectralComponent::Charge { 1.0 } else { -1.0 };
                    let (fa, fb) = (frame(a), frame(b));
                    fa.iter()
                        .zip(&fb)
                        .map(|(x, y)| (x + y * sign) * std::f64::consts::FRAC_1_SQRT_2)
                        .collect()
                }
            }
        })
        .collect();

    if options.subtract_mean {
        let mean: Complex64 =
            field.iter().flatten().sum::<Complex64>() / (nz * nt) as f64;
        for c in field.iter_mut().flatten() {
            *c -= mean;
        }
    }
    if options.window == Window::Hann {
        for (row, w) in field.iter_mut().zip(hann(nt)) {
            for c in row.iter_mut() {
                *c *= w;
            }
        }
    }

    let mut planner = FftPlanner::new();
    let fz = planner.plan_fft_forward(nz);
    for row in field.iter_mut() {
        fz.process(row);
    }
    // time transform with e^{+iωt}, column by column
    let ft = planner.plan_fft_inverse(nt);
    let (q_axis, q_bins) = centered_axis(nz, grid.dz());
    let (w_axis, w_bins) = centered_axis(nt, dt);
    let norm = 1.0 / (nz * nt) as f64;
    let mut intensity = vec![0.0; nz * nt];
    let mut column = vec![Complex64::new(0.0, 0.0); nt];
    for (qi, &qb) in q_bins.iter().enumerate() {
        for (m, row) in field.iter().enumerate() {
            column[m] = row[qb];
        }
        ft.process(&mut column);
        // the transform is referenced to t₀; |·|² is unaffected
        for (wi, &wb) in w_bins.iter().enumerate() {
            intensity[qi * nt + wi] = column[wb].norm_sqr() * norm;
        }
    }
    Ok(SpectralMap {
        q: q_axis,
        omega: w_axis,
        intensity,
        component,
        options,
        sample_interval: dt,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis::testing::{synthetic, zero};
    use crate::dynamics::Grid;

    fn times(n: usize, dt: f64) -> Vec<f64> {
        (0..n).map(|m| m as f64 * dt).collect()
    }

    fn argmax(map: &SpectralMap) -> (usize, usize) {
        let nw = map.omega.len();
        let i = map
            .intensity
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.total_cmp(b.1))
            .unwrap()
            .0;
        (i / nw, i % nw)
    }

    #[test]
    fn plane_wave_lands_in_one_bin() {
        let grid = Grid::new(32, 16.0).unwrap();
        let (nt, dt) = (64, 0.5);
        let k0 = 3.0 * 2.0 * PI / 16.0;
        let w0 = 5.0 * 2.0 * PI / (nt as f64 * dt);
        let traj = synthetic(
            grid,
            &times(nt, dt),
            |z, t| Complex64::from_polar(1.0, k0 * z - w0 * t),
            zero,
        );
        let map = spectral_function(&traj, SpectralComponent::First, SpectralOptions::raw()).unwrap();
        let (qi, wi) = argmax(&map);
        assert!((map.q[qi] - k0).abs() < 1e-12);
        assert!((map.omega[wi] - w0).abs() < 1e-12);
        let peak = map.at(qi, wi);
        for (i, s) in map.intensity.iter().enumerate() {
            if i != qi * map.omega.len() + wi {
                assert!(*s < 1e-10 * peak);
            }
        }
        // |F|² = (N_z N_t)², so S = N_z N_t at the bin
        assert!((peak - (32 * nt) as f64).abs() < 1e-8 * peak);
    }

    #[test]
    fn static_condensate_sits_at_mu() {
        let grid = Grid::new(16, 8.0).unwrap();
        let (nt, dt) = (64, 0.25);
        let mu = 7.0 * 2.0 * PI / (nt as f64 * dt);
        let traj = synthetic(
            grid,
            &times(nt, dt),
            |_, t| Complex64::from_polar(2.0, -mu * t),
            zero,
        );
        let map = spectral_function(&traj, SpectralComponent::First, SpectralOptions::raw()).unwrap();
        let (qi, wi) = argmax(&map);
        assert_eq!(map.q[qi], 0.0);
        assert!((map.omega[wi] - mu).abs() < 1e-12);
        let peak = map.at(qi, wi);
        assert!(map
            .intensity
            .iter()
            .enumerate()
            .all(|(i, s)| i == qi * map.omega.len() + wi || *s < 1e-10 * peak));

        // in the condensate frame the line moves to zero and is then removed
        let opts = SpectralOptions::default();
        let map = spectral_function(&traj, SpectralComponent::First, opts).unwrap();
        assert!(map.total() < 1e-20);
    }

    #[test]
    fn parseval_without_window() {
        let grid = Grid::new(32, 10.0).unwrap();
        let (nt, dt) = (80, 0.3);
        let f = |z: f64, t: f64| {
            Complex64::new(1.0 + 0.3 * (0.7 * z - 1.1 * t).sin(), 0.2 * (1.9 * z + 0.4 * t).cos())
                + Complex64::from_polar(0.1, 0.05 * z * z - t)
        };
        let traj = synthetic(grid, &times(nt, dt), f, zero);
        let opts = SpectralOptions {
            window: Window::None,
            frame: Frame::Lab,
            subtract_mean: true,
        };
        let map = spectral_function(&traj, SpectralComponent::First, opts).unwrap();
        let vals: Vec<Complex64> = traj.samples.iter().flat_map(|s| s.state.psi[0].clone()).collect();
        let mean = vals.iter().sum::<Complex64>() / vals.len() as f64;
        let direct: f64 = vals.iter().map(|v| (v - mean).norm_sqr()).sum();
        assert!((map.total() - direct).abs() < 1e-10 * direct);
    }

    #[test]
    fn charge_and_spin_channels() {
        let grid = Grid::new(16, 8.0).unwrap();
        let k = 2.0 * PI / 8.0;
        let f = move |z: f64, t: f64| Complex64::from_polar(1.0, k * z - 0.5 * t);
        let traj = synthetic(grid, &times(64, 0.2), f, f);
        let spin = spectral_function(&traj, SpectralComponent::Spin, SpectralOptions::raw()).unwrap();
        assert!(spin.total() < 1e-20);
        let charge = spectral_function(&traj, SpectralComponent::Charge, SpectralOptions::raw()).unwrap();
        let first = spectral_function(&traj, SpectralComponent::First, SpectralOptions::raw()).unwrap();
        assert!((charge.total() - 2.0 * first.total()).abs() < 1e-10 * charge.total());
    }

    #[test]
    fn rejects_short_or_irregular_sampling() {
        let grid = Grid::new(16, 8.0).unwrap();
        let one = |_: f64, _: f64| Complex64::new(1.0, 0.0);
        let short = synthetic(grid, &times(MIN_SAMPLES - 1, 0.1), one, zero);
        assert!(matches!(
            spectral_function(&short, SpectralComponent::First, SpectralOptions::default()),
            Err(AnalysisError::Domain(_))
        ));
        let mut t = times(MIN_SAMPLES, 0.1);
        t[10] += 0.03;
        let irregular = synthetic(grid, &t, one, zero);
        assert!(matches!(
            spectral_function(&irregular, SpectralComponent::First, SpectralOptions::default()),
            Err(AnalysisError::Domain(_))
        ));
    }

    #[test]
    fn axes_are_centered_and_ascending() {
        let (axis, bins) = centered_axis(8, 0.5);
        assert_eq!(bins, vec![4, 5, 6, 7, 0, 1, 2, 3]);
        assert_eq!(axis[4], 0.0);
        assert!(axis.windows(2).all(|w| w[1] > w[0]));
        let h = hann(9);
        for m in 0..9 {
            assert!((h[m] - h[8 - m]).abs() < 1e-15);
        }
        assert_eq!(h[0], 0.0);
        assert!((h[4] - 1.0).abs() < 1e-15);
    }
}
