//! Propagation velocity of a density disturbance from the motion of its
//! rightward-moving extremum.

use serde::{Deserialize, Serialize};

use super::density::{Branch, DensityWaves};
use super::AnalysisError;

/// Minimum deviation, relative to the total background density, for an
/// extremum to count as signal.
pub const NOISE_FLOOR: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TimeWindow {
    pub start: f64,
    pub end: f64,
}

impl TimeWindow {
    pub const ALL: TimeWindow = TimeWindow {
        start: f64::NEG_INFINITY,
        end: f64::INFINITY,
    };

    pub fn new(start: f64, end: f64) -> Self {
        Self { start, end }
    }

    pub fn contains(&self, t: f64) -> bool {
        t >= self.start && t <= self.end
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FitMethod {
    FrontTracking,
    SpectralSlope,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VelocityFit {
    pub branch: Branch,
    pub velocity: f64,
    /// RMS of the fit residual over the span of the fitted positions.
    pub residual: f64,
    pub window: TimeWindow,
    pub method: FitMethod,
    /// Tracked `(t, offset from origin)` points.
    pub track: Vec<(f64, f64)>,
}

fn median(values: &[f64]) -> f64 {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

/// Vertex offset of the parabola through three equally spaced points.
pub(crate) fn parabolic_offset(left: f64, mid: f64, right: f64) -> f64 {
    let denom = left - 2.0 * mid + right;
    if denom == 0.0 {
        0.0
    } else {
        (0.5 * (left - right) / denom).clamp(-0.5, 0.5)
    }
}

/// Least-squares line `y = a + b t`; returns `(b, normalized residual)`.
pub(crate) fn linear_fit(points: &[(f64, f64)]) -> (f64, f64) {
    let n = points.len() as f64;
    let mt = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let stt: f64 = points.iter().map(|p| (p.0 - mt).powi(2)).sum();
    let sty: f64 = points.iter().map(|p| (p.0 - mt) * (p.1 - my)).sum();
    let slope = if stt == 0.0 { 0.0 } else { sty / stt };
    let intercept = my - slope * mt;
    let rms = (points
        .iter()
        .map(|p| (p.1 - intercept - slope * p.0).powi(2))
        .sum::<f64>()
        / n)
        .sqrt();
    let (lo, hi) = points
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), p| (lo.min(p.1), hi.max(p.1)));
    let span = hi - lo;
    (slope, if span > 0.0 { rms / span } else { 0.0 })
}

/// Tracks the rightward-moving extremum of a branch's deviation from its
/// background and fits its position against time.
///
/// The origin is the location of the largest deviation in the first sample
/// (the initial disturbance). At every sample in `window` the extremum is
/// searched over offsets `[0, L/2)` to the right of the origin, with the sign
/// of the initial disturbance, and refined to sub-grid accuracy with a
/// three-point parabola.
pub fn track_fronts(
    waves: &DensityWaves,
    branch: Branch,
    window: TimeWindow,
) -> Result<VelocityFit, AnalysisError> {
    if waves.is_empty() {
        return Err(AnalysisError::Domain("no density samples".into()));
    }
    let n = waves.grid.n_points;
    let dz = waves.grid.dz();
    let signal = waves.branch(branch);
    let scale = median(&waves.charge[0]).abs();
    let floor = NOISE_FLOOR * if scale > 0.0 { scale } else { 1.0 };

    let deviation = |s: usize| -> Vec<f64> {
        let bg = median(&signal[s]);
        signal[s].iter().map(|v| v - bg).collect()
    };

    let initial = deviation(0);
    let (origin, sign) = initial
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.abs().total_cmp(&b.1.abs()))
        .map(|(j, v)| (j, v.signum()))
        .expect("non-empty grid");
    if initial[origin].abs() < floor {
        return Err(AnalysisError::NoSignal(format!(
            "{branch:?} deviation {:.3e} below noise floor {floor:.3e}",
            initial[origin].abs()
        )));
    }

    let mut track = Vec::new();
    for (s, &t) in waves.times.iter().enumerate() {
        if !window.contains(t) {
            continue;
        }
        let dev: Vec<f64> = deviation(s).iter().map(|v| v * sign).collect();
        let (best, peak) = (0..n / 2)
            .map(|off| (off, dev[(origin + off) % n]))
            .max_by(|a, b| a.1.total_cmp(&b.1))
            .expect("non-empty half grid");
        if peak < floor {
            return Err(AnalysisError::NoSignal(format!(
                "{branch:?} extremum {peak:.3e} below noise floor at t = {t}"
            )));
        }
        let at = |off: isize| dev[(origin as isize + off).rem_euclid(n as isize) as usize];
        let b = best as isize;
        let delta = parabolic_offset(at(b - 1), at(b), at(b + 1));
        track.push((t, (best as f64 + delta) * dz));
    }
    if track.len() < 2 {
        return Err(AnalysisError::InsufficientData(format!(
            "{} samples in window [{}, {}]",
            track.len(),
            window.start,
            window.end
        )));
    }
    let (velocity, residual) = linear_fit(&track);
    Ok(VelocityFit {
        branch,
        velocity,
        residual,
        window,
        method: FitMethod::FrontTracking,
        track,
    })
}
