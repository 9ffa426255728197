use serde::{Deserialize, Serialize};

use super::fronts::parabolic_offset;
use super::spectrum::SpectralMap;
use super::AnalysisError;

pub const DEFAULT_PROMINENCE: f64 = 0.05;

/// A cut whose maximum is below this fraction of the map's maximum is empty.
pub const EMPTY_CUT: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Peak {
    /// Refined frequency.
    pub omega: f64,
    pub bin: usize,
    /// Refined height.
    pub height: f64,
    pub prominence: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PeakCut {
    pub q_bin: usize,
    pub q: f64,
    /// `q_bin − q_requested`.
    pub q_offset: f64,
    pub peaks: Vec<Peak>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PeakOptions {
    /// Minimum prominence as a fraction of the cut's maximum.
    pub prominence: f64,
    /// Only frequencies inside this range are considered.
    pub omega_range: Option<(f64, f64)>,
}

impl Default for PeakOptions {
    fn default() -> Self {
        Self {
            prominence: DEFAULT_PROMINENCE,
            omega_range: None,
        }
    }
}

impl PeakOptions {
    pub fn positive_frequencies() -> Self {
        Self {
            omega_range: Some((0.0, f64::INFINITY)),
            ..Self::default()
        }
    }
}

/// Local maxima of a 1D signal with their topographic prominence.
///
/// A plateau counts once, at its left edge. Prominence is the height above
/// the higher of the two minima separating the peak from taller terrain (or
/// from the ends of the signal).
pub fn find_peaks(values: &[f64], min_prominence: f64) -> Vec<(usize, f64)> {
    let n = values.len();
    let mut out = Vec::new();
    let mut i = 0;
    while i < n {
        let v = values[i];
        let mut j = i;
        while j + 1 < n && values[j + 1] == v {
            j += 1;
        }
        if i > 0 && j + 1 < n && values[i - 1] < v && values[j + 1] < v {
            let mut left_min = v;
            let mut k = i;
            while k > 0 && values[k - 1] <= v {
                k -= 1;
                left_min = left_min.min(values[k]);
            }
            let mut right_min = v;
            let mut k = j;
            while k + 1 < n && values[k + 1] <= v {
                k += 1;
                right_min = right_min.min(values[k]);
            }
            let prominence = v - left_min.max(right_min);
            if prominence >= min_prominence {
                out.push((i, prominence));
            }
        }
        i = j + 1;
    }
    out
}

/// Peaks of `S(q, ·)` at the `q` bin nearest the request, sorted by `ω`.
pub fn peak_positions(
    map: &SpectralMap,
    q: f64,
    options: PeakOptions,
) -> Result<PeakCut, AnalysisError> {
    let (q_bin, q_offset) = map.nearest_q(q);
    let cut = map.cut(q_bin);
    let (lo, hi) = options
        .omega_range
        .unwrap_or((f64::NEG_INFINITY, f64::INFINITY));
    let idx: Vec<usize> = (0..cut.len())
        .filter(|&i| map.omega[i] >= lo && map.omega[i] <= hi)
        .collect();
    if idx.is_empty() {
        return Err(AnalysisError::NoSignal("empty frequency range".into()));
    }
    let first = idx[0];
    let values = &cut[first..=idx[idx.len() - 1]];
    let max = values.iter().cloned().fold(0.0, f64::max);
    let global = map.intensity.iter().cloned().fold(0.0, f64::max);
    if !(max > EMPTY_CUT * global) {
        return Err(AnalysisError::NoSignal(format!(
            "spectral cut at q = {} is empty",
            map.q[q_bin]
        )));
    }
    let dw = map.domega();
    let peaks = find_peaks(values, options.prominence * max)
        .into_iter()
        .map(|(i, prominence)| {
            let bin = first + i;
            let (l, m, r) = (cut[bin - 1], cut[bin], cut[bin + 1]);
            let delta = parabolic_offset(l, m, r);
            Peak {
                omega: map.omega[bin] + delta * dw,
                bin,
                height: m - 0.25 * (l - r) * delta,
                prominence,
            }
        })
        .collect();
    Ok(PeakCut {
        q_bin,
        q: map.q[q_bin],
        q_offset,
        peaks,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn finds_separated_peaks() {
        let v = [0.0, 1.0, 0.0, 0.5, 3.0, 0.5, 0.0];
        let p = find_peaks(&v, 0.1);
        assert_eq!(p, vec![(1, 1.0), (4, 3.0)]);
    }

    #[test]
    fn prominence_filters_ripples() {
        let v = [0.0, 5.0, 4.9, 4.95, 4.0, 0.0];
        let p = find_peaks(&v, 0.25);
        assert_eq!(p.len(), 1);
        assert_eq!(p[0].0, 1);
    }

    #[test]
    fn plateau_counts_once() {
        let v = [0.0, 2.0, 2.0, 2.0, 0.0];
        assert_eq!(find_peaks(&v, 0.1), vec![(1, 2.0)]);
    }

    #[test]
    fn edges_are_not_peaks() {
        assert!(find_peaks(&[3.0, 2.0, 1.0], 0.0).is_empty());
        assert!(find_peaks(&[1.0, 2.0, 3.0], 0.0).is_empty());
    }

    use crate::analysis::testing::{synthetic, zero};
    use crate::analysis::{spectral_function, SpectralComponent, SpectralOptions, Window};
    use crate::dynamics::Grid;
    use num_complex::Complex64;
    use std::f64::consts::PI;

    fn two_tone(wa: f64, wb: f64) -> SpectralMap {
        let grid = Grid::new(16, 8.0).unwrap();
        let k = 2.0 * PI / 8.0;
        let t: Vec<f64> = (0..256).map(|m| m as f64 * 0.1).collect();
        let traj = synthetic(
            grid,
            &t,
            move |z, t| {
                Complex64::from_polar(1.0, k * z - wa * t) + Complex64::from_polar(0.6, k * z - wb * t)
            },
            zero,
        );
        let opts = SpectralOptions {
            window: Window::Hann,
            ..SpectralOptions::raw()
        };
        spectral_function(&traj, SpectralComponent::First, opts).unwrap()
    }

    #[test]
    fn single_plane_wave_gives_one_peak() {
        let grid = Grid::new(16, 8.0).unwrap();
        let t: Vec<f64> = (0..128).map(|m| m as f64 * 0.1).collect();
        let w0 = 2.0 * PI * 9.0 / 12.8;
        let traj = synthetic(grid, &t, |_, t| Complex64::from_polar(1.0, -w0 * t), zero);
        let map = spectral_function(&traj, SpectralComponent::First, SpectralOptions::raw()).unwrap();
        let cut = peak_positions(&map, 0.0, PeakOptions::default()).unwrap();
        assert_eq!(cut.peaks.len(), 1);
        assert!((cut.peaks[0].omega - w0).abs() < 1e-9);
    }

    #[test]
    fn two_sinusoids_give_two_peaks() {
        let (wa, wb) = (1.37, 3.05);
        let map = two_tone(wa, wb);
        let cut = peak_positions(&map, 2.0 * PI / 8.0, PeakOptions::default()).unwrap();
        assert_eq!(cut.q_offset, 0.0);
        assert_eq!(cut.peaks.len(), 2);
        let dw = map.domega();
        assert!((cut.peaks[0].omega - wa).abs() < dw);
        assert!((cut.peaks[1].omega - wb).abs() < dw);
        assert!(cut.peaks[0].height > cut.peaks[1].height);
    }

    #[test]
    fn rescaling_leaves_peaks_unchanged() {
        let map = two_tone(1.37, 3.05);
        let mut scaled = map.clone();
        for s in scaled.intensity.iter_mut() {
            *s *= 37.5;
        }
        let q = 2.0 * PI / 8.0;
        let a = peak_positions(&map, q, PeakOptions::default()).unwrap();
        let b = peak_positions(&scaled, q, PeakOptions::default()).unwrap();
        assert_eq!(a.peaks.len(), b.peaks.len());
        for (x, y) in a.peaks.iter().zip(&b.peaks) {
            assert_eq!(x.bin, y.bin);
            assert!((x.omega - y.omega).abs() < 1e-12);
        }
    }

    #[test]
    fn empty_cut_is_no_signal() {
        let map = two_tone(1.37, 3.05);
        // nothing was put at q = 0
        assert!(matches!(
            peak_positions(&map, 0.0, PeakOptions::default()),
            Err(AnalysisError::NoSignal(_))
        ));
        let range = PeakOptions {
            omega_range: Some((1e6, 2e6)),
            ..PeakOptions::default()
        };
        assert!(matches!(
            peak_positions(&map, 0.7, range),
            Err(AnalysisError::NoSignal(_))
        ));
    }
}
