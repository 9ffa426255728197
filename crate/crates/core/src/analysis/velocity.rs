use serde::{Deserialize, Serialize};

use super::peaks::{peak_positions, PeakOptions};
use super::spectrum::SpectralMap;
use super::AnalysisError;

pub const MIN_Q_BINS: usize = 3;

/// Charge and spin velocities from the slopes of the two sound ridges.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectralVelocities {
    pub charge: f64,
    pub spin: f64,
    /// RMS residual of `ω − v q` over RMS `ω`, per branch.
    pub charge_residual: f64,
    pub spin_residual: f64,
    /// `(q, ω_charge, ω_spin)` for every q bin used.
    pub points: Vec<(f64, f64, f64)>,
}

fn slope_through_origin(points: &[(f64, f64)]) -> (f64, f64) {
    let sqq: f64 = points.iter().map(|p| p.0 * p.0).sum();
    let sqw: f64 = points.iter().map(|p| p.0 * p.1).sum();
    let v = sqw / sqq;
    let n = points.len() as f64;
    let rms = (points.iter().map(|p| (p.1 - v * p.0).powi(2)).sum::<f64>() / n).sqrt();
    let scale = (points.iter().map(|p| p.1 * p.1).sum::<f64>() / n).sqrt();
    (v, if scale > 0.0 { rms / scale } else { 0.0 })
}

/// Fits `ω = u q` to the two dominant positive-frequency ridges over the
/// positive `q` bins in `[q_min, q_max]`. The faster ridge is charge.
pub fn velocities_from_spectrum(
    map: &SpectralMap,
    q_min: f64,
    q_max: f64,
    options: PeakOptions,
) -> Result<SpectralVelocities, AnalysisError> {
    let options = PeakOptions {
        omega_range: Some(options.omega_range.unwrap_or((0.0, f64::INFINITY))),
        ..options
    };
    let mut points = Vec::new();
    let mut merged = 0usize;
    for &q in map.q.iter().filter(|&&q| q > 0.0 && q >= q_min && q <= q_max) {
        let cut = match peak_positions(map, q, options) {
            Ok(cut) => cut,
            Err(AnalysisError::NoSignal(_)) => continue,
            Err(e) => return Err(e),
        };
        let mut peaks = cut.peaks.clone();
        peaks.sort_by(|a, b| b.height.total_cmp(&a.height));
        match peaks.as_slice() {
            [a, b, ..] => {
                let (hi, lo) = if a.omega > b.omega { (a, b) } else { (b, a) };
                points.push((cut.q, hi.omega, lo.omega));
            }
            [_] => merged += 1,
            [] => {}
        }
    }
    if points.len() < MIN_Q_BINS {
        if merged > 0 {
            return Err(AnalysisError::Ambiguous(format!(
                "branches merge at {merged} q bins; only {} resolved",
                points.len()
            )));
        }
        return Err(AnalysisError::InsufficientData(format!(
            "{} usable q bins in [{q_min}, {q_max}], need {MIN_Q_BINS}",
            points.len()
        )));
    }
    let (charge, charge_residual) =
        slope_through_origin(&points.iter().map(|p| (p.0, p.1)).collect::<Vec<_>>());
    let (spin, spin_residual) =
        slope_through_origin(&points.iter().map(|p| (p.0, p.2)).collect::<Vec<_>>());
    Ok(SpectralVelocities {
        charge,
        spin,
        charge_residual,
        spin_residual,
        points,
    })
}
