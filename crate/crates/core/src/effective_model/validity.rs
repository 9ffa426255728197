use serde::{Deserialize, Serialize};

use super::config::QuantumOpticsConfig;
use super::optics::mixing_angle;
use super::ModelError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Pass,
    Warn,
    Fail,
}

impl Status {
    pub fn as_str(self) -> &'static str {
        match self {
            Status::Pass => "pass",
            Status::Warn => "warn",
            Status::Fail => "fail",
        }
    }
}

/// Grading bands for a "much less than" inequality, applied to `lhs/rhs`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Thresholds {
    pub pass: f64,
    pub warn: f64,
}

impl Thresholds {
    pub const DENSITY: Thresholds = Thresholds {
        pass: 0.01,
        warn: 0.1,
    };
    /// Applied to `1 − sin θ`.
    pub const SLOW_LIGHT: Thresholds = Thresholds {
        pass: 1e-3,
        warn: 1e-2,
    };

    pub fn grade(&self, ratio: f64) -> Status {
        if ratio <= self.pass {
            Status::Pass
        } else if ratio <= self.warn {
            Status::Warn
        } else {
            // NaN lands here too
            Status::Fail
        }
    }
}

impl Default for Thresholds {
    fn default() -> Self {
        Self::DENSITY
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValidityEntry {
    pub name: String,
    pub lhs: f64,
    pub rhs: f64,
    pub ratio: f64,
    pub status: Status,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
pub struct ValidityReport {
    pub entries: Vec<ValidityEntry>,
}

impl ValidityReport {
    pub fn push(&mut self, name: &str, lhs: f64, rhs: f64, thresholds: Thresholds) {
        let ratio = lhs / rhs;
        self.entries.push(ValidityEntry {
            name: name.to_string(),
            lhs,
            rhs,
            ratio,
            status: thresholds.grade(ratio),
        });
    }

    /// Worst status over all entries; an empty report passes.
    pub fn overall(&self) -> Status {
        self.entries
            .iter()
            .map(|e| e.status)
            .max()
            .unwrap_or(Status::Pass)
    }

    pub fn entry(&self, name: &str) -> Option<&ValidityEntry> {
        self.entries.iter().find(|e| e.name == name)
    }

    /// Largest `lhs/rhs` among the entries, for sweep summaries.
    pub fn worst_ratio(&self) -> Option<f64> {
        self.entries
            .iter()
            .map(|e| e.ratio)
            .fold(None, |acc, r| Some(acc.map_or(r, |a: f64| a.max(r))))
    }
}

/// `|Γ − 2iΔ₂| = |2Δ₂ + iΓ| = √(Γ² + 4Δ₂²)`.
fn eit_width(gamma: f64, delta2: f64) -> f64 {
    (gamma * gamma + 4.0 * delta2 * delta2).sqrt()
}

/// Grades the adiabatic-elimination conditions for photon densities
/// `densities = [n₁, n₂]`.
///
/// The last spin-wave bound appears in two forms: as usually quoted, mixing
/// `Γ` with species `a`'s detuning, and the species-consistent one using
/// `Γ_1Dᵇ` and `Δ₂ᵇ`. Both are reported and the overall status takes the
/// worse of them.
pub fn validity_check(
    densities: [f64; 2],
    cfg: &QuantumOpticsConfig,
    thresholds: Thresholds,
) -> Result<ValidityReport, ModelError> {
    for (i, n) in densities.iter().enumerate() {
        if !(*n >= 0.0) {
            return Err(ModelError::NonPositive {
                name: format!("density[{i}]"),
                value: *n,
            });
        }
    }
    let rates = cfg.rates()?;
    let gamma = cfg.gamma_total;
    let fill = [
        densities[0] / cfg.atom_density[0],
        densities[1] / cfg.atom_density[1],
    ];
    let width = [
        eit_width(gamma, cfg.delta2[0]),
        eit_width(gamma, cfg.delta2[1]),
    ];

    let mut report = ValidityReport::default();
    report.push(
        "transparency_a",
        fill[0],
        cfg.delta4[0].abs() / width[0],
        thresholds,
    );
    report.push(
        "transparency_b",
        fill[1],
        cfg.delta4[1].abs() / width[1],
        thresholds,
    );
    report.push(
        "spin_wave_a",
        fill[0],
        rates.gamma_1d[0] / width[0],
        thresholds,
    );
    report.push(
        "spin_wave_b_as_quoted",
        fill[1],
        gamma / width[0],
        thresholds,
    );
    report.push(
        "spin_wave_b",
        fill[1],
        rates.gamma_1d[1] / width[1],
        thresholds,
    );

    let theta_a = mixing_angle(cfg.coupling[0][0], cfg.atom_density[0], cfg.rabi[0])?;
    let theta_b = mixing_angle(cfg.coupling[1][1], cfg.atom_density[1], cfg.rabi[1])?;
    report.push("slow_light_a", 1.0 - theta_a.sin(), 1.0, Thresholds::SLOW_LIGHT);
    report.push("slow_light_b", 1.0 - theta_b.sin(), 1.0, Thresholds::SLOW_LIGHT);
    Ok(report)
}
