use serde::{Deserialize, Serialize};

use super::ModelError;

/// Experimentally tunable waveguide, atom and field parameters.
///
/// Arrays indexed by species hold `[a, b]`; arrays indexed by field hold
/// `[1, 2]`. Field 1 pairs with species `a` and field 2 with species `b`.
/// Frequencies are in units of the total excited-state decay rate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QuantumOpticsConfig {
    /// Detuning of level 2 per species. Negative for repulsive interactions.
    pub delta2: [f64; 2],
    /// Detuning of level 4 per species. Positive for repulsive interactions.
    pub delta4: [f64; 2],
    /// Classical control Rabi frequency per field.
    pub rabi: [f64; 2],
    /// `coupling[i][x]`: coupling of quantum field `i` to species `x`.
    pub coupling: [[f64; 2]; 2],
    /// Linear density of atoms coupled to the waveguide, per species.
    pub atom_density: [f64; 2],
    #[serde(default = "default_unit")]
    pub gamma_total: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gamma_1d: Option<[f64; 2]>,
    /// Bare velocity of each quantum field in the empty waveguide.
    pub bare_velocity: [f64; 2],
    pub photon_number: [f64; 2],
    /// Initial pulse length per field.
    pub pulse_width: [f64; 2],
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub od: Option<[f64; 2]>,
    /// Single-atom cooperativity `Γ_1D / Γ`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cooperativity: Option<[f64; 2]>,
    /// Prefactor of the loss-limited interaction bound.
    #[serde(default = "default_unit")]
    pub gamma0: f64,
    /// Exponent scale of the loss-limited interaction bound.
    #[serde(default = "default_unit")]
    pub beta: f64,
}

fn default_unit() -> f64 {
    1.0
}

/// Rates that may be supplied directly or derived from each other.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DerivedRates {
    pub gamma_1d: [f64; 2],
    pub cooperativity: [f64; 2],
    pub od: [f64; 2],
}

const CONSISTENCY_TOL: f64 = 1e-12;

pub(crate) fn require_positive(name: &str, value: f64) -> Result<f64, ModelError> {
    if value > 0.0 && value.is_finite() {
        Ok(value)
    } else {
        Err(ModelError::NonPositive {
            name: name.to_string(),
            value,
        })
    }
}

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= CONSISTENCY_TOL * a.abs().max(b.abs()).max(f64::MIN_POSITIVE)
}

impl QuantumOpticsConfig {
    /// A fully symmetric configuration: both species and both fields share
    /// every parameter. Cooperativity and OD are derived.
    #[allow(clippy::too_many_arguments)]
    pub fn symmetric(
        delta2: f64,
        delta4: f64,
        rabi: f64,
        coupling: f64,
        atom_density: f64,
        gamma_1d: f64,
        bare_velocity: f64,
        photon_number: f64,
        pulse_width: f64,
    ) -> Self {
        Self {
            delta2: [delta2; 2],
            delta4: [delta4; 2],
            rabi: [rabi; 2],
            coupling: [[coupling; 2]; 2],
            atom_density: [atom_density; 2],
            gamma_total: 1.0,
            gamma_1d: Some([gamma_1d; 2]),
            bare_velocity: [bare_velocity; 2],
            photon_number: [photon_number; 2],
            pulse_width: [pulse_width; 2],
            od: None,
            cooperativity: None,
            gamma0: 1.0,
            beta: 1.0,
        }
    }

    /// Checks positivity and the rate relations, filling in whichever of
    /// `Γ_1D`, `η` and `OD` were left out.
    pub fn rates(&self) -> Result<DerivedRates, ModelError> {
        let gamma = require_positive("gamma_total", self.gamma_total)?;
        for i in 0..2 {
            require_positive(&format!("rabi[{i}]"), self.rabi[i])?;
            require_positive(&format!("atom_density[{i}]"), self.atom_density[i])?;
            require_positive(&format!("bare_velocity[{i}]"), self.bare_velocity[i])?;
            require_positive(&format!("photon_number[{i}]"), self.photon_number[i])?;
            require_positive(&format!("pulse_width[{i}]"), self.pulse_width[i])?;
            for x in 0..2 {
                require_positive(&format!("coupling[{i}][{x}]"), self.coupling[i][x])?;
            }
        }
        require_positive("gamma0", self.gamma0)?;
        require_positive("beta", self.beta)?;

        let (gamma_1d, cooperativity) = match (self.gamma_1d, self.cooperativity) {
            (Some(g1d), Some(eta)) => {
                for x in 0..2 {
                    require_positive(&format!("gamma_1d[{x}]"), g1d[x])?;
                    require_positive(&format!("cooperativity[{x}]"), eta[x])?;
                    if !close(eta[x], g1d[x] / gamma) {
                        return Err(ModelError::Inconsistent {
                            name: format!("cooperativity[{x}]"),
                            supplied: eta[x],
                            derived: g1d[x] / gamma,
                        });
                    }
                }
                (g1d, eta)
            }
            (Some(g1d), None) => {
                for (x, v) in g1d.iter().enumerate() {
                    require_positive(&format!("gamma_1d[{x}]"), *v)?;
                }
                (g1d, [g1d[0] / gamma, g1d[1] / gamma])
            }
            (None, Some(eta)) => {
                for (x, v) in eta.iter().enumerate() {
                    require_positive(&format!("cooperativity[{x}]"), *v)?;
                }
                ([eta[0] * gamma, eta[1] * gamma], eta)
            }
            (None, None) => return Err(ModelError::Missing("gamma_1d or cooperativity")),
        };

        let derived_od = [
            cooperativity[0] * self.atom_density[0] * self.pulse_width[0],
            cooperativity[1] * self.atom_density[1] * self.pulse_width[1],
        ];
        let od = match self.od {
            Some(od) => {
                for x in 0..2 {
                    require_positive(&format!("od[{x}]"), od[x])?;
                    if !close(od[x], derived_od[x]) {
                        return Err(ModelError::Inconsistent {
                            name: format!("od[{x}]"),
                            supplied: od[x],
                            derived: derived_od[x],
                        });
                    }
                }
                od
            }
            None => derived_od,
        };

        Ok(DerivedRates {
            gamma_1d,
            cooperativity,
            od,
        })
    }

    /// Sign rule: both Δ₂ share a sign and both Δ₄ carry the
    /// opposite one.
    pub fn check_sign_discipline(&self) -> Result<(), ModelError> {
        let s2a = self.delta2[0].signum();
        let consistent = self.delta2[0] != 0.0
            && self.delta2[1].signum() == s2a
            && self.delta4[0].signum() == -s2a
            && self.delta4[1].signum() == -s2a;
        if consistent {
            Ok(())
        } else {
            Err(ModelError::SignViolation {
                name: "delta2/delta4".to_string(),
                value: self.delta2[0],
                detail: "sign(Δ₂ᵃ) = sign(Δ₂ᵇ) = −sign(Δ₄ᵃ) = −sign(Δ₄ᵇ) is required",
            })
        }
    }

    /// Linear photon density per field, `N_ph / z0`.
    pub fn photon_density(&self) -> [f64; 2] {
        [
            self.photon_number[0] / self.pulse_width[0],
            self.photon_number[1] / self.pulse_width[1],
        ]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn base() -> QuantumOpticsConfig {
        QuantumOpticsConfig::symmetric(-3.0, 10.0, 1.0, 1.0, 100.0, 0.2, 1.0, 10.0, 200.0)
    }

    #[test]
    fn derives_cooperativity_and_od() {
        let rates = base().rates().unwrap();
        assert_eq!(rates.cooperativity, [0.2, 0.2]);
        assert!((rates.od[0] - 0.2 * 100.0 * 200.0).abs() < 1e-9);
    }

    #[test]
    fn derives_gamma_1d_from_cooperativity() {
        let mut cfg = base();
        cfg.gamma_total = 2.0;
        cfg.gamma_1d = None;
        cfg.cooperativity = Some([0.25, 0.5]);
        let rates = cfg.rates().unwrap();
        assert_eq!(rates.gamma_1d, [0.5, 1.0]);
    }

    #[test]
    fn rejects_inconsistent_od() {
        let mut cfg = base();
        cfg.od = Some([4000.0, 4001.0]);
        assert!(matches!(
            cfg.rates(),
            Err(ModelError::Inconsistent { ref name, .. }) if name == "od[1]"
        ));
    }

    #[test]
    fn rejects_inconsistent_cooperativity() {
        let mut cfg = base();
        cfg.cooperativity = Some([0.2, 0.3]);
        assert!(matches!(cfg.rates(), Err(ModelError::Inconsistent { .. })));
    }

    #[test]
    fn rejects_non_positive() {
        let mut cfg = base();
        cfg.photon_number[1] = 0.0;
        assert!(matches!(
            cfg.rates(),
            Err(ModelError::NonPositive { ref name, .. }) if name == "photon_number[1]"
        ));
    }

    #[test]
    fn sign_discipline() {
        assert!(base().check_sign_discipline().is_ok());
        let mut flipped = base();
        flipped.delta2 = [3.0, 3.0];
        flipped.delta4 = [-10.0, -10.0];
        assert!(flipped.check_sign_discipline().is_ok());
        let mut bad = base();
        bad.delta4[1] = -10.0;
        assert!(bad.check_sign_discipline().is_err());
    }
}
