//! Closed-form maps from the EIT parameters to the polariton couplings.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::config::{require_positive, QuantumOpticsConfig};
use super::ModelError;

/// Whether non-repulsive couplings (`m ≤ 0` or `U ≤ 0`) are rejected.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SignPolicy {
    #[default]
    RepulsiveOnly,
    Unchecked,
}

/// Polariton mixing angle, `tan θ = g √(2π n_z) / Ω`.
pub fn mixing_angle(coupling: f64, atom_density: f64, rabi: f64) -> Result<f64, ModelError> {
    require_positive("coupling", coupling)?;
    require_positive("atom_density", atom_density)?;
    require_positive("rabi", rabi)?;
    Ok((coupling * (2.0 * PI * atom_density).sqrt()).atan2(rabi))
}

/// Slow-light group velocity `ν Ω² / (π g² n_z)`. `Ω = 0` is admitted and
/// gives stopped light.
pub fn group_velocity(
    bare_velocity: f64,
    rabi: f64,
    coupling: f64,
    atom_density: f64,
) -> Result<f64, ModelError> {
    require_positive("bare_velocity", bare_velocity)?;
    require_positive("coupling", coupling)?;
    require_positive("atom_density", atom_density)?;
    if !(rabi >= 0.0 && rabi.is_finite()) {
        return Err(ModelError::NonPositive {
            name: "rabi".to_string(),
            value: rabi,
        });
    }
    Ok(bare_velocity * rabi * rabi / (PI * coupling * coupling * atom_density))
}

/// Effective polariton mass from `1/m = −4 Δ₂ ν_g / (Γ_1D n_z)`.
pub fn effective_mass(
    delta2: f64,
    group_velocity: f64,
    gamma_1d: f64,
    atom_density: f64,
    policy: SignPolicy,
) -> Result<f64, ModelError> {
    if delta2 == 0.0 {
        return Err(ModelError::Singular {
            name: "delta2".to_string(),
        });
    }
    require_positive("group_velocity", group_velocity)?;
    require_positive("gamma_1d", gamma_1d)?;
    require_positive("atom_density", atom_density)?;
    let mass = -gamma_1d * atom_density / (4.0 * delta2 * group_velocity);
    if policy == SignPolicy::RepulsiveOnly && mass <= 0.0 {
        return Err(ModelError::SignViolation {
            name: "delta2".to_string(),
            value: delta2,
            detail: "Δ₂ must be negative for a positive effective mass",
        });
    }
    Ok(mass)
}

/// Intra-species contact repulsion `U = Γ_1D ν_g / (2 Δ₄)`.
pub fn intra_repulsion(
    gamma_1d: f64,
    group_velocity: f64,
    delta4: f64,
    policy: SignPolicy,
) -> Result<f64, ModelError> {
    if delta4 == 0.0 {
        return Err(ModelError::Singular {
            name: "delta4".to_string(),
        });
    }
    require_positive("gamma_1d", gamma_1d)?;
    require_positive("group_velocity", group_velocity)?;
    let u = gamma_1d * group_velocity / (2.0 * delta4);
    if policy == SignPolicy::RepulsiveOnly && u <= 0.0 {
        return Err(ModelError::SignViolation {
            name: "delta4".to_string(),
            value: delta4,
            detail: "Δ₄ must be positive for a repulsive intra-species coupling",
        });
    }
    Ok(u)
}

/// Inter-species couplings; `v12` is always `v1 + v2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InterRepulsion {
    pub v1: f64,
    pub v2: f64,
    pub v12: f64,
}

impl InterRepulsion {
    pub fn new(v1: f64, v2: f64) -> Self {
        Self { v1, v2, v12: v1 + v2 }
    }
}

/// Group velocity of both fields, using `g₁ᵃ, n_zᵃ` for field 1 and
/// `g₂ᵇ, n_zᵇ` for field 2.
pub fn group_velocities(cfg: &QuantumOpticsConfig) -> Result<[f64; 2], ModelError> {
    Ok([
        group_velocity(
            cfg.bare_velocity[0],
            cfg.rabi[0],
            cfg.coupling[0][0],
            cfg.atom_density[0],
        )?,
        group_velocity(
            cfg.bare_velocity[1],
            cfg.rabi[1],
            cfg.coupling[1][1],
            cfg.atom_density[1],
        )?,
    ])
}

pub fn inter_repulsion(cfg: &QuantumOpticsConfig) -> Result<InterRepulsion, ModelError> {
    for (x, d4) in cfg.delta4.iter().enumerate() {
        if *d4 == 0.0 {
            return Err(ModelError::Singular {
                name: format!("delta4[{x}]"),
            });
        }
    }
    let nu_g = group_velocities(cfg)?;
    let g = &cfg.coupling;
    let (g1a, g1b) = (g[0][0], g[0][1]);
    let (g2a, g2b) = (g[1][0], g[1][1]);
    let v1 = PI * g1a * g1a * g2a * g2a * nu_g[0]
        / (g2b * g2b * cfg.delta4[0] * cfg.bare_velocity[0]);
    let v2 = PI * g2b * g2b * g1b * g1b * nu_g[1]
        / (g1a * g1a * cfg.delta4[1] * cfg.bare_velocity[1]);
    Ok(InterRepulsion::new(v1, v2))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use std::f64::consts::FRAC_PI_4;

    #[test]
    fn mixing_angle_examples() {
        // g √(2π n_z) = Ω
        let n_z = 1.0 / (2.0 * PI);
        assert_relative_eq!(mixing_angle(1.0, n_z, 1.0).unwrap(), FRAC_PI_4, epsilon = 1e-15);
        let small = mixing_angle(1.0, 1.0, 1e6).unwrap();
        assert_relative_eq!(small, 2.5066282746257504e-6, max_relative = 1e-12);
        let third = mixing_angle(1.0, n_z, 1.0 / 3f64.sqrt()).unwrap();
        assert_relative_eq!(third, PI / 3.0, epsilon = 1e-14);
        assert!(mixing_angle(0.0, 1.0, 1.0).is_err());
        assert!(mixing_angle(1.0, 1.0, -1.0).is_err());
    }

    #[test]
    fn group_velocity_examples() {
        let s = PI.sqrt();
        assert_relative_eq!(group_velocity(1.0, s, 1.0, 1.0).unwrap(), 1.0, epsilon = 1e-15);
        assert_eq!(group_velocity(1.0, 0.0, 1.0, 1.0).unwrap(), 0.0);
        assert_relative_eq!(group_velocity(1.0, s, 1.0, 2.0).unwrap(), 0.5, epsilon = 1e-15);
        assert!(group_velocity(1.0, 1.0, 1.0, 0.0).is_err());
        assert!(group_velocity(-1.0, 1.0, 1.0, 1.0).is_err());
    }

    #[test]
    fn group_velocity_monotonicity() {
        let base = group_velocity(1.0, 2.0, 1.5, 3.0).unwrap();
        assert!(group_velocity(1.0, 2.1, 1.5, 3.0).unwrap() > base);
        assert!(group_velocity(1.0, 2.0, 1.6, 3.0).unwrap() < base);
        assert!(group_velocity(1.0, 2.0, 1.5, 3.1).unwrap() < base);
    }

    #[test]
    fn effective_mass_examples() {
        let p = SignPolicy::RepulsiveOnly;
        assert_relative_eq!(effective_mass(-1.0, 1.0, 4.0, 1.0, p).unwrap(), 1.0);
        assert_relative_eq!(effective_mass(-0.25, 1.0, 1.0, 1.0, p).unwrap(), 1.0);
        assert!(matches!(
            effective_mass(1.0, 1.0, 4.0, 1.0, p),
            Err(ModelError::SignViolation { .. })
        ));
        assert!(matches!(
            effective_mass(0.0, 1.0, 4.0, 1.0, p),
            Err(ModelError::Singular { .. })
        ));
        let neg = effective_mass(1.0, 1.0, 4.0, 1.0, SignPolicy::Unchecked).unwrap();
        assert_relative_eq!(neg, -1.0);
    }

    #[test]
    fn intra_repulsion_examples() {
        let p = SignPolicy::RepulsiveOnly;
        assert_relative_eq!(intra_repulsion(2.0, 1.0, 1.0, p).unwrap(), 1.0);
        assert_relative_eq!(intra_repulsion(1.0, 1.0, 1e6, p).unwrap(), 5e-7);
        assert!(matches!(
            intra_repulsion(2.0, 1.0, -1.0, p),
            Err(ModelError::SignViolation { .. })
        ));
        assert!(matches!(
            intra_repulsion(2.0, 1.0, 0.0, p),
            Err(ModelError::Singular { .. })
        ));
        assert_relative_eq!(
            intra_repulsion(2.0, 1.0, -1.0, SignPolicy::Unchecked).unwrap(),
            -1.0
        );
    }

    #[test]
    fn inter_repulsion_unit_case() {
        // all g = 1, ν_g = ν = 1 (Ω = √π, n_z = 1), Δ₄ᵃ = π
        let mut cfg =
            QuantumOpticsConfig::symmetric(-1.0, PI, PI.sqrt(), 1.0, 1.0, 1.0, 1.0, 1.0, 1.0);
        let inter = inter_repulsion(&cfg).unwrap();
        assert_relative_eq!(inter.v1, 1.0, epsilon = 1e-14);
        assert_eq!(inter.v1, inter.v2);
        assert_eq!(inter.v12, inter.v1 + inter.v2);

        cfg.delta4[1] = 0.0;
        assert!(matches!(inter_repulsion(&cfg), Err(ModelError::Singular { .. })));
    }

    #[test]
    fn inter_repulsion_sum() {
        let v = InterRepulsion::new(0.3, 0.3);
        assert_eq!(v.v12, 0.6);
    }
}
