use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::config::require_positive;
use super::ModelError;

/// Low-energy parameters of one polariton component.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LuttingerComponent {
    /// Sound velocity `√(ρ₀ U / m)`.
    pub sound_velocity: f64,
    /// Luttinger parameter `π √(ρ₀ / (m U))`.
    pub luttinger_k: f64,
    /// Interaction-to-kinetic ratio `m U / ρ₀`.
    pub gamma: f64,
}

pub fn luttinger_params(rho0: f64, intra: f64, mass: f64) -> Result<LuttingerComponent, ModelError> {
    require_positive("rho0", rho0)?;
    require_positive("intra", intra)?;
    require_positive("mass", mass)?;
    Ok(LuttingerComponent {
        sound_velocity: (rho0 * intra / mass).sqrt(),
        luttinger_k: (PI * PI * rho0 / (mass * intra)).sqrt(),
        gamma: mass * intra / rho0,
    })
}

/// Charge and spin velocities `u √(1 ± V₁₂ K / (π u))` of matched components.
pub fn spin_charge_velocities(
    sound_velocity: f64,
    luttinger_k: f64,
    v12: f64,
) -> Result<(f64, f64), ModelError> {
    require_positive("sound_velocity", sound_velocity)?;
    require_positive("luttinger_k", luttinger_k)?;
    if !(v12 >= 0.0 && v12.is_finite()) {
        return Err(ModelError::NonPositive {
            name: "v12".to_string(),
            value: v12,
        });
    }
    let x = v12 * luttinger_k / (PI * sound_velocity);
    if x >= 1.0 {
        return Err(ModelError::Demixing { ratio: x });
    }
    Ok((
        sound_velocity * (1.0 + x).sqrt(),
        sound_velocity * (1.0 - x).sqrt(),
    ))
}

/// Per-component parameters plus the charge/spin velocities when the two
/// components are matched (`u₁ = u₂`, `K₁ = K₂`).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LuttingerParams {
    pub components: [LuttingerComponent; 2],
    pub charge_velocity: Option<f64>,
    pub spin_velocity: Option<f64>,
}

const MATCH_TOL: f64 = 1e-9;

impl LuttingerParams {
    pub fn from_components(
        components: [LuttingerComponent; 2],
        v12: f64,
    ) -> Result<Self, ModelError> {
        let [a, b] = components;
        let matched = rel_close(a.sound_velocity, b.sound_velocity)
            && rel_close(a.luttinger_k, b.luttinger_k);
        let (charge_velocity, spin_velocity) = if matched {
            let (uc, us) = spin_charge_velocities(a.sound_velocity, a.luttinger_k, v12)?;
            (Some(uc), Some(us))
        } else {
            (None, None)
        };
        Ok(Self {
            components,
            charge_velocity,
            spin_velocity,
        })
    }

    pub fn velocity_ratio(&self) -> Option<f64> {
        Some(self.charge_velocity? / self.spin_velocity?)
    }
}

fn rel_close(a: f64, b: f64) -> bool {
    (a - b).abs() <= MATCH_TOL * a.abs().max(b.abs())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    #[test]
    fn unit_example() {
        let p = luttinger_params(1.0, 1.0, 1.0).unwrap();
        assert_eq!(p.sound_velocity, 1.0);
        assert_relative_eq!(p.luttinger_k, PI, epsilon = 1e-15);
        assert_eq!(p.gamma, 1.0);
    }

    #[test]
    fn pi_squared_example() {
        let p = luttinger_params(1.0, PI * PI, 1.0).unwrap();
        assert_relative_eq!(p.sound_velocity, PI, epsilon = 1e-15);
        assert_relative_eq!(p.luttinger_k, 1.0, epsilon = 1e-15);
        assert_relative_eq!(p.gamma, PI * PI, epsilon = 1e-15);
    }

    #[test]
    fn gamma_forty_gives_k() {
        // γ = 40 with ρ₀ = m = 1
        let p = luttinger_params(1.0, 40.0, 1.0).unwrap();
        assert_relative_eq!(p.luttinger_k, PI / 40f64.sqrt(), max_relative = 1e-14);
        assert_relative_eq!(p.luttinger_k, 0.496729413289805, max_relative = 1e-12);
    }

    #[test]
    fn domain_errors() {
        assert!(luttinger_params(0.0, 1.0, 1.0).is_err());
        assert!(luttinger_params(1.0, -1.0, 1.0).is_err());
        assert!(luttinger_params(1.0, 1.0, f64::NAN).is_err());
    }

    #[test]
    fn spin_charge_examples() {
        assert_eq!(spin_charge_velocities(1.3, 0.7, 0.0).unwrap(), (1.3, 1.3));
        let (uc, us) = spin_charge_velocities(1.0, 1.0, 0.6 * PI).unwrap();
        assert_relative_eq!(uc, 1.6f64.sqrt(), max_relative = 1e-14);
        assert_relative_eq!(us, 0.4f64.sqrt(), max_relative = 1e-14);
        assert_relative_eq!(uc, 1.26491, epsilon = 1e-5);
        assert_relative_eq!(us, 0.63246, epsilon = 1e-5);
        assert_relative_eq!(uc / us, 2.0, max_relative = 1e-14);
        assert!(matches!(
            spin_charge_velocities(1.0, 1.0, PI),
            Err(ModelError::Demixing { .. })
        ));
    }

    #[test]
    fn inverted_reading_is_unstable() {
        // U/V₁₂ = 0.6 with u = K = 1 puts V₁₂ K/(π u) at 1/0.6
        assert!(matches!(
            spin_charge_velocities(1.0, 1.0, PI / 0.6),
            Err(ModelError::Demixing { .. })
        ));
    }

    #[test]
    fn unmatched_components_have_no_separation() {
        let a = luttinger_params(1.0, 1.0, 1.0).unwrap();
        let b = luttinger_params(2.0, 1.0, 1.0).unwrap();
        let lp = LuttingerParams::from_components([a, b], 0.3).unwrap();
        assert!(lp.charge_velocity.is_none());
        assert!(lp.velocity_ratio().is_none());
    }

    proptest! {
        #[test]
        fn identities(
            lr in -3.0f64..3.0,
            lu in -3.0f64..3.0,
            lm in -3.0f64..3.0,
        ) {
            let (rho0, u, m) = (10f64.powf(lr), 10f64.powf(lu), 10f64.powf(lm));
            let p = luttinger_params(rho0, u, m).unwrap();
            let uk = p.sound_velocity * p.luttinger_k;
            prop_assert!((uk - PI * rho0 / m).abs() <= 1e-12 * uk);
            let g = (PI / p.luttinger_k).powi(2);
            prop_assert!((g - p.gamma).abs() <= 1e-12 * g);
        }

        #[test]
        fn squares_sum_to_twice_u_squared(
            u in 0.01f64..100.0,
            k in 0.01f64..100.0,
            frac in 0.0f64..0.999,
        ) {
            let v12 = frac * PI * u / k;
            let (uc, us) = spin_charge_velocities(u, k, v12).unwrap();
            prop_assert!(uc >= u && u >= us && us > 0.0);
            let lhs = uc * uc + us * us;
            prop_assert!((lhs - 2.0 * u * u).abs() <= 1e-12 * 2.0 * u * u);
        }
    }
}
