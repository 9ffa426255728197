//! Mapping from quantum-optics knobs to the effective two-component
//! Lieb-Liniger model, its Luttinger parameters and validity bounds.
//!
//! Units: `ħ = 1` and frequencies in units of the excited-state decay rate.
//! Every function here is pure.

mod config;
mod loss;
mod luttinger;
mod optics;
mod validity;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use config::{DerivedRates, QuantumOpticsConfig};
pub use loss::{DetuningOptimum, LossBudget};
pub use luttinger::{luttinger_params, spin_charge_velocities, LuttingerComponent, LuttingerParams};
pub use optics::{
    effective_mass, group_velocities, group_velocity, inter_repulsion, intra_repulsion,
    mixing_angle, InterRepulsion, SignPolicy,
};
pub use validity::{validity_check, Status, Thresholds, ValidityEntry, ValidityReport};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ModelError {
    #[error("{name} must be strictly positive, got {value}")]
    NonPositive { name: String, value: f64 },
    #[error("{name} is zero, which makes the effective coupling singular")]
    Singular { name: String },
    #[error("sign violation in {name} = {value}: {detail} (interactions must stay repulsive)")]
    SignViolation {
        name: String,
        value: f64,
        detail: &'static str,
    },
    #[error("demixing instability: V12 K / (pi u) = {ratio} >= 1, spin velocity is not real")]
    Demixing { ratio: f64 },
    #[error("inconsistent {name}: supplied {supplied}, derived {derived}")]
    Inconsistent {
        name: String,
        supplied: f64,
        derived: f64,
    },
    #[error("missing parameter: {0}")]
    Missing(&'static str),
    #[error("invalid search interval [{lo}, {hi}]")]
    InvalidInterval { lo: f64, hi: f64 },
    #[error("{context}: {source}")]
    In {
        context: String,
        #[source]
        source: Box<ModelError>,
    },
}

trait WithContext<T> {
    fn context(self, ctx: impl Into<String>) -> Result<T, ModelError>;
}

impl<T> WithContext<T> for Result<T, ModelError> {
    fn context(self, ctx: impl Into<String>) -> Result<T, ModelError> {
        self.map_err(|e| ModelError::In {
            context: ctx.into(),
            source: Box::new(e),
        })
    }
}

/// Slow-light quantities, available only when the model was derived from a
/// quantum-optics configuration.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OpticalQuantities {
    pub group_velocity: [f64; 2],
    /// Mixing angle per species, radians.
    pub mixing_angle: [f64; 2],
}

/// Lieb-Liniger parameters of the trapped polariton pair.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EffectiveModel {
    pub mass: [f64; 2],
    pub intra: [f64; 2],
    pub inter: InterRepulsion,
    /// Background linear density per component.
    pub rho0: [f64; 2],
    pub optics: Option<OpticalQuantities>,
}

impl EffectiveModel {
    /// A model given directly in simulation units.
    pub fn direct(
        mass: [f64; 2],
        intra: [f64; 2],
        v1: f64,
        v2: f64,
        rho0: [f64; 2],
        policy: SignPolicy,
    ) -> Result<Self, ModelError> {
        for i in 0..2 {
            config::require_positive(&format!("rho0[{i}]"), rho0[i])?;
            for (name, v) in [("mass", mass[i]), ("intra", intra[i])] {
                if !v.is_finite() || v == 0.0 {
                    return Err(ModelError::NonPositive {
                        name: format!("{name}[{i}]"),
                        value: v,
                    });
                }
                if policy == SignPolicy::RepulsiveOnly && v < 0.0 {
                    return Err(ModelError::SignViolation {
                        name: format!("{name}[{i}]"),
                        value: v,
                        detail: "masses and intra-species couplings must be positive",
                    });
                }
            }
        }
        if !(v1.is_finite() && v2.is_finite()) {
            return Err(ModelError::NonPositive {
                name: "v1/v2".to_string(),
                value: v1 + v2,
            });
        }
        Ok(Self {
            mass,
            intra,
            inter: InterRepulsion::new(v1, v2),
            rho0,
            optics: None,
        })
    }

    pub fn luttinger(&self) -> Result<LuttingerParams, ModelError> {
        let comps = [
            luttinger_params(self.rho0[0], self.intra[0], self.mass[0]).context("component 1")?,
            luttinger_params(self.rho0[1], self.intra[1], self.mass[1]).context("component 2")?,
        ];
        LuttingerParams::from_components(comps, self.inter.v12)
    }

    /// Healing length `1/√(2 m ρ₀ U)` of each component.
    pub fn healing_length(&self) -> [f64; 2] {
        [0, 1].map(|i| 1.0 / (2.0 * self.mass[i] * self.rho0[i] * self.intra[i]).sqrt())
    }
}

/// Everything derived from one configuration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DerivedModel {
    pub model: EffectiveModel,
    pub luttinger: LuttingerParams,
    pub validity: ValidityReport,
    /// Loss-limited interaction bound per species at the configured `|Δ₂|`.
    pub gamma_max: Option<[f64; 2]>,
}

impl DerivedModel {
    pub fn from_direct(model: EffectiveModel) -> Result<Self, ModelError> {
        Ok(Self {
            luttinger: model.luttinger()?,
            model,
            validity: ValidityReport::default(),
            gamma_max: None,
        })
    }
}

pub fn loss_budget(cfg: &QuantumOpticsConfig, species: usize) -> Result<LossBudget, ModelError> {
    let rates = cfg.rates()?;
    Ok(LossBudget {
        gamma0: cfg.gamma0,
        beta: cfg.beta,
        gamma_total: cfg.gamma_total,
        cooperativity: rates.cooperativity[species],
        od: rates.od[species],
        photon_number: cfg.photon_number[species],
    })
}

/// Full derivation: masses, couplings, Luttinger parameters, validity
/// report and the loss-limited interaction bound.
pub fn build_effective_model(
    cfg: &QuantumOpticsConfig,
    policy: SignPolicy,
) -> Result<DerivedModel, ModelError> {
    let rates = cfg.rates()?;
    if policy == SignPolicy::RepulsiveOnly {
        cfg.check_sign_discipline()?;
    }
    let nu_g = group_velocities(cfg)?;
    let theta = [
        mixing_angle(cfg.coupling[0][0], cfg.atom_density[0], cfg.rabi[0]).context("species a")?,
        mixing_angle(cfg.coupling[1][1], cfg.atom_density[1], cfg.rabi[1]).context("species b")?,
    ];
    let mut mass = [0.0; 2];
    let mut intra = [0.0; 2];
    for i in 0..2 {
        mass[i] = effective_mass(
            cfg.delta2[i],
            nu_g[i],
            rates.gamma_1d[i],
            cfg.atom_density[i],
            policy,
        )
        .context(format!("delta2[{i}]"))?;
        intra[i] = intra_repulsion(rates.gamma_1d[i], nu_g[i], cfg.delta4[i], policy)
            .context(format!("delta4[{i}]"))?;
    }
    let inter = inter_repulsion(cfg)?;
    let rho0 = cfg.photon_density();
    let model = EffectiveModel {
        mass,
        intra,
        inter,
        rho0,
        optics: Some(OpticalQuantities {
            group_velocity: nu_g,
            mixing_angle: theta,
        }),
    };
    let luttinger = if policy == SignPolicy::RepulsiveOnly {
        model.luttinger()?
    } else {
        // negative couplings have no Luttinger description; report what exists
        model.luttinger().unwrap_or(LuttingerParams {
            components: [LuttingerComponent {
                sound_velocity: f64::NAN,
                luttinger_k: f64::NAN,
                gamma: f64::NAN,
            }; 2],
            charge_velocity: None,
            spin_velocity: None,
        })
    };
    let validity = validity_check(rho0, cfg, Thresholds::DENSITY)?;
    let gamma_max = [
        loss_budget(cfg, 0)?.gamma_max(cfg.delta2[0].abs())?,
        loss_budget(cfg, 1)?.gamma_max(cfg.delta2[1].abs())?,
    ];
    Ok(DerivedModel {
        model,
        luttinger,
        validity,
        gamma_max: Some(gamma_max),
    })
}

/// A value with its unit tag, as written to flat key-value documents.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Tagged {
    pub value: serde_json::Value,
    pub unit: String,
}

fn tag(map: &mut BTreeMap<String, Tagged>, key: String, value: f64, unit: &str) {
    map.insert(
        key,
        Tagged {
            value: serde_json::json!(value),
            unit: unit.to_string(),
        },
    );
}

/// Flattens a derived model to `key -> {value, unit}`.
pub fn tagged_document(derived: &DerivedModel) -> BTreeMap<String, Tagged> {
    let mut m = BTreeMap::new();
    let model = &derived.model;
    for i in 0..2 {
        let n = i + 1;
        tag(&mut m, format!("mass_{n}"), model.mass[i], "mass (hbar=1)");
        tag(&mut m, format!("intra_{n}"), model.intra[i], "energy*length");
        tag(&mut m, format!("rho0_{n}"), model.rho0[i], "1/length");
        let c = &derived.luttinger.components[i];
        tag(&mut m, format!("sound_velocity_{n}"), c.sound_velocity, "length/time");
        tag(&mut m, format!("luttinger_k_{n}"), c.luttinger_k, "dimensionless");
        tag(&mut m, format!("gamma_{n}"), c.gamma, "dimensionless");
        if let Some(opt) = &model.optics {
            tag(&mut m, format!("group_velocity_{n}"), opt.group_velocity[i], "length/time");
            tag(&mut m, format!("mixing_angle_{n}"), opt.mixing_angle[i], "rad");
        }
        if let Some(g) = derived.gamma_max {
            tag(&mut m, format!("gamma_max_{n}"), g[i], "dimensionless (depends on gamma0, beta)");
        }
    }
    tag(&mut m, "v1".into(), model.inter.v1, "energy*length");
    tag(&mut m, "v2".into(), model.inter.v2, "energy*length");
    tag(&mut m, "v12".into(), model.inter.v12, "energy*length");
    if let Some(uc) = derived.luttinger.charge_velocity {
        tag(&mut m, "charge_velocity".into(), uc, "length/time");
    }
    if let Some(us) = derived.luttinger.spin_velocity {
        tag(&mut m, "spin_velocity".into(), us, "length/time");
    }
    for e in &derived.validity.entries {
        tag(&mut m, format!("validity.{}.lhs", e.name), e.lhs, "dimensionless");
        tag(&mut m, format!("validity.{}.rhs", e.name), e.rhs, "dimensionless");
        tag(&mut m, format!("validity.{}.ratio", e.name), e.ratio, "dimensionless");
        m.insert(
            format!("validity.{}.status", e.name),
            Tagged {
                value: e.status.as_str().into(),
                unit: "status".into(),
            },
        );
    }
    m.insert(
        "validity.overall".into(),
        Tagged {
            value: derived.validity.overall().as_str().into(),
            unit: "status".into(),
        },
    );
    m
}
