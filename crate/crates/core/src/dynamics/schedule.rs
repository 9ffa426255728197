use serde::{Deserialize, Serialize};

use super::DynamicsError;

/// Contact couplings at one instant.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Couplings {
    pub intra: [f64; 2],
    pub v12: f64,
}

impl Couplings {
    pub fn new(u1: f64, u2: f64, v12: f64) -> Self {
        Self {
            intra: [u1, u2],
            v12,
        }
    }

    pub fn scaled(&self, s: f64) -> Self {
        Self {
            intra: [self.intra[0] * s, self.intra[1] * s],
            v12: self.v12 * s,
        }
    }

    pub fn swapped(&self) -> Self {
        Self {
            intra: [self.intra[1], self.intra[0]],
            v12: self.v12,
        }
    }

    fn lerp(&self, other: &Self, f: f64) -> Self {
        let l = |a: f64, b: f64| a + (b - a) * f;
        Self {
            intra: [l(self.intra[0], other.intra[0]), l(self.intra[1], other.intra[1])],
            v12: l(self.v12, other.v12),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Stage {
    Inject,
    Trap,
    Ramp,
    Hold,
    Release,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StageMarker {
    pub stage: Stage,
    pub start: f64,
    pub end: f64,
}

/// Piecewise-linear coupling program with constant masses.
///
/// Injection and release are instantaneous; the trap stage runs at the weak
/// couplings, the ramp interpolates linearly to the strong ones, and the
/// hold keeps them until release.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RampSchedule {
    pub mass: [f64; 2],
    knots: Vec<(f64, Couplings)>,
    pub stages: Vec<StageMarker>,
}

impl RampSchedule {
    /// Time-independent couplings; everything after injection is a hold.
    pub fn constant(mass: [f64; 2], couplings: Couplings) -> Self {
        Self {
            mass,
            knots: vec![(0.0, couplings)],
            stages: vec![
                StageMarker {
                    stage: Stage::Inject,
                    start: 0.0,
                    end: 0.0,
                },
                StageMarker {
                    stage: Stage::Hold,
                    start: 0.0,
                    end: f64::INFINITY,
                },
            ],
        }
    }

    pub fn staged(
        mass: [f64; 2],
        weak: Couplings,
        strong: Couplings,
        trap: f64,
        ramp: f64,
        hold: f64,
    ) -> Result<Self, DynamicsError> {
        for (name, d) in [("trap", trap), ("ramp", ramp), ("hold", hold)] {
            if !(d >= 0.0 && d.is_finite()) {
                return Err(DynamicsError::Schedule(format!(
                    "{name} duration must be non-negative, got {d}"
                )));
            }
        }
        let non_decreasing = weak.intra[0] <= strong.intra[0]
            && weak.intra[1] <= strong.intra[1]
            && weak.v12 <= strong.v12;
        if !non_decreasing {
            return Err(DynamicsError::Schedule(
                "couplings must not decrease during the ramp".into(),
            ));
        }
        let t_ramp = trap;
        let t_hold = trap + ramp;
        let t_release = t_hold + hold;
        let mut knots = vec![(0.0, weak)];
        if t_ramp > 0.0 {
            knots.push((t_ramp, weak));
        }
        // a zero-length ramp is an instantaneous switch
        knots.push((t_hold, strong));
        let stages = vec![
            StageMarker {
                stage: Stage::Inject,
                start: 0.0,
                end: 0.0,
            },
            StageMarker {
                stage: Stage::Trap,
                start: 0.0,
                end: t_ramp,
            },
            StageMarker {
                stage: Stage::Ramp,
                start: t_ramp,
                end: t_hold,
            },
            StageMarker {
                stage: Stage::Hold,
                start: t_hold,
                end: t_release,
            },
            StageMarker {
                stage: Stage::Release,
                start: t_release,
                end: t_release,
            },
        ];
        Ok(Self {
            mass,
            knots,
            stages,
        })
    }

    pub fn couplings_at(&self, t: f64) -> Couplings {
        let first = self.knots[0];
        if t <= first.0 {
            return first.1;
        }
        for w in self.knots.windows(2) {
            let (t0, c0) = w[0];
            let (t1, c1) = w[1];
            if t <= t1 {
                if t1 == t0 {
                    return c1;
                }
                return c0.lerp(&c1, (t - t0) / (t1 - t0));
            }
        }
        self.knots[self.knots.len() - 1].1
    }

    pub fn stage_at(&self, t: f64) -> Stage {
        self.stages
            .iter()
            .filter(|m| m.end > m.start)
            .find(|m| t >= m.start && t < m.end)
            .map(|m| m.stage)
            .unwrap_or(Stage::Release)
    }

    pub fn stage(&self, stage: Stage) -> Option<&StageMarker> {
        self.stages.iter().find(|m| m.stage == stage)
    }

    /// Time at which the staged program releases; infinite for a constant
    /// schedule.
    pub fn release_time(&self) -> f64 {
        self.stage(Stage::Release).map_or(f64::INFINITY, |m| m.start)
    }

    pub fn is_static(&self) -> bool {
        self.knots.windows(2).all(|w| w[0].1 == w[1].1)
    }

    /// Swaps the roles of the two components.
    pub fn swapped(&self) -> Self {
        Self {
            mass: [self.mass[1], self.mass[0]],
            knots: self.knots.iter().map(|(t, c)| (*t, c.swapped())).collect(),
            stages: self.stages.clone(),
        }
    }

    /// Largest coupling reached anywhere in the program.
    pub fn max_couplings(&self) -> Couplings {
        self.knots.iter().fold(self.knots[0].1, |acc, (_, c)| Couplings {
            intra: [acc.intra[0].max(c.intra[0]), acc.intra[1].max(c.intra[1])],
            v12: acc.v12.max(c.v12),
        })
    }
}
