//! Loss-limited bound on the achievable interaction strength and its
//! optimization over the two-photon detuning.
//!
//! The bound is the smaller of two branches in `x = |Δ₂|/Γ`:
//! `γ₀ exp(β x)`, set by nonlinear losses, which grows with detuning, and
//! `η β OD / (N_ph x)`, set by linear absorption over the evolution time,
//! which falls with it. Both `γ₀` and `β` are phenomenological inputs.

use serde::{Deserialize, Serialize};

use super::config::require_positive;
use super::ModelError;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LossBudget {
    pub gamma0: f64,
    pub beta: f64,
    pub gamma_total: f64,
    pub cooperativity: f64,
    pub od: f64,
    pub photon_number: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DetuningOptimum {
    /// Optimal `|Δ₂|` (same units as `gamma_total`).
    pub delta2_abs: f64,
    pub gamma_max: f64,
    /// `|branch₁ − branch₂| / γ*`; zero only at an interior crossing.
    pub branch_residual: f64,
    pub interior: bool,
}

impl LossBudget {
    fn validate(&self) -> Result<(), ModelError> {
        require_positive("gamma0", self.gamma0)?;
        require_positive("beta", self.beta)?;
        require_positive("gamma_total", self.gamma_total)?;
        require_positive("cooperativity", self.cooperativity)?;
        require_positive("od", self.od)?;
        require_positive("photon_number", self.photon_number)?;
        Ok(())
    }

    /// `(nonlinear-loss branch, linear-loss branch)` at `|Δ₂|`.
    pub fn branches(&self, delta2_abs: f64) -> Result<(f64, f64), ModelError> {
        self.validate()?;
        require_positive("delta2_abs", delta2_abs)?;
        let x = delta2_abs / self.gamma_total;
        Ok((
            self.gamma0 * (self.beta * x).exp(),
            self.cooperativity * self.beta * self.od / (self.photon_number * x),
        ))
    }

    pub fn gamma_max(&self, delta2_abs: f64) -> Result<f64, ModelError> {
        let (a, b) = self.branches(delta2_abs)?;
        Ok(a.min(b))
    }

    /// Maximizes the bound over `|Δ₂| ∈ [lo, hi]`.
    ///
    /// The log-difference of the branches, `ln γ₀ + β x + ln x − ln(η β OD/N)`,
    /// is strictly increasing, so the optimum is its root when bracketed and
    /// an endpoint otherwise. The root is found by Newton steps safeguarded
    /// to stay inside a shrinking bracket.
    pub fn optimize_delta2(&self, lo: f64, hi: f64) -> Result<DetuningOptimum, ModelError> {
        self.validate()?;
        if !(lo > 0.0 && hi.is_finite() && lo <= hi) {
            return Err(ModelError::InvalidInterval { lo, hi });
        }
        let g = self.gamma_total;
        let log_target = (self.cooperativity * self.beta * self.od / self.photon_number).ln();
        let f = |x: f64| self.gamma0.ln() + self.beta * x + x.ln() - log_target;
        let df = |x: f64| self.beta + 1.0 / x;

        let (mut a, mut b) = (lo / g, hi / g);
        let (fa, fb) = (f(a), f(b));
        let x_star = if fa >= 0.0 {
            a
        } else if fb <= 0.0 {
            b
        } else {
            let mut x = 0.5 * (a + b);
            for _ in 0..200 {
                let fx = f(x);
                if fx == 0.0 {
                    break;
                }
                if fx < 0.0 {
                    a = x;
                } else {
                    b = x;
                }
                let newton = x - fx / df(x);
                let next = if newton > a && newton < b {
                    newton
                } else {
                    0.5 * (a + b)
                };
                if (next - x).abs() <= 1e-15 * x.abs() {
                    x = next;
                    break;
                }
                x = next;
            }
            x
        };

        let delta2_abs = x_star * g;
        let (b1, b2) = self.branches(delta2_abs)?;
        let gamma_max = b1.min(b2);
        Ok(DetuningOptimum {
            delta2_abs,
            gamma_max,
            branch_residual: (b1 - b2).abs() / gamma_max,
            interior: fa < 0.0 && fb > 0.0,
        })
    }
}
