use num_rational::Rational64;
use serde::{Deserialize, Serialize};

use super::norms::{NormSpec, Quantity};
use crate::error::{Error, Result};

/// Decay exponents `γ` (velocity) and `μ` (temperature) of the underlying
/// small-data solution.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct DecayAssumptions {
    pub gamma: Rational64,
    pub mu: Rational64,
    /// Enforce `μ = γ + 1`.
    pub tied: bool,
}

impl Default for DecayAssumptions {
    fn default() -> Self {
        Self { gamma: Rational64::new(1, 4), mu: Rational64::new(5, 4), tied: true }
    }
}

impl DecayAssumptions {
    pub fn new(gamma: Rational64, mu: Rational64, tied: bool) -> Result<Self> {
        if tied && mu != gamma + Rational64::from_integer(1) {
            return Err(Error::InvalidArgument(format!("μ = {mu} violates μ = γ + 1 with γ = {gamma}")));
        }
        Ok(Self { gamma, mu, tied })
    }
}

/// Predicted decay exponent and whether the parameters lie outside the range
/// `a < 5/2, b = 0` covered without extension.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Prediction {
    pub exponent: Rational64,
    pub extended_range: bool,
}

impl Prediction {
    pub fn value(&self) -> f64 {
        *self.exponent.numer() as f64 / *self.exponent.denom() as f64
    }
}

/// Exact rational for a float given with at most a few decimals.
pub fn to_rational(x: f64) -> Result<Rational64> {
    Rational64::approximate_float(x)
        .filter(|r| (*r.numer() as f64 / *r.denom() as f64 - x).abs() <= 1e-12 * x.abs().max(1.0))
        .ok_or_else(|| Error::InvalidArgument(format!("{x} has no exact rational representation")))
}

/// Predicted exponent of `t` in `‖|x|^a ∇^b q(t)‖_p`:
///
/// * `u`: `−γ + a/2 − b/2 − (3/4)(1 − 2/p)`, requiring `a < b + 5/2`;
/// * `θ`: `−μ + a/2 − b/2 − (3/4)(1 − 2/p)`;
/// * `ω`: `−γ − 1/2 + a/2 − b/2 − (3/4)(1 − 2/p)`.
pub fn predicted_exponent(spec: &NormSpec, assumptions: &DecayAssumptions) -> Result<Prediction> {
    spec.validate()?;
    let a = to_rational(spec.a)?;
    let b = Rational64::from_integer(spec.b as i64);
    let half = Rational64::new(1, 2);
    let two_over_p = if spec.p.is_infinite() { Rational64::from_integer(0) } else { Rational64::from_integer(2) / to_rational(spec.p)? };
    let integrability = Rational64::new(3, 4) * (Rational64::from_integer(1) - two_over_p);
    let common = a * half - b * half - integrability;
    let five_halves = Rational64::new(5, 2);
    let exponent = match spec.quantity {
        Quantity::U => {
            if a >= b + five_halves {
                return Err(Error::InvalidArgument(format!(
                    "velocity weight violates a < b + 5/2 (a = {a}, b = {b})"
                )));
            }
            -assumptions.gamma + common
        }
        Quantity::Theta => -assumptions.mu + common,
        Quantity::Omega => -assumptions.gamma - half + common,
    };
    let extended_range = !(a < five_halves && spec.b == 0);
    Ok(Prediction { exponent, extended_range })
}
