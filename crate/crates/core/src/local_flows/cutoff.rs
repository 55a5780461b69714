use super::{FlowError, Result};
use crate::smooth::{smooth_step, smooth_step_prime};

/// The cutoff `χ = 1` on `[0, 1]`, `0` on `[2, ∞)`, smooth and monotone in
/// between: `χ(r) = s(2 − r)` for the standard smooth step `s`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct CutoffFunction;

impl CutoffFunction {
    pub fn value(&self, r: f64) -> f64 {
        smooth_step(2.0 - r)
    }

    pub fn derivative(&self, r: f64) -> f64 {
        -smooth_step_prime(2.0 - r)
    }

    /// `(χ(r), χ'(r))`.
    pub fn eval(&self, r: f64) -> Result<(f64, f64)> {
        if r < 0.0 || r.is_nan() {
            return Err(FlowError::NegativeRadius(r));
        }
        Ok((self.value(r), self.derivative(r)))
    }
}

/// `(χ(r), χ'(r))` for the canonical cutoff.
pub fn chi(r: f64) -> Result<(f64, f64)> {
    CutoffFunction.eval(r)
}
