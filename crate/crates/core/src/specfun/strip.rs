use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{GreenError, Result};

/// `σ ∈ (0, 1/2)`, labelling the strip `σ ≤ Re s ≤ 1 − σ`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct StripParameter(f64);

impl StripParameter {
    pub fn new(sigma: f64) -> Result<Self> {
        if !(sigma > 0.0 && sigma < 0.5) {
            return Err(GreenError::domain("StripParameter", format!("need 0 < σ < 1/2, got {sigma}")));
        }
        Ok(StripParameter(sigma))
    }

    pub fn sigma(&self) -> f64 {
        self.0
    }

    pub fn contains(&self, s: crate::ComplexValue) -> bool {
        self.0 <= s.re && s.re <= 1.0 - self.0
    }
}

impl TryFrom<f64> for StripParameter {
    type Error = GreenError;
    fn try_from(v: f64) -> Result<Self> {
        StripParameter::new(v)
    }
}

impl From<StripParameter> for f64 {
    fn from(s: StripParameter) -> f64 {
        s.0
    }
}

/// `(C_σ, C′_σ)`.
pub fn c_sigma(sigma: &StripParameter) -> (f64, f64) {
    let s = sigma.0;
    let head = (PI * s).tan().max(1.0) * (1.0 / s - 1.0).powf(0.25);
    let c = head * (0.5 + 1.0 / (24.0 * s * (0.5 + s))).exp();
    let c_prime = head * (0.5 + 1.0 / (24.0 * (1.0 - s) * (1.5 - s))).exp();
    (c, c_prime)
}

/// `p_σ(u) = (C_σ x^{2−σ} + C′_σ x^{1+σ}) / (4√π) · ((1 − x⁻²)^{3/2} + 3x⁻²)`
/// with `x = u + √(u²−1)`; `u = 1` is allowed.
pub fn p_sigma(sigma: &StripParameter, u: f64) -> Result<f64> {
    if !(u >= 1.0) {
        return Err(GreenError::domain("p_sigma", format!("need u ≥ 1, got {u}")));
    }
    let s = sigma.0;
    let (c, c_prime) = c_sigma(sigma);
    let x = u + ((u - 1.0) * (u + 1.0)).sqrt();
    let inv2 = 1.0 / (x * x);
    let tail = (1.0 - inv2).powf(1.5) + 3.0 * inv2;
    Ok((c * x.powf(2.0 - s) + c_prime * x.powf(1.0 + s)) / (4.0 * PI.sqrt()) * tail)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn c_sigma_examples() {
        let (c, cp) = c_sigma(&StripParameter::new(0.306).unwrap());
        assert!((c - 3.43).abs() < 1e-2 && (cp - 3.05).abs() < 1e-2);
        assert!((c - 3.43155).abs() < 1e-5 && (cp - 3.04761).abs() < 1e-5);

        let (c, _) = c_sigma(&StripParameter::new(0.25).unwrap());
        let expected = 3f64.powf(0.25) * (0.5f64 + 1.0 / (24.0 * 0.25 * 0.75)).exp();
        assert!((c - expected).abs() < 1e-12);

        for k in 1..50 {
            let s = StripParameter::new(k as f64 / 100.0).unwrap();
            let (c, cp) = c_sigma(&s);
            assert!(c > cp);
        }
    }

    #[test]
    fn strip_validation() {
        assert!(StripParameter::new(0.0).is_err());
        assert!(StripParameter::new(0.5).is_err());
        assert!(StripParameter::new(f64::NAN).is_err());
        let s = StripParameter::new(0.3).unwrap();
        assert!(s.contains(crate::ComplexValue::new(0.5, 40.0)));
        assert!(!s.contains(crate::ComplexValue::new(0.2, 0.0)));
    }

    #[test]
    fn p_sigma_examples() {
        let s = StripParameter::new(0.306).unwrap();
        let (c, cp) = c_sigma(&s);
        assert!((p_sigma(&s, 1.0).unwrap() - 3.0 * (c + cp) / (4.0 * PI.sqrt())).abs() < 1e-14);
        assert!((p_sigma(&s, 1.0 + 1e-12).unwrap() - p_sigma(&s, 1.0).unwrap()).abs() < 1e-4);

        let x = 2.0 + 3f64.sqrt();
        let expected = (c * x.powf(1.694) + cp * x.powf(1.306)) / (4.0 * PI.sqrt())
            * ((1.0 - 1.0 / (x * x)).powf(1.5) + 3.0 / (x * x));
        assert!((p_sigma(&s, 2.0).unwrap() - expected).abs() < 1e-12 * expected);

        // the x^{1+σ} term still contributes about 2.6% at u = 10³
        let ratio = p_sigma(&s, 1e4).unwrap() / p_sigma(&s, 1e3).unwrap();
        assert!((ratio / 10f64.powf(2.0 - 0.306) - 1.0).abs() < 0.03);
        let ratio = p_sigma(&s, 1e8).unwrap() / p_sigma(&s, 1e7).unwrap();
        assert!((ratio / 10f64.powf(2.0 - 0.306) - 1.0).abs() < 0.02);
        assert!(p_sigma(&s, 0.99).is_err());
    }
}
