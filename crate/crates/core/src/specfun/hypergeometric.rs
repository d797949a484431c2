use crate::error::{GreenError, Result};
use crate::ComplexValue;

use super::gamma::{log_gamma_complex, recip_gamma};

const MAX_TERMS: usize = 1_000_000;
const SMALL_TERM: f64 = 1e-16;

fn is_nonpositive_integer(z: ComplexValue) -> bool {
    z.im == 0.0 && z.re <= 0.0 && z.re == z.re.round()
}

/// Gauss hypergeometric series `₂F₁(a, b; c; z)` for real `|z| < 1`.
///
/// Summation stops once three consecutive terms are below `1e−16` times the
/// partial sum (and more than ten terms have been taken).
pub fn hyp2f1(a: ComplexValue, b: ComplexValue, c: ComplexValue, z: f64) -> Result<ComplexValue> {
    if !(z.abs() < 1.0) {
        return Err(GreenError::domain("hyp2f1", format!("need |z| < 1, got {z}")));
    }
    if is_nonpositive_integer(c) {
        return Err(GreenError::domain("hyp2f1", format!("c = {c} is a non-positive integer")));
    }
    let mut sum = ComplexValue::new(1.0, 0.0);
    let mut term = ComplexValue::new(1.0, 0.0);
    let mut small = 0;
    for n in 0..MAX_TERMS {
        let k = n as f64;
        term = term * (a + k) * (b + k) / ((c + k) * (k + 1.0)) * z;
        sum += term;
        if term.norm() <= SMALL_TERM * sum.norm() {
            small += 1;
        } else {
            small = 0;
        }
        if small >= 3 && n > 10 {
            return Ok(sum);
        }
    }
    Err(GreenError::no_convergence(
        "hyp2f1",
        format!("no convergence after {MAX_TERMS} terms (a = {a}, b = {b}, c = {c}, z = {z})"),
    ))
}

/// `₂F₁(a, b; c; 1) = Γ(c)Γ(c−a−b) / (Γ(c−a)Γ(c−b))`.
pub fn gauss_value(a: ComplexValue, b: ComplexValue, c: ComplexValue) -> Result<ComplexValue> {
    if !(c.re > 0.0 && c.re > (a + b).re) {
        return Err(GreenError::domain(
            "gauss_value",
            format!("need Re c > 0 and Re c > Re(a+b), got a = {a}, b = {b}, c = {c}"),
        ));
    }
    let head = (log_gamma_complex(c)? + log_gamma_complex(c - a - b)?).exp();
    Ok(head * recip_gamma(c - a) * recip_gamma(c - b))
}
