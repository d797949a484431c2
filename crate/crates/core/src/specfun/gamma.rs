use std::f64::consts::PI;

use crate::error::{GreenError, Result};
use crate::ComplexValue;

/// `B_{2k} / (2k (2k − 1))` for `k = 1..=10`.
const STIRLING: [f64; 10] = [
    1.0 / 12.0,
    -1.0 / 360.0,
    1.0 / 1260.0,
    -1.0 / 1680.0,
    1.0 / 1188.0,
    -691.0 / 360_360.0,
    1.0 / 156.0,
    -3617.0 / 122_400.0,
    43_867.0 / 244_188.0,
    -174_611.0 / 125_400.0,
];

const SHIFT_THRESHOLD: f64 = 10.0;

fn is_nonpositive_integer(z: ComplexValue) -> bool {
    z.im == 0.0 && z.re <= 0.0 && z.re == z.re.round()
}

fn stirling(z: ComplexValue) -> ComplexValue {
    let half_ln_two_pi = 0.5 * (2.0 * PI).ln();
    let mut sum = (z - 0.5) * z.ln() - z + half_ln_two_pi;
    let inv = z.inv();
    let inv2 = inv * inv;
    let mut pow = inv;
    for coef in STIRLING {
        sum += pow * coef;
        pow *= inv2;
    }
    sum
}

/// `log sin(πz)`, stable for large `|Im z|`. Branch is not normalized.
pub(crate) fn ln_sin_pi(z: ComplexValue) -> ComplexValue {
    let i = ComplexValue::i();
    if z.im.abs() < 20.0 {
        return (z * PI).sin().ln();
    }
    if z.im > 0.0 {
        // sin πz = (i/2) e^{−iπz} (1 − e^{2iπz})
        -i * PI * z + (1.0 - (i * 2.0 * PI * z).exp()).ln() + (i * 0.5).ln()
    } else {
        // sin πz = e^{iπz} (1 − e^{−2iπz}) / (2i)
        i * PI * z + (1.0 - (-i * 2.0 * PI * z).exp()).ln() - (i * 2.0).ln()
    }
}

/// `log cos(πz)`, stable for large `|Im z|`. Branch is not normalized.
pub(crate) fn ln_cos_pi(z: ComplexValue) -> ComplexValue {
    let i = ComplexValue::i();
    if z.im.abs() < 20.0 {
        return (z * PI).cos().ln();
    }
    let half_ln2 = 2f64.ln();
    if z.im > 0.0 {
        -i * PI * z + (1.0 + (i * 2.0 * PI * z).exp()).ln() - half_ln2
    } else {
        i * PI * z + (1.0 + (-i * 2.0 * PI * z).exp()).ln() - half_ln2
    }
}

/// `log Γ(z)` by the Stirling series after shifting to `Re z ≥ 10`.
///
/// For `Re z ≥ 1/2` this is the principal branch. For `Re z < 1/2` the
/// reflection formula is used and the result is a logarithm of `Γ(z)` whose
/// imaginary part may differ from the principal one by a multiple of `2π`.
pub fn log_gamma_complex(z: ComplexValue) -> Result<ComplexValue> {
    if !(z.re.is_finite() && z.im.is_finite()) {
        return Err(GreenError::domain("log_gamma_complex", format!("non-finite argument {z}")));
    }
    if is_nonpositive_integer(z) {
        return Err(GreenError::pole("log_gamma_complex", format!("{z}")));
    }
    if z.re < 0.5 {
        let reflected = log_gamma_complex(1.0 - z)?;
        return Ok(ComplexValue::new(PI.ln(), 0.0) - ln_sin_pi(z) - reflected);
    }
    let mut w = z;
    let mut shift = ComplexValue::new(0.0, 0.0);
    while w.re < SHIFT_THRESHOLD {
        shift += w.ln();
        w += 1.0;
    }
    Ok(stirling(w) - shift)
}

/// `Γ(z)`.
pub fn gamma_complex(z: ComplexValue) -> Result<ComplexValue> {
    Ok(log_gamma_complex(z)?.exp())
}

/// `1/Γ(z)`, an entire function; zero at the non-positive integers.
pub fn recip_gamma(z: ComplexValue) -> ComplexValue {
    match log_gamma_complex(z) {
        Ok(l) => (-l).exp(),
        Err(_) => ComplexValue::new(0.0, 0.0),
    }
}

/// `log Γ(x)` for real `x > 0`.
pub fn ln_gamma_real(x: f64) -> Result<f64> {
    if !(x > 0.0) {
        return Err(GreenError::domain("ln_gamma_real", format!("need x > 0, got {x}")));
    }
    Ok(log_gamma_complex(ComplexValue::new(x, 0.0))?.re)
}

fn check_ratio_args(op: &'static str, a: f64, b: f64) -> Result<()> {
    if !(a > 0.0) {
        return Err(GreenError::domain(op, format!("need a > 0, got {a}")));
    }
    if !(b >= a) {
        return Err(GreenError::domain(op, format!("need b ≥ a, got a = {a}, b = {b}")));
    }
    Ok(())
}

/// Lower and upper bounds for `|Γ(a+iy) / Γ(b+iy)|`, `b ≥ a > 0`, obtained by
/// bounding the Binet remainder of `log Γ` by `1/12`.
pub fn gamma_ratio_bounds(a: f64, b: f64, y: f64) -> Result<(f64, f64)> {
    check_ratio_args("gamma_ratio_bounds", a, b)?;
    let ln_base = (a / 2.0 - 0.25) * (a * a + y * y).ln() - (b / 2.0 - 0.25) * (b * b + y * y).ln();
    let remainder = (1.0 / a - 1.0 / b) / 12.0;
    let lower = (ln_base - remainder).exp();
    let upper = (ln_base + (b - a) + remainder).exp();
    Ok((lower, upper))
}

/// Simplified upper bound `exp(b − a + (1/a − 1/b)/12) (a² + y²)^{−(b−a)/2}`,
/// valid for `b ≥ a > 0` and `b ≥ 1/2`.
pub fn gamma_ratio_upper(a: f64, b: f64, y: f64) -> Result<f64> {
    check_ratio_args("gamma_ratio_upper", a, b)?;
    if !(b >= 0.5) {
        return Err(GreenError::domain("gamma_ratio_upper", format!("need b ≥ 1/2, got {b}")));
    }
    let expo = b - a + (1.0 / a - 1.0 / b) / 12.0 - 0.5 * (b - a) * (a * a + y * y).ln();
    Ok(expo.exp())
}
