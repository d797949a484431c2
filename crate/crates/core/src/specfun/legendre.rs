use std::f64::consts::PI;

use crate::error::{GreenError, Result};
use crate::ComplexValue;

use super::gamma::{ln_cos_pi, ln_gamma_real, recip_gamma};
use super::hypergeometric::hyp2f1;

const MAX_TERMS: usize = 1_000_000;
/// Radius of the excluded disc around `s = 1/2` for the even-order series.
pub const HALF_EXCLUSION: f64 = 1e-3;
const NEAR_ONE: f64 = 1.01;

fn check_u(op: &'static str, u: f64) -> Result<()> {
    if !(u > 1.0 && u.is_finite()) {
        return Err(GreenError::domain(op, format!("need finite u > 1, got {u}")));
    }
    Ok(())
}

/// `P^{−m}_{s−1}(u)` through `((u−1)/(u+1))^{m/2} F(1−s, s; 1+m; (1−u)/2) / m!`.
/// Any order `m ≥ 0`; requires `1 < u < 3`.
pub fn legendre_p_neg_order_hyp(m: u32, s: ComplexValue, u: f64) -> Result<ComplexValue> {
    check_u("legendre_p_neg_order_hyp", u)?;
    if !(u < 3.0) {
        return Err(GreenError::domain(
            "legendre_p_neg_order_hyp",
            format!("series needs u < 3, got {u}"),
        ));
    }
    let one = ComplexValue::new(1.0, 0.0);
    let f = hyp2f1(one - s, s, ComplexValue::new(1.0 + m as f64, 0.0), 0.5 * (1.0 - u))?;
    let ln_fact = ln_gamma_real(1.0 + m as f64)?;
    let pre = (0.5 * m as f64 * ((u - 1.0) / (u + 1.0)).ln() - ln_fact).exp();
    Ok(f * pre)
}

/// `P^{−1}_{s−1}(u) = √((u−1)/(u+1)) F(s, 1−s; 2; (1−u)/2)` for `u ∈ (1, 3)`.
pub fn legendre_p_neg1(s: ComplexValue, u: f64) -> Result<ComplexValue> {
    check_u("legendre_p_neg1", u)?;
    if !(u < 3.0) {
        return Err(GreenError::domain("legendre_p_neg1", format!("defined here only for u < 3, got {u}")));
    }
    legendre_p_neg_order_hyp(1, s, u)
}

/// `Q₀(u) = ½ log((u+1)/(u−1))`.
pub fn legendre_q0(u: f64) -> Result<f64> {
    check_u("legendre_q0", u)?;
    Ok(0.5 * (2.0 / (u - 1.0)).ln_1p())
}

/// `Q′_ν(u) = −(2/(u+1))^ν (u²−1)⁻¹ Γ(1+ν)Γ(2+ν)/Γ(2+2ν) F(ν, 1+ν; 2+2ν; 2/(u+1))`.
pub fn legendre_q_deriv(nu: f64, u: f64) -> Result<f64> {
    check_u("legendre_q_deriv", u)?;
    if !(nu >= 0.0 && nu.is_finite()) {
        return Err(GreenError::domain("legendre_q_deriv", format!("need ν ≥ 0, got {nu}")));
    }
    let z = 2.0 / (u + 1.0);
    let ratio = (ln_gamma_real(1.0 + nu)? + ln_gamma_real(2.0 + nu)? - ln_gamma_real(2.0 + 2.0 * nu)?).exp();
    let f = hyp2f1(
        ComplexValue::new(nu, 0.0),
        ComplexValue::new(1.0 + nu, 0.0),
        ComplexValue::new(2.0 + 2.0 * nu, 0.0),
        z,
    )?;
    Ok(-z.powf(nu) / ((u - 1.0) * (u + 1.0)) * ratio * f.re)
}

/// The convergent expansion of `P^{−m}_{s−1}(u)` in powers of `x⁻²`,
/// `x = u + √(u²−1)`, for even `m`. Leading coefficients depend only on
/// `(m, s)` and are computed once.
#[derive(Clone, Debug)]
pub struct NegOrderSeries {
    m: u32,
    s: ComplexValue,
    a0: ComplexValue,
    b0: ComplexValue,
}

impl NegOrderSeries {
    pub fn new(m: u32, s: ComplexValue) -> Result<Self> {
        if m % 2 != 0 {
            return Err(GreenError::domain("legendre_p_negm", format!("order m = {m} must be even")));
        }
        if !(s.re.is_finite() && s.im.is_finite()) {
            return Err(GreenError::domain("legendre_p_negm", format!("non-finite s = {s}")));
        }
        if (s - 0.5).norm() < HALF_EXCLUSION {
            return Err(GreenError::domain(
                "legendre_p_negm",
                format!("s = {s} lies within {HALF_EXCLUSION} of 1/2"),
            ));
        }
        let mf = m as f64;
        // tan(πs) Γ(s−m) = π / (cos(πs) Γ(1+m−s)) and tan(πs) Γ(1−m−s) = π / (cos(πs) Γ(m+s)) for even m
        let inv_cos = (-ln_cos_pi(s)).exp();
        let a0 = inv_cos * PI * recip_gamma(1.0 + mf - s) * recip_gamma(0.5 + s);
        let b0 = inv_cos * PI * recip_gamma(mf + s) * recip_gamma(1.5 - s);
        Ok(NegOrderSeries { m, s, a0, b0 })
    }

    pub fn eval(&self, u: f64) -> Result<ComplexValue> {
        let bracket = self.eval_bracket(u)?;
        let root = ((u - 1.0) * (u + 1.0)).sqrt();
        Ok(bracket / (PI.sqrt() * (2.0 * root).powi(self.m as i32)))
    }

    /// `√π (x − x⁻¹)^m P^{−m}_{s−1}(u)`, which stays bounded for large `u`
    /// when `m = 2` is paired with the factor `u² − 1`.
    pub fn eval_bracket(&self, u: f64) -> Result<ComplexValue> {
        check_u("legendre_p_negm", u)?;
        let mf = self.m as f64;
        let s = self.s;
        let root = ((u - 1.0) * (u + 1.0)).sqrt();
        let x = u + root;
        let q = 1.0 / (x * x);
        let lnx = x.ln();
        let pa = ((mf - s) * lnx).exp();
        let pb = ((mf - 1.0 + s) * lnx).exp();
        let (na, nb) = (pa.norm(), pb.norm());
        let mut a = self.a0;
        let mut b = self.b0;
        let mut qn = 1.0;
        let mut sum_a = ComplexValue::new(0.0, 0.0);
        let mut sum_b = ComplexValue::new(0.0, 0.0);
        let mut abs_sum = 0.0;
        for n in 0..MAX_TERMS {
            let ta = a * qn;
            let tb = b * qn;
            sum_a += ta;
            sum_b += tb;
            let mag = ta.norm() * na + tb.norm() * nb;
            abs_sum += mag;
            if n > self.m as usize {
                let partial = (pa * sum_a - pb * sum_b).norm();
                let tail = mag * q / (1.0 - q);
                if tail <= 1e-15 * partial || tail <= 1e-16 * abs_sum {
                    return Ok(pa * sum_a - pb * sum_b);
                }
            }
            let k = n as f64;
            let common = (0.5 - mf + k) / (k + 1.0);
            a = a * common * (k - mf + s) / (k + 0.5 + s);
            b = b * common * (k - mf + 1.0 - s) / (k + 1.5 - s);
            qn *= q;
        }
        Err(GreenError::no_convergence(
            "legendre_p_negm",
            format!("series for m = {}, s = {}, u = {u} did not converge", self.m, self.s),
        ))
    }
}

/// `P^{−m}_{s−1}(u)` for even `m ≥ 0` and `u > 1`.
///
/// Close to `u = 1`, where the expansion in `x⁻²` cancels badly, the
/// hypergeometric form in `(1−u)/2` is used instead.
pub fn legendre_p_negm(m: u32, s: ComplexValue, u: f64) -> Result<ComplexValue> {
    let series = NegOrderSeries::new(m, s)?;
    check_u("legendre_p_negm", u)?;
    if near_one(s, u) {
        return legendre_p_neg_order_hyp(m, s, u);
    }
    series.eval(u)
}

pub(crate) fn near_one(s: ComplexValue, u: f64) -> bool {
    u < NEAR_ONE || (u < 3.0 && 2.0 * s.norm() * (0.5 * (u - 1.0)).sqrt() <= 4.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::specfun::strip::{p_sigma, StripParameter};
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> ComplexValue {
        ComplexValue::new(re, im)
    }

    /// `s ∈ [1/2, 1]` with `s(1−s) = λ ≤ 1/4`.
    fn s_for_lambda(lambda: f64) -> ComplexValue {
        c(0.5 + (0.25 - lambda).max(0.0).sqrt(), 0.0)
    }

    #[test]
    fn p_neg1_examples() {
        let v = legendre_p_neg1(c(1.0, 0.0), 2.0).unwrap();
        assert!((v.re - (1.0f64 / 3.0).sqrt()).abs() < 1e-15);
        assert!((v.re - 0.5773503).abs() < 1e-7);

        let root = (0.5f64 / 2.5).sqrt();
        let v = legendre_p_neg1(c(0.5, 0.0), 1.5).unwrap().re;
        assert!((2.0 - 4.0 / PI) * root <= v && v <= 4.0 / PI * root);

        // s(1−s) = 1/2 forces s = 1/2 ± i/2
        let s = c(0.5, 0.5);
        let v = legendre_p_neg1(s, 2.0).unwrap();
        assert!(v.im.abs() < 1e-14);
        let root = (1.0f64 / 3.0).sqrt();
        assert!((2.0 - 4.0 / PI) * root <= v.re && v.re <= 4.0 / PI * root);

        assert!(legendre_p_neg1(c(0.7, 0.0), 3.0).is_err());
        assert!(legendre_p_neg1(c(0.7, 0.0), 1.0).is_err());
    }

    #[test]
    fn q0_examples() {
        assert!((legendre_q0(2.0).unwrap() - 0.5 * 3f64.ln()).abs() < 1e-15);
        assert!((legendre_q0(2.0).unwrap() - 0.5493061).abs() < 1e-7);
        for &u in &[1.001, 1.7, 12.0, 3e5] {
            let l = crate::geom::kernel_l(u).unwrap();
            assert!((legendre_q0(u).unwrap() - 2.0 * PI * l).abs() < 1e-14 * legendre_q0(u).unwrap().max(1.0));
        }
        assert!(legendre_q0(1e6).unwrap() < 1e-5);
        assert!(legendre_q0(1.0).is_err());
    }

    #[test]
    fn q_deriv_examples() {
        assert!((legendre_q_deriv(0.0, 2.0).unwrap() + 1.0 / 3.0).abs() < 1e-15);
        let v = legendre_q_deriv(1.0, 3.0).unwrap();
        assert!((-0.0625..=0.0).contains(&v));
        // Q₁(u) = (u/2) log((u+1)/(u−1)) − 1, so Q₁′(3) = ½ log 2 − 3/8
        assert!((v - (0.5 * 2f64.ln() - 0.375)).abs() < 1e-13);
        let v = legendre_q_deriv(0.5, 1.01).unwrap();
        assert!(v < 0.0 && v >= -(2.0f64 / 2.01).sqrt() / (1.01 * 1.01 - 1.0));
        assert!(legendre_q_deriv(-0.1, 2.0).is_err());
        assert!(legendre_q_deriv(0.5, 0.9).is_err());
    }

    #[test]
    fn q_deriv_matches_finite_difference() {
        for &u in &[1.2, 2.5, 7.0] {
            let h = 1e-5;
            let fd = (legendre_q0(u + h).unwrap() - legendre_q0(u - h).unwrap()) / (2.0 * h);
            assert!((legendre_q_deriv(0.0, u).unwrap() - fd).abs() < 1e-8);
        }
    }

    #[test]
    fn p_negm_examples() {
        let v = legendre_p_negm(2, c(1.0, 0.0), 3.0).unwrap();
        assert!((v.re - 0.25).abs() < 1e-14 && v.im.abs() < 1e-14);
        for &u in &[1.05, 2.0, 17.0, 900.0] {
            let v = legendre_p_negm(0, c(1.0, 0.0), u).unwrap();
            assert!((v - c(1.0, 0.0)).norm() < 1e-13, "u = {u}: {v}");
        }
        let s = c(0.5, 3.0);
        let sigma = StripParameter::new(0.25).unwrap();
        let v = legendre_p_negm(2, s, 2.0).unwrap();
        let bound = (s * (1.0 - s)).norm().powf(-1.25) * p_sigma(&sigma, 2.0).unwrap() / 3.0;
        assert!(v.norm() <= bound);
        assert!(legendre_p_negm(2, c(0.5, 0.0), 2.0).is_err());
        assert!(legendre_p_negm(2, c(0.5004, 0.0), 2.0).is_err());
        assert!(legendre_p_negm(1, c(0.8, 0.0), 2.0).is_err());
    }

    #[test]
    fn series_agrees_with_hypergeometric_form() {
        for &s in &[c(0.8, 0.0), c(0.5, 2.0), c(0.3, -5.0), c(0.5, 0.01), c(1.0, 0.0)] {
            let series = NegOrderSeries::new(2, s).unwrap();
            for &u in &[1.2, 1.9, 2.7] {
                let a = series.eval(u).unwrap();
                let b = legendre_p_neg_order_hyp(2, s, u).unwrap();
                assert!((a - b).norm() < 1e-10 * b.norm().max(1e-3), "s = {s}, u = {u}: {a} vs {b}");
            }
        }
    }

    #[test]
    fn closed_form_at_s_one() {
        let mut u: f64 = 1.0 + 1e-9;
        while u <= 1e4 {
            let v = legendre_p_negm(2, c(1.0, 0.0), u).unwrap();
            let exact = (u - 1.0) / (2.0 * u + 2.0);
            assert!((v.re - exact).abs() <= 1e-12 * exact, "u = {u}: {} vs {exact}", v.re);
            u = 1.0 + (u - 1.0) * 1.7;
        }
        let v = legendre_p_negm(2, c(1.0, 0.0), 1e4).unwrap();
        assert!((v.re - (1e4 - 1.0) / (2e4 + 2.0)).abs() <= 1e-12 * v.re);
    }

    #[test]
    fn deterministic() {
        let s = c(0.5, 7.3);
        let a = legendre_p_negm(2, s, 41.0).unwrap();
        let b = legendre_p_negm(2, s, 41.0).unwrap();
        assert_eq!((a.re.to_bits(), a.im.to_bits()), (b.re.to_bits(), b.im.to_bits()));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(500))]

        #[test]
        fn p_neg1_bracket(u in 1.0f64..3.0, frac in 0.0f64..=1.0) {
            prop_assume!(u > 1.0 + 1e-12);
            let lambda = (frac * 0.5 / (u - 1.0)).min(0.25);
            let s = s_for_lambda(lambda);
            let root = ((u - 1.0) / (u + 1.0)).sqrt();
            let v = legendre_p_neg1(s, u).unwrap().re;
            prop_assert!((2.0 - 4.0 / PI) * root <= v + 1e-14);
            prop_assert!(v <= 4.0 / PI * root + 1e-14);
        }

        #[test]
        fn p_neg1_bracket_complex_s(u in 1.0f64..3.0, frac in 0.0f64..=1.0) {
            prop_assume!(u > 1.0 + 1e-12);
            let lambda = frac * 0.5 / (u - 1.0);
            prop_assume!(lambda > 0.25);
            let s = c(0.5, (lambda - 0.25).sqrt());
            let root = ((u - 1.0) / (u + 1.0)).sqrt();
            let v = legendre_p_neg1(s, u).unwrap().re;
            prop_assert!((2.0 - 4.0 / PI) * root <= v + 1e-14);
            prop_assert!(v <= 4.0 / PI * root + 1e-14);
        }

        #[test]
        fn q_deriv_bracket(nu in 0.0f64..=10.0, u in 1.0f64..=100.0) {
            prop_assume!(u > 1.0 + 1e-6);
            let v = legendre_q_deriv(nu, u).unwrap();
            let lower = -(2.0 / (u + 1.0)).powf(nu) / (u * u - 1.0);
            prop_assert!(v <= 0.0);
            prop_assert!(lower <= v * (1.0 - 1e-13), "{} < {}", v, lower);
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(300))]

        #[test]
        fn p2_regular_bound(sig_ix in 0usize..4, t in 0.01f64..=50.0, u in 1.0f64..=100.0) {
            prop_assume!(u > 1.0 + 1e-9);
            let sigma = [0.1, 0.25, 0.306, 0.45][sig_ix];
            let sp = StripParameter::new(sigma).unwrap();
            let s = c(0.5, t);
            let v = legendre_p_negm(2, s, u).unwrap();
            let bound = (s * (1.0 - s)).norm().powf(-1.25) * p_sigma(&sp, u).unwrap() / (u * u - 1.0);
            prop_assert!(v.norm() <= bound, "|P| = {} > {}", v.norm(), bound);
        }
    }
}
