//! Selberg–Harish-Chandra transforms of the point-pair kernels: the indicator
//! kernel `g_U`, the trapezoids `g_U^±`, the resolvent family `h_a`, and the
//! integrals `I_δ^±(s)` together with the majorant integrals `D_δ^±`.

use std::f64::consts::PI;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{GreenError, Result};
use crate::quad::{integrate, QuadSettings, QuadValue};
use crate::specfun::{legendre_p_neg1, legendre_p_neg_order_hyp, near_one, p_sigma, NegOrderSeries, StripParameter};
use crate::ComplexValue;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Sign {
    #[serde(rename = "+")]
    Plus,
    #[serde(rename = "-")]
    Minus,
}

impl fmt::Display for Sign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Sign::Plus => "+",
            Sign::Minus => "-",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
struct RawTrapezoid {
    delta: f64,
    alpha_plus: f64,
    beta_plus: f64,
    alpha_minus: f64,
    beta_minus: f64,
}

/// Shape of the trapezoid kernels `g_U^±`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawTrapezoid")]
pub struct TrapezoidParams {
    delta: f64,
    alpha_plus: f64,
    beta_plus: f64,
    alpha_minus: f64,
    beta_minus: f64,
}

impl TryFrom<RawTrapezoid> for TrapezoidParams {
    type Error = GreenError;
    fn try_from(r: RawTrapezoid) -> Result<Self> {
        TrapezoidParams::new(r.delta, r.alpha_plus, r.beta_plus, r.alpha_minus, r.beta_minus)
    }
}

/// Largest admissible `β⁻` for given `δ`, `α⁻`: `δ^{1+α⁻}/(δ+1)`.
pub fn beta_minus_max(delta: f64, alpha_minus: f64) -> f64 {
    delta.powf(1.0 + alpha_minus) / (delta + 1.0)
}

impl TrapezoidParams {
    pub fn new(delta: f64, alpha_plus: f64, beta_plus: f64, alpha_minus: f64, beta_minus: f64) -> Result<Self> {
        let finite = [delta, alpha_plus, beta_plus, alpha_minus, beta_minus]
            .iter()
            .all(|v| v.is_finite());
        if !finite {
            return Err(GreenError::constraint("finite_parameters", "all trapezoid parameters must be finite"));
        }
        if !(delta > 1.0) {
            return Err(GreenError::constraint("delta_gt_one", format!("need δ > 1, got {delta}")));
        }
        if !(alpha_plus > 0.0 && alpha_plus < 0.5) {
            return Err(GreenError::constraint(
                "alpha_plus_range",
                format!("need 0 < α⁺ < 1/2, got {alpha_plus}"),
            ));
        }
        if !(alpha_minus > 0.0 && alpha_minus < 0.5) {
            return Err(GreenError::constraint(
                "alpha_minus_range",
                format!("need 0 < α⁻ < 1/2, got {alpha_minus}"),
            ));
        }
        if !(beta_plus > 0.0) {
            return Err(GreenError::constraint("beta_plus_positive", format!("need β⁺ > 0, got {beta_plus}")));
        }
        if !(beta_minus > 0.0) {
            return Err(GreenError::constraint("beta_minus_positive", format!("need β⁻ > 0, got {beta_minus}")));
        }
        let cap = beta_minus_max(delta, alpha_minus);
        if beta_minus > cap {
            return Err(GreenError::constraint(
                "beta_minus_critical",
                format!("β⁻ = {beta_minus} exceeds δ^(1+α⁻)/(δ+1) = {cap:.7}"),
            ));
        }
        Ok(TrapezoidParams {
            delta,
            alpha_plus,
            beta_plus,
            alpha_minus,
            beta_minus,
        })
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }
    pub fn alpha_plus(&self) -> f64 {
        self.alpha_plus
    }
    pub fn beta_plus(&self) -> f64 {
        self.beta_plus
    }
    pub fn alpha_minus(&self) -> f64 {
        self.alpha_minus
    }
    pub fn beta_minus(&self) -> f64 {
        self.beta_minus
    }

    pub fn alpha(&self, sign: Sign) -> f64 {
        match sign {
            Sign::Plus => self.alpha_plus,
            Sign::Minus => self.alpha_minus,
        }
    }

    pub fn beta(&self, sign: Sign) -> f64 {
        match sign {
            Sign::Plus => self.beta_plus,
            Sign::Minus => self.beta_minus,
        }
    }
}

/// `T(U) = U − β⁻U^{−1−α⁻}(U²−1)`, clamped below at 1 against rounding.
pub fn t_of_u(p: &TrapezoidParams, u: f64) -> Result<f64> {
    if !(u >= p.delta) {
        return Err(GreenError::domain("T_of_U", format!("need U ≥ δ = {}, got {u}", p.delta)));
    }
    let t = u - p.beta_minus * u.powf(-1.0 - p.alpha_minus) * (u - 1.0) * (u + 1.0);
    Ok(t.max(1.0))
}

/// `V(U) = U + β⁺U^{−1−α⁺}(U²−1)`.
pub fn v_of_u(p: &TrapezoidParams, u: f64) -> Result<f64> {
    if !(u >= 1.0) {
        return Err(GreenError::domain("V_of_U", format!("need U ≥ 1, got {u}")));
    }
    Ok(u + p.beta_plus * u.powf(-1.0 - p.alpha_plus) * (u - 1.0) * (u + 1.0))
}

/// Indicator kernel of `[1, U]`.
pub fn g_u(big_u: f64, u: f64) -> f64 {
    if (1.0..=big_u).contains(&u) {
        1.0
    } else {
        0.0
    }
}

/// Trapezoid kernels: `g_U^+` is 1 on `[1, U]` and falls linearly to 0 at `V`;
/// `g_U^−` is 1 on `[1, T]` and falls linearly to 0 at `U`.
pub fn g_u_pm(p: &TrapezoidParams, sign: Sign, big_u: f64, u: f64) -> Result<f64> {
    let (lo, hi) = match sign {
        Sign::Plus => (big_u, v_of_u(p, big_u)?),
        Sign::Minus => (t_of_u(p, big_u)?, big_u),
    };
    Ok(if u < 1.0 || u >= hi {
        0.0
    } else if u <= lo {
        1.0
    } else {
        (hi - u) / (hi - lo)
    })
}

/// `h_U(s) = 2π√(U²−1) P^{−1}_{s−1}(U)` for `U ∈ (1, 3)`.
pub fn h_u(s: ComplexValue, big_u: f64) -> Result<ComplexValue> {
    let p = legendre_p_neg1(s, big_u)?;
    Ok(p * (2.0 * PI * ((big_u - 1.0) * (big_u + 1.0)).sqrt()))
}

/// The value of a transform together with its spectral parameter.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct TransformValue {
    pub value: ComplexValue,
    pub at: ComplexValue,
}

/// Evaluates `h_U^±(s)` for one `s` and many `U`, reusing the series set-up.
#[derive(Clone, Debug)]
pub struct PairTransform {
    params: TrapezoidParams,
    s: ComplexValue,
    series: NegOrderSeries,
}

impl PairTransform {
    pub fn new(params: TrapezoidParams, s: ComplexValue) -> Result<Self> {
        Ok(PairTransform {
            params,
            s,
            series: NegOrderSeries::new(2, s)?,
        })
    }

    /// `(u² − 1) P^{−2}_{s−1}(u)`, continuous at `u = 1` with value 0.
    fn weighted(&self, u: f64) -> Result<ComplexValue> {
        if u == 1.0 {
            return Ok(ComplexValue::new(0.0, 0.0));
        }
        if near_one(self.s, u) {
            return Ok(legendre_p_neg_order_hyp(2, self.s, u)? * ((u - 1.0) * (u + 1.0)));
        }
        // (u²−1)/(x − x⁻¹)² = 1/4 keeps large u from overflowing
        Ok(self.series.eval_bracket(u)? / (4.0 * PI.sqrt()))
    }

    pub fn h(&self, sign: Sign, big_u: f64) -> Result<ComplexValue> {
        if !(big_u >= self.params.delta) {
            return Err(GreenError::domain(
                "h_U_pm",
                format!("need U ≥ δ = {}, got {big_u}", self.params.delta),
            ));
        }
        let (lo, hi) = match sign {
            Sign::Plus => (big_u, v_of_u(&self.params, big_u)?),
            Sign::Minus => (t_of_u(&self.params, big_u)?, big_u),
        };
        let width = hi - lo;
        if !(width >= 1e-300) {
            return Err(GreenError::domain("h_U_pm", format!("degenerate trapezoid at U = {big_u}")));
        }
        Ok((self.weighted(hi)? - self.weighted(lo)?) * (2.0 * PI / width))
    }

    pub fn evaluate(&self, sign: Sign, big_u: f64) -> Result<TransformValue> {
        Ok(TransformValue {
            value: self.h(sign, big_u)?,
            at: self.s,
        })
    }
}

/// `h_U^±(s)` as the difference quotient of `(u²−1)P^{−2}_{s−1}(u)` over the
/// sloped part of the trapezoid.
pub fn h_u_pm(p: &TrapezoidParams, sign: Sign, s: ComplexValue, big_u: f64) -> Result<ComplexValue> {
    PairTransform::new(*p, s)?.h(sign, big_u)
}

/// `h_a(s) = 1/(s(1−s) + a(a−1))`.
pub fn h_a(a: f64, s: ComplexValue) -> Result<ComplexValue> {
    if !(a > 1.0 && a.is_finite()) {
        return Err(GreenError::domain("h_a", format!("need a > 1, got {a}")));
    }
    let den = s * (1.0 - s) + a * (a - 1.0);
    if den.norm() <= 4.0 * f64::EPSILON * a * a {
        return Err(GreenError::pole("h_a", format!("s = {s} with a = {a}")));
    }
    Ok(den.inv())
}

/// `h_a(s) − h_b(s)` in factored form,
/// `(b(b−1) − a(a−1)) / ((a−s)(a−1+s)(b−s)(b−1+s))`.
pub fn h_a_minus_h_b(a: f64, b: f64, s: ComplexValue) -> Result<ComplexValue> {
    h_a(a, s)?;
    h_a(b, s)?;
    let num = b * (b - 1.0) - a * (a - 1.0);
    Ok(ComplexValue::new(num, 0.0) / ((a - s) * (a - 1.0 + s) * (b - s) * (b - 1.0 + s)))
}

/// `c_a = 1/(vol · a(a−1))`.
pub fn c_a(a: f64, vol: f64) -> Result<f64> {
    if !(a > 1.0) || !(vol > 0.0) {
        return Err(GreenError::domain("c_a", format!("need a > 1 and vol > 0, got a = {a}, vol = {vol}")));
    }
    Ok(1.0 / (vol * a * (a - 1.0)))
}

/// `g_1(u) = Q_0(u)/(2π)`, which is the kernel `L`.
pub fn g_one(u: f64) -> Result<f64> {
    Ok(crate::specfun::legendre_q0(u)? / (2.0 * PI))
}

/// Controls for integrals over `[δ, ∞)`. Integration runs in `v = log U` in
/// chunks of fixed length until the analytic tail bound is small.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TailSettings {
    pub quad: QuadSettings,
    /// Stop once the tail bound is below this fraction of the running value.
    pub tail_rel: f64,
    /// Accept a remaining tail up to this fraction at the cut-off.
    pub accept_rel: f64,
    /// Chunk length in `log U`.
    pub chunk: f64,
    /// Largest cut-off `M`.
    pub max_upper: f64,
}

impl Default for TailSettings {
    fn default() -> Self {
        TailSettings {
            quad: QuadSettings::default().with_rel_tol(1e-8),
            tail_rel: 1e-8,
            accept_rel: 1e-3,
            chunk: 8.0,
            max_upper: 1e120,
        }
    }
}

impl TailSettings {
    pub fn with_rel_tol(mut self, rel_tol: f64) -> Self {
        self.quad.rel_tol = rel_tol;
        self.tail_rel = rel_tol;
        self
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TailEstimate<T> {
    /// Integral over `[δ, M]`.
    pub value: T,
    pub quad_error: f64,
    /// Bound for the absolute value of the integral over `[M, ∞)`.
    pub tail_bound: f64,
    pub upper_limit: f64,
}

/// `∫_δ^∞ f(U) dU` given `f(e^v)e^v` as `fv` and a tail bound `tail(M)`.
fn integrate_to_infinity<T, F, B>(
    op: &'static str,
    fv: &F,
    delta: f64,
    tail: &B,
    settings: &TailSettings,
    panels_per_chunk: usize,
) -> Result<TailEstimate<T>>
where
    T: QuadValue,
    F: Fn(f64) -> T,
    B: Fn(f64) -> f64,
{
    let v_max = settings.max_upper.ln();
    let base = settings.quad.with_panels(panels_per_chunk);
    let mut v = delta.ln();
    let mut total = T::zero();
    let mut quad_error = 0.0;
    loop {
        let v1 = (v + settings.chunk).min(v_max);
        let mut quad = base;
        // far chunks only need to be accurate relative to what is already summed
        quad.abs_tol = base.abs_tol.max(base.rel_tol * 1e-3 * total.magnitude());
        let est = integrate(fv, v, v1, &quad)?;
        total = total + est.value;
        quad_error += est.error;
        let m = v1.exp();
        let t = tail(m);
        let scale = total.magnitude();
        if t <= settings.tail_rel * scale {
            return Ok(TailEstimate {
                value: total,
                quad_error,
                tail_bound: t,
                upper_limit: m,
            });
        }
        if v1 >= v_max {
            if t <= settings.accept_rel * scale {
                return Ok(TailEstimate {
                    value: total,
                    quad_error,
                    tail_bound: t,
                    upper_limit: m,
                });
            }
            return Err(GreenError::no_convergence(
                op,
                format!("tail bound {t:.3e} at M = {m:.1e} exceeds {:.0e} of the value {scale:.6e}", settings.accept_rel),
            ));
        }
        v = v1;
    }
}

/// Integrand of `D_δ^±` at `U`:
/// `(p_σ(V) + p_σ(U)) U^{1+α⁺}/(β⁺(U²−1)²)` or `(p_σ(U) + p_σ(T)) U^{1+α⁻}/(β⁻(U²−1)²)`.
pub fn d_integrand(p: &TrapezoidParams, sign: Sign, sigma: &StripParameter, big_u: f64) -> Result<f64> {
    let other = match sign {
        Sign::Plus => v_of_u(p, big_u)?,
        Sign::Minus => t_of_u(p, big_u)?,
    };
    let alpha = p.alpha(sign);
    let inv2 = 1.0 / (big_u * big_u);
    let weight = big_u.powf(alpha - 3.0) / ((1.0 - inv2) * (1.0 - inv2));
    Ok((p_sigma(sigma, other)? + p_sigma(sigma, big_u)?) * weight / p.beta(sign))
}

/// Bound for `∫_M^∞` of [`d_integrand`]; infinite when `σ ≤ α`.
pub fn d_tail_bound(p: &TrapezoidParams, sign: Sign, sigma: &StripParameter, m: f64) -> f64 {
    let s = sigma.sigma();
    let alpha = p.alpha(sign);
    if s <= alpha || m <= p.delta {
        return f64::INFINITY;
    }
    let (c, c_prime) = crate::specfun::c_sigma(sigma);
    let k = (c + c_prime) / (4.0 * PI.sqrt()) * 2f64.powf(2.0 - s);
    let inv2 = 1.0 / (m * m);
    let near = 1.0 + 3.0 * inv2;
    let bracket = match sign {
        Sign::Plus => {
            let rho = 1.0 + p.beta_plus * m.powf(-p.alpha_plus);
            near * rho.powf(2.0 - s) + near
        }
        Sign::Minus => near + 4.0,
    };
    let c_total = k * bracket / ((1.0 - inv2) * (1.0 - inv2));
    c_total * m.powf(alpha - s) / ((s - alpha) * p.beta(sign))
}

/// `D_δ^±` over `[δ, M]` with the tail bound for `[M, ∞)`.
pub fn d_integral(
    p: &TrapezoidParams,
    sign: Sign,
    sigma: &StripParameter,
    settings: &TailSettings,
) -> Result<TailEstimate<f64>> {
    let fv = |v: f64| {
        let u = v.exp().max(p.delta);
        d_integrand(p, sign, sigma, u).map(|x| x * u).unwrap_or(f64::NAN)
    };
    let tail = |m: f64| d_tail_bound(p, sign, sigma, m);
    let est = integrate_to_infinity("D_delta", &fv, p.delta, &tail, settings, 16)?;
    if !est.value.is_finite() {
        return Err(GreenError::no_convergence("D_delta", "integrand evaluation failed"));
    }
    Ok(est)
}

/// `I_δ^±(s) = (1/2π) ∫_δ^∞ h_U^±(s)/(U²−1) dU` with its tail bound.
pub fn i_delta_pm_with(
    p: &TrapezoidParams,
    sign: Sign,
    s: ComplexValue,
    settings: &TailSettings,
) -> Result<TailEstimate<ComplexValue>> {
    if !(s.re > 0.0 && s.re < 1.0) {
        return Err(GreenError::domain("I_delta_pm", format!("need 0 < Re s < 1, got {s}")));
    }
    let pair = PairTransform::new(*p, s)?;
    // the first failure is surfaced after integration
    let failure = std::sync::Mutex::new(None);
    let fv = |v: f64| {
        let u = v.exp().max(p.delta);
        match pair.h(sign, u) {
            Ok(h) => h * (u / (2.0 * PI * (u - 1.0) * (u + 1.0))),
            Err(e) => {
                failure.lock().unwrap().get_or_insert(e);
                ComplexValue::new(0.0, 0.0)
            }
        }
    };
    let sigma_eff = s.re.min(1.0 - s.re).min(0.5 - 1e-9);
    let strip = StripParameter::new(sigma_eff)?;
    let lambda_factor = (s * (1.0 - s)).norm().powf(-1.25);
    let tail = |m: f64| lambda_factor * d_tail_bound(p, sign, &strip, m);
    let panels = (16.0f64).max((s.im.abs() * settings.chunk / PI * 4.0).ceil()) as usize;
    let est = integrate_to_infinity("I_delta_pm", &fv, p.delta, &tail, settings, panels)?;
    if let Some(e) = failure.into_inner().unwrap() {
        return Err(e);
    }
    Ok(est)
}

/// `I_δ^±(s)`.
pub fn i_delta_pm(p: &TrapezoidParams, sign: Sign, s: ComplexValue) -> Result<ComplexValue> {
    Ok(i_delta_pm_with(p, sign, s, &TailSettings::default())?.value)
}
