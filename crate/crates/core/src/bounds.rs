//! Assembly of the constants `A ≤ B` with
//! `A ≤ gr(z, w) + Σ_{u(z,γw) < δ} (L(u(z,γw)) − L(δ)) ≤ B` for all `z, w`.

use std::f64::consts::PI;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::constants::*;
use crate::error::{GreenError, Result};
use crate::specfun::StripParameter;
use crate::transforms::{d_integral, Sign, TailSettings, TrapezoidParams};

/// Summary data of a cofinite group with one cusp.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GroupContext {
    pub vol: f64,
    pub eta: f64,
    pub contains_minus_one: bool,
    pub min_c: f64,
}

impl GroupContext {
    pub fn new(vol: f64, eta: f64, contains_minus_one: bool, min_c: f64) -> Result<Self> {
        let ctx = GroupContext {
            vol,
            eta,
            contains_minus_one,
            min_c,
        };
        ctx.check()?;
        Ok(ctx)
    }

    pub fn check(&self) -> Result<()> {
        if !(self.vol > 0.0 && self.vol.is_finite()) {
            return Err(GreenError::constraint("vol_positive", format!("need vol > 0, got {}", self.vol)));
        }
        if !(self.eta > 0.0 && self.eta <= 0.25) {
            return Err(GreenError::constraint("eta_range", format!("need 0 < η ≤ 1/4, got {}", self.eta)));
        }
        if !(self.min_c > 0.0 && self.min_c.is_finite()) {
            return Err(GreenError::constraint("min_c_positive", format!("need min_c > 0, got {}", self.min_c)));
        }
        Ok(())
    }

    /// `SL₂(Z)` with the Kim–Sarnak gap.
    pub fn sl2z() -> Self {
        GroupContext {
            vol: VOL_SL2Z,
            eta: ETA_KIM_SARNAK,
            contains_minus_one: true,
            min_c: MIN_C_SL2Z,
        }
    }

    /// `#(Γ ∩ {±1})`.
    pub fn count_pm1(&self) -> u32 {
        if self.contains_minus_one {
            2
        } else {
            1
        }
    }
}

/// `[("selberg-3-16", 3/16), ("kim-sarnak", 975/4096)]`.
pub fn eta_presets() -> Vec<(&'static str, f64)> {
    vec![("selberg-3-16", ETA_SELBERG), ("kim-sarnak", ETA_KIM_SARNAK)]
}

pub fn eta_preset(name: &str) -> Option<f64> {
    eta_presets().into_iter().find(|(n, _)| *n == name).map(|(_, v)| v)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ParamSet {
    pub trapezoid: TrapezoidParams,
    pub sigma_plus: f64,
    pub sigma_minus: f64,
}

impl ParamSet {
    pub fn reference() -> Self {
        ParamSet {
            trapezoid: TrapezoidParams::new(
                REFERENCE_DELTA,
                REFERENCE_ALPHA_PLUS,
                REFERENCE_BETA_PLUS,
                REFERENCE_ALPHA_MINUS,
                REFERENCE_BETA_MINUS,
            )
            .expect("reference trapezoid is valid"),
            sigma_plus: REFERENCE_SIGMA_PLUS,
            sigma_minus: REFERENCE_SIGMA_MINUS,
        }
    }

    pub fn sigma(&self, sign: Sign) -> f64 {
        match sign {
            Sign::Plus => self.sigma_plus,
            Sign::Minus => self.sigma_minus,
        }
    }
}

/// Checks every hypothesis on the parameters and returns them unchanged, or
/// the first violated constraint.
pub fn validate(params: &ParamSet, ctx: &GroupContext) -> Result<ParamSet> {
    ctx.check()?;
    let t = &params.trapezoid;
    // re-run the trapezoid checks in case the value was built without them
    TrapezoidParams::new(t.delta(), t.alpha_plus(), t.beta_plus(), t.alpha_minus(), t.beta_minus())?;
    for (sign, name_order, name_half, name_gap) in [
        (Sign::Plus, "alpha_plus_lt_sigma_plus", "sigma_plus_lt_half", "sigma_plus_spectral_gap"),
        (Sign::Minus, "alpha_minus_lt_sigma_minus", "sigma_minus_lt_half", "sigma_minus_spectral_gap"),
    ] {
        let sigma = params.sigma(sign);
        let alpha = t.alpha(sign);
        if !(sigma > alpha) {
            return Err(GreenError::constraint(name_order, format!("need α{sign} < σ{sign}, got α = {alpha}, σ = {sigma}")));
        }
        if !(sigma < 0.5) {
            return Err(GreenError::constraint(name_half, format!("need σ{sign} < 1/2, got {sigma}")));
        }
        if sigma * (1.0 - sigma) > ctx.eta {
            return Err(GreenError::constraint(
                name_gap,
                format!("σ{sign}(1−σ{sign}) = {:.6} exceeds η = {:.6}", sigma * (1.0 - sigma), ctx.eta),
            ));
        }
    }
    Ok(*params)
}

/// `(q⁺, q⁻)`:
/// `q⁺ = (β⁺/(2α⁺δ^{α⁺}) − log((δ+1)/2))/vol`,
/// `q⁻ = −(β⁻/(2α⁻δ^{α⁻}) + log((δ+1)/2))/vol`.
pub fn compute_q(params: &ParamSet, ctx: &GroupContext) -> (f64, f64) {
    let t = &params.trapezoid;
    let delta = t.delta();
    let log_term = ((delta + 1.0) / 2.0).ln();
    let plus = t.beta_plus() / (2.0 * t.alpha_plus() * delta.powf(t.alpha_plus()));
    let minus = t.beta_minus() / (2.0 * t.alpha_minus() * delta.powf(t.alpha_minus()));
    ((plus - log_term) / ctx.vol, -(minus + log_term) / ctx.vol)
}

/// `D_δ^±` with the tail bound included, so each value is an upper estimate.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DValues {
    pub plus: f64,
    pub minus: f64,
    pub plus_tail: f64,
    pub minus_tail: f64,
    pub plus_quad_error: f64,
    pub minus_quad_error: f64,
}

pub fn compute_d(params: &ParamSet) -> Result<DValues> {
    compute_d_with(params, &TailSettings::default())
}

pub fn compute_d_with(params: &ParamSet, settings: &TailSettings) -> Result<DValues> {
    let t = params.trapezoid;
    let one = |sign: Sign| {
        let strip = StripParameter::new(params.sigma(sign))?;
        d_integral(&t, sign, &strip, settings)
    };
    let (plus, minus) = rayon::join(|| one(Sign::Plus), || one(Sign::Minus));
    let (plus, minus) = (plus?, minus?);
    Ok(DValues {
        plus: plus.value + plus.tail_bound,
        minus: minus.value + minus.tail_bound,
        plus_tail: plus.tail_bound,
        minus_tail: minus.tail_bound,
        plus_quad_error: plus.quad_error,
        minus_quad_error: minus.quad_error,
    })
}

/// `η^{−5/4}/4 + 4√2`, times `π/(2π−4)²` when `include_phi_constant`.
pub fn spectral_factor(eta: f64, include_phi_constant: bool) -> Result<f64> {
    if !(eta > 0.0 && eta <= 0.25) {
        return Err(GreenError::domain("spectral_factor", format!("need 0 < η ≤ 1/4, got {eta}")));
    }
    let base = eta.powf(-1.25) / 4.0 + 4.0 * 2f64.sqrt();
    Ok(if include_phi_constant {
        base * PI / ((2.0 * PI - 4.0) * (2.0 * PI - 4.0))
    } else {
        base
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
pub enum ArithmeticMode {
    /// Computed `q±`, `D±` and the full spectral factor.
    #[default]
    #[serde(rename = "theorem-exact")]
    TheoremExact,
    /// The published constants `69.0, −216, 18.5, 9.61` and the spectral
    /// factor without `π/(2π−4)²`.
    #[serde(rename = "paper-arithmetic")]
    PaperArithmetic,
}

impl fmt::Display for ArithmeticMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ArithmeticMode::TheoremExact => "theorem-exact",
            ArithmeticMode::PaperArithmetic => "paper-arithmetic",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub q_plus: f64,
    pub q_minus: f64,
    #[serde(rename = "D_plus")]
    pub d_plus: f64,
    #[serde(rename = "D_minus")]
    pub d_minus: f64,
    #[serde(rename = "N_bar")]
    pub n_bar: f64,
    pub spectral_factor: f64,
    #[serde(rename = "A")]
    pub a: f64,
    #[serde(rename = "B")]
    pub b: f64,
    pub mode: ArithmeticMode,
}

/// `A = −q⁺ − D⁺ Φ N̄`, `B = −q⁻ + D⁻ Φ N̄` from given pieces.
pub fn assemble_from_parts(
    q: (f64, f64),
    d: (f64, f64),
    spectral: f64,
    n_bar: f64,
    mode: ArithmeticMode,
) -> Result<BoundReport> {
    if !(n_bar >= 2.0 && n_bar.is_finite()) {
        return Err(GreenError::constraint("n_bar_at_least_two", format!("need N̄ ≥ 2, got {n_bar}")));
    }
    let (q_plus, q_minus) = q;
    let (d_plus, d_minus) = d;
    Ok(BoundReport {
        q_plus,
        q_minus,
        d_plus,
        d_minus,
        n_bar,
        spectral_factor: spectral,
        a: -q_plus - d_plus * spectral * n_bar,
        b: -q_minus + d_minus * spectral * n_bar,
        mode,
    })
}

/// Full assembly. `n_bar` is the average of `N(z, z, U)` and `N(w, w, U)`.
pub fn assemble(params: &ParamSet, ctx: &GroupContext, n_bar: f64, mode: ArithmeticMode) -> Result<BoundReport> {
    let params = validate(params, ctx)?;
    if !(n_bar >= 2.0) {
        return Err(GreenError::constraint("n_bar_at_least_two", format!("need N̄ ≥ 2, got {n_bar}")));
    }
    match mode {
        ArithmeticMode::PaperArithmetic => assemble_from_parts(
            (REFERENCE_Q_PLUS, REFERENCE_Q_MINUS),
            (REFERENCE_D_PLUS, REFERENCE_D_MINUS),
            spectral_factor(ctx.eta, false)?,
            n_bar,
            mode,
        ),
        ArithmeticMode::TheoremExact => {
            let d = compute_d(&params)?;
            assemble_from_parts(
                compute_q(&params, ctx),
                (d.plus, d.minus),
                spectral_factor(ctx.eta, true)?,
                n_bar,
                mode,
            )
        }
    }
}
