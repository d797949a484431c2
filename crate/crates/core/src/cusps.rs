//! Extension of the bounds to neighbourhoods of a cusp: the Poisson kernel,
//! `λ(ξ, t)`, the convolution `N_{δ,ε}`, `r_δ`, the admissible widths `ε, ε′`
//! and the shifted constants `Ã ≤ B̃`.
//!
//! Only one cusp is modelled, summarized by the smallest `|c|` of an element
//! outside its stabilizer. Pairwise disjointness of the cusp discs for groups
//! with several cusps is left to the caller.

use std::f64::consts::PI;
use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::bounds::BoundReport;
use crate::error::{GreenError, Result};
use crate::geom::{kernel_l, mobius_apply, reduce_to_fundamental_domain, UnimodularMatrix, UpperHalfPoint};
use crate::lattice::orbit_representatives;
use crate::quad::{integrate, QuadSettings};
use crate::ComplexValue;

/// `r_δ = (√(2/(δ−1)) + arctan √((δ−1)/2)) / 24π`.
pub fn r_delta(delta: f64) -> Result<f64> {
    if !(delta > 1.0) || !delta.is_finite() {
        return Err(GreenError::domain("r_delta", format!("need δ > 1, got {delta}")));
    }
    let d = delta - 1.0;
    Ok(((2.0 / d).sqrt() + (d / 2.0).sqrt().atan()) / (24.0 * PI))
}

/// `P(ζ) = (1 − |ζ|²)/|1 − ζ|²` on the open unit disc.
pub fn poisson_kernel(zeta: ComplexValue) -> Result<f64> {
    let r2 = zeta.norm_sqr();
    if !(r2 < 1.0) {
        return Err(GreenError::domain("poisson_kernel", format!("need |ζ| < 1, got {}", zeta.norm())));
    }
    Ok((1.0 - r2) / (ComplexValue::new(1.0, 0.0) - zeta).norm_sqr())
}

/// `P(e^{2πit}ζ)`.
fn poisson_rotated(t: f64, zeta: ComplexValue) -> f64 {
    let z = ComplexValue::from_polar(1.0, 2.0 * PI * t) * zeta;
    (1.0 - z.norm_sqr()) / (ComplexValue::new(1.0, 0.0) - z).norm_sqr()
}

/// `λ(ξ, t) = (log(1 − e^{−2πit}ξ) − log(1 − e^{2πit}ξ)) / 2πi`, principal branches.
/// Real for real `ξ`.
pub fn lambda_xi(xi: ComplexValue, t: f64) -> Result<ComplexValue> {
    if !(xi.norm_sqr() < 1.0) {
        return Err(GreenError::domain("lambda_xi", format!("need |ξ| < 1, got {}", xi.norm())));
    }
    let one = ComplexValue::new(1.0, 0.0);
    let e = ComplexValue::from_polar(1.0, 2.0 * PI * t);
    let diff = (one - e.conj() * xi).ln() - (one - e * xi).ln();
    Ok(diff / ComplexValue::new(0.0, 2.0 * PI))
}

fn fine_settings(panels: usize) -> QuadSettings {
    QuadSettings::default().with_rel_tol(1e-12).with_abs_tol(1e-13).with_panels(panels)
}

/// `(|∫_0^t λ(ξ,y)/y dy + ½ log(1−ξ)|, 1/(12t))`.
pub fn lambda_integral_check(xi: f64, t: f64) -> Result<(f64, f64)> {
    if !(xi > -1.0 && xi < 1.0) {
        return Err(GreenError::domain("lambda_integral_check", format!("need −1 < ξ < 1, got {xi}")));
    }
    if !(t > 0.0 && t.is_finite()) {
        return Err(GreenError::domain("lambda_integral_check", format!("need t > 0, got {t}")));
    }
    let x = ComplexValue::new(xi, 0.0);
    let f = |y: f64| {
        if y == 0.0 {
            2.0 * xi / (1.0 - xi)
        } else {
            lambda_xi(x, y).map(|l| l.re / y).unwrap_or(f64::NAN)
        }
    };
    let panels = ((t * 64.0).ceil() as usize).max(16);
    let est = integrate(&f, 0.0, t, &fine_settings(panels))?;
    let lhs = (est.value + 0.5 * (1.0 - xi).ln()).abs();
    Ok((lhs, 1.0 / (12.0 * t)))
}

/// `N_{δ,ε}(ξ) = ∫ J_δ(1 + (εt)²/2) P(e^{2πit}ξ) dt` over `|t| ≤ τ = √(2δ−2)/ε`.
pub fn n_delta_eps(delta: f64, eps: f64, xi: ComplexValue) -> Result<f64> {
    if !(delta > 1.0) || !delta.is_finite() {
        return Err(GreenError::domain("N_delta_eps", format!("need δ > 1, got {delta}")));
    }
    if !(eps > 0.0) || !eps.is_finite() {
        return Err(GreenError::domain("N_delta_eps", format!("need ε > 0, got {eps}")));
    }
    if !(xi.norm_sqr() < 1.0) {
        return Err(GreenError::domain("N_delta_eps", format!("need |ξ| < 1, got {}", xi.norm())));
    }
    let tau = (2.0 * delta - 2.0).sqrt() / eps;
    let l_delta = kernel_l(delta)?;
    // J_δ(1 + (εt)²/2) with u − 1 kept exact
    let j = |t: f64| {
        let e2 = (eps * t) * (eps * t);
        if e2 == 0.0 {
            return f64::INFINITY;
        }
        ((4.0 / e2).ln_1p() / (4.0 * PI) - l_delta).max(0.0)
    };
    let t0 = tau.min(0.25);
    let head_settings = fine_settings(64).with_abs_tol(2.5e-11);
    let tail_panels = (((tau - t0) * 64.0).ceil() as usize).max(16);
    let tail_settings = fine_settings(tail_panels).with_abs_tol(2.5e-11);
    let mut total = 0.0;
    for side in [-1.0, 1.0] {
        // t = t0·x³ removes the logarithmic singularity at t = 0
        let head = |x: f64| {
            if x == 0.0 {
                return 0.0;
            }
            let t = t0 * x * x * x;
            3.0 * t0 * x * x * j(t) * poisson_rotated(side * t, xi)
        };
        total += integrate(&head, 0.0, 1.0, &head_settings)?.value;
        if tau > t0 {
            let tail = |t: f64| j(t) * poisson_rotated(side * t, xi);
            total += integrate(&tail, t0, tau, &tail_settings)?.value;
        }
    }
    Ok(total)
}

/// `(1/ε)(2/π) arctan √((δ−1)/2) − (1/2π) log|1 − ξ|`, the value `N_{δ,ε}(ξ)` is
/// within `ε r_δ` of.
pub fn n_delta_eps_centre(delta: f64, eps: f64, xi: ComplexValue) -> f64 {
    (2.0 / PI) * ((delta - 1.0) / 2.0).sqrt().atan() / eps
        - (ComplexValue::new(1.0, 0.0) - xi).norm().ln() / (2.0 * PI)
}

/// `∫_0^1 P(e^{2πia}ζ) P(e^{−2πia}η) da`, to compare with `P(ζη)`.
pub fn poisson_convolution(zeta: ComplexValue, eta: ComplexValue) -> Result<f64> {
    poisson_kernel(zeta)?;
    poisson_kernel(eta)?;
    let f = |a: f64| poisson_rotated(a, zeta) * poisson_rotated(-a, eta);
    Ok(integrate(&f, 0.0, 1.0, &fine_settings(64))?.value)
}

fn rho(delta: f64) -> f64 {
    delta + ((delta - 1.0) * (delta + 1.0)).sqrt()
}

/// `(ε′_max, ε_max) = (min_c / ρ^{1/2}, ε′_max / ρ)` with `ρ = δ + √(δ²−1)`.
pub fn admissible_eps(delta: f64, min_c: f64) -> Result<(f64, f64)> {
    if !(delta >= 1.0) || !delta.is_finite() {
        return Err(GreenError::domain("admissible_eps", format!("need δ > 1, got {delta}")));
    }
    let r = rho(delta);
    let eps_prime = min_c / r.sqrt();
    Ok((eps_prime, eps_prime / r))
}

const ADMISSIBLE_SLACK: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
struct RawCuspGeometry {
    eps: f64,
    eps_prime: f64,
    delta: f64,
    min_c: f64,
    count_pm1: u32,
}

/// Widths `ε < ε′` of the cusp discs, with the group data they are checked against.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawCuspGeometry")]
pub struct CuspGeometry {
    eps: f64,
    eps_prime: f64,
    delta: f64,
    min_c: f64,
    count_pm1: u32,
}

impl TryFrom<RawCuspGeometry> for CuspGeometry {
    type Error = GreenError;
    fn try_from(r: RawCuspGeometry) -> Result<Self> {
        CuspGeometry::new(r.eps, r.eps_prime, r.delta, r.min_c, r.count_pm1)
    }
}

impl CuspGeometry {
    pub fn new(eps: f64, eps_prime: f64, delta: f64, min_c: f64, count_pm1: u32) -> Result<Self> {
        if !(delta > 1.0) || !delta.is_finite() {
            return Err(GreenError::constraint("cusp_delta_gt_one", format!("need δ > 1, got {delta}")));
        }
        if !(min_c > 0.0) || !min_c.is_finite() {
            return Err(GreenError::constraint("min_c_positive", format!("need min_c > 0, got {min_c}")));
        }
        if !(eps > 0.0) || !eps.is_finite() {
            return Err(GreenError::constraint("eps_positive", format!("need ε > 0, got {eps}")));
        }
        if !(eps_prime > eps) || !eps_prime.is_finite() {
            return Err(GreenError::constraint(
                "eps_prime_gt_eps",
                format!("need ε′ > ε, got ε = {eps}, ε′ = {eps_prime}"),
            ));
        }
        if !(count_pm1 == 1 || count_pm1 == 2) {
            return Err(GreenError::constraint("count_pm1", format!("need 1 or 2, got {count_pm1}")));
        }
        let (eps_prime_max, _) = admissible_eps(delta, min_c)?;
        if eps_prime > eps_prime_max * (1.0 + ADMISSIBLE_SLACK) {
            return Err(GreenError::constraint(
                "eps_prime_admissible",
                format!("ε′ = {eps_prime} exceeds min_c/(δ+√(δ²−1))^(1/2) = {eps_prime_max:.7}"),
            ));
        }
        let r = rho(delta);
        if r * eps > eps_prime * (1.0 + ADMISSIBLE_SLACK) {
            return Err(GreenError::constraint(
                "eps_admissible",
                format!("(δ+√(δ²−1))·ε = {:.7} exceeds ε′ = {eps_prime}", r * eps),
            ));
        }
        Ok(CuspGeometry {
            eps,
            eps_prime,
            delta,
            min_c,
            count_pm1,
        })
    }

    pub fn eps(&self) -> f64 {
        self.eps
    }
    pub fn eps_prime(&self) -> f64 {
        self.eps_prime
    }
    pub fn delta(&self) -> f64 {
        self.delta
    }
    pub fn min_c(&self) -> f64 {
        self.min_c
    }
    pub fn count_pm1(&self) -> u32 {
        self.count_pm1
    }
}

/// Which pair of neighbourhoods `z` and `w` lie in.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum CuspCase {
    /// `z` near the cusp, `w` away from it.
    #[serde(rename = "a")]
    A,
    /// `w` near the cusp, `z` away from it.
    #[serde(rename = "a_prime")]
    APrime,
    /// `z` and `w` near two distinct cusps.
    #[serde(rename = "b")]
    B,
    /// `z` and `w` near the same cusp.
    #[serde(rename = "c")]
    C,
}

impl fmt::Display for CuspCase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CuspCase::A => "a",
            CuspCase::APrime => "a_prime",
            CuspCase::B => "b",
            CuspCase::C => "c",
        })
    }
}

impl std::str::FromStr for CuspCase {
    type Err = GreenError;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "a" => Ok(CuspCase::A),
            "a_prime" | "a'" => Ok(CuspCase::APrime),
            "b" => Ok(CuspCase::B),
            "c" => Ok(CuspCase::C),
            _ => Err(GreenError::constraint("cusp_case", format!("unknown case {s:?}, expected a, a_prime, b or c"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CuspBoundReport {
    pub case: CuspCase,
    #[serde(rename = "base_A")]
    pub base_a: f64,
    #[serde(rename = "base_B")]
    pub base_b: f64,
    /// The quantity bounded, written out with its logarithmic corrections.
    pub offset_terms: String,
    #[serde(rename = "A_tilde")]
    pub a_tilde: Option<f64>,
    #[serde(rename = "B_tilde")]
    pub b_tilde: Option<f64>,
}

/// Shifts `A ≤ B` to the cusp neighbourhood described by `case`.
///
/// Case (b) subtracts `log(ε y_c(w))` with the width of the cusp of `z`.
pub fn extend_bounds(base: &BoundReport, geom: &CuspGeometry, case: CuspCase) -> Result<CuspBoundReport> {
    let geom = CuspGeometry::new(geom.eps, geom.eps_prime, geom.delta, geom.min_c, geom.count_pm1)?;
    if !(base.a <= base.b) {
        return Err(GreenError::constraint(
            "base_a_le_b",
            format!("need A ≤ B, got A = {}, B = {}", base.a, base.b),
        ));
    }
    let n = geom.count_pm1 as f64;
    let (offset_terms, tilde) = match case {
        CuspCase::A => ("gr(z,w) - (1/vol)*log(eps*y_c(z))".to_string(), None),
        CuspCase::APrime => ("gr(z,w) - (1/vol)*log(eps*y_c(w))".to_string(), None),
        CuspCase::B => (
            "gr(z,w) - (1/vol)*log(eps*y_c(z)) - (1/vol)*log(eps*y_c(w))".to_string(),
            None,
        ),
        CuspCase::C => {
            let arc = 1.0 - (2.0 / PI) * ((geom.delta - 1.0) / 2.0).sqrt().atan();
            let head = arc / geom.eps_prime;
            let r = geom.eps_prime * r_delta(geom.delta)?;
            (
                format!(
                    "gr(z,w) - {}*(1/(2*pi))*log|q_c(z) - q_c(w)| - (1/vol)*log(eps'*y_c(z)) - (1/vol)*log(eps'*y_c(w))",
                    geom.count_pm1
                ),
                Some((base.a + n * (head - r), base.b + n * (head + r))),
            )
        }
    };
    Ok(CuspBoundReport {
        case,
        base_a: base.a,
        base_b: base.b,
        offset_terms,
        a_tilde: tilde.map(|t| t.0),
        b_tilde: tilde.map(|t| t.1),
    })
}

/// Outcome of checking the separation lemma for the cusp at ∞ of SL₂(Z).
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SeparationReport {
    pub part_a_pairs: usize,
    pub part_b_pairs: usize,
    /// Smallest `u(z, γw)` seen in part (b), or `None` if no `γ` came within the search radius.
    pub part_b_min_u: Option<f64>,
    pub counterexamples: Vec<String>,
}

impl SeparationReport {
    pub fn holds(&self) -> bool {
        self.counterexamples.is_empty()
    }
}

/// `min_γ u(z, γw)` over `γ` with `u ≤ cap`, or `None`.
pub fn min_orbit_u(z: &UpperHalfPoint, w: &UpperHalfPoint, cap: f64) -> Option<f64> {
    orbit_representatives(z, w, cap)
        .into_iter()
        .map(|(_, u)| u)
        .min_by(f64::total_cmp)
}

/// Elements `γ ∉ Γ_∞` with `u(z, γw) < δ`.
pub fn part_a_violations(z: &UpperHalfPoint, w: &UpperHalfPoint, delta: f64) -> Vec<UnimodularMatrix> {
    orbit_representatives(z, w, delta)
        .into_iter()
        .filter(|(g, u)| *u < delta && g.c != 0)
        .map(|(g, _)| g)
        .collect()
}

/// Samples `samples` pairs for each part of the separation lemma with cusp ∞ of
/// SL₂(Z) (`y_c = Im`, stabilizer the upper triangular matrices) and returns
/// every counterexample found.
pub fn check_separation(delta: f64, eps: f64, eps_prime: f64, samples: usize, seed: u64) -> Result<SeparationReport> {
    CuspGeometry::new(eps, eps_prime, delta, 1.0, 2)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut report = SeparationReport {
        part_a_pairs: 0,
        part_b_pairs: 0,
        part_b_min_u: None,
        counterexamples: Vec::new(),
    };
    let high = |rng: &mut ChaCha8Rng, y_min: f64| -> Result<UpperHalfPoint> {
        let x = rng.gen_range(-0.5..0.5);
        let y = y_min * rng.gen_range(0.0f64..2.0).exp();
        UpperHalfPoint::new(x, y)
    };
    for _ in 0..samples {
        let z = high(&mut rng, 1.0 / eps_prime)?;
        let w = high(&mut rng, 1.0 / eps_prime)?;
        for g in part_a_violations(&z, &w, delta) {
            report.counterexamples.push(format!("part a: z = {z}, w = {w}, γ = {g}"));
        }
        report.part_a_pairs += 1;
    }
    for _ in 0..samples {
        let z = high(&mut rng, 1.0 / eps)?;
        // a point of the fundamental domain below height 1/ε′, moved by a random word
        let w0 = loop {
            let x = rng.gen_range(-0.5..0.5);
            let y = rng.gen_range(0.05..(1.0 / eps_prime));
            let p = UpperHalfPoint::new(x, y)?;
            let (r, _) = reduce_to_fundamental_domain(&p);
            if r.y() <= 1.0 / eps_prime {
                break r;
            }
        };
        let mut g = UnimodularMatrix::IDENTITY;
        for _ in 0..rng.gen_range(0..4) {
            let step = if rng.gen_bool(0.5) {
                UnimodularMatrix::S
            } else {
                UnimodularMatrix::translation(rng.gen_range(-2..=2))
            };
            g = step.mul(&g);
        }
        let w = mobius_apply(&g, &w0);
        if let Some(u) = min_orbit_u(&z, &w, delta) {
            if u < delta {
                report.counterexamples.push(format!("part b: z = {z}, w = {w}, u = {u}"));
            }
        }
        let m = min_orbit_u(&z, &w, 4.0 * delta);
        report.part_b_min_u = match (report.part_b_min_u, m) {
            (Some(a), Some(b)) => Some(a.min(b)),
            (a, b) => a.or(b),
        };
        report.part_b_pairs += 1;
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> ComplexValue {
        ComplexValue::new(re, im)
    }

    #[test]
    fn r_delta_examples() {
        let expected = (2f64.sqrt() + 0.6154797087).abs() / (24.0 * PI);
        assert!((r_delta(2.0).unwrap() - expected).abs() < 1e-9);
        assert!((r_delta(2.0).unwrap() - 0.026920).abs() < 1e-6);
        assert!((r_delta(1e12).unwrap() - 1.0 / 48.0).abs() < 1e-6);
        assert!(r_delta(1.0 + 1e-12).unwrap() > 1e3);
        assert!(r_delta(1.0).is_err());
    }

    #[test]
    fn poisson_kernel_examples() {
        assert_eq!(poisson_kernel(c(0.0, 0.0)).unwrap(), 1.0);
        assert!((poisson_kernel(c(0.5, 0.0)).unwrap() - 3.0).abs() < 1e-14);
        assert!(poisson_kernel(c(1.0, 0.0)).is_err());
        for zeta in [c(0.3, 0.4), c(-0.9, 0.0), c(0.0, 0.6)] {
            let f = |t: f64| poisson_rotated(t, zeta);
            let est = integrate(&f, 0.0, 1.0, &fine_settings(64)).unwrap();
            assert!((est.value - 1.0).abs() < 1e-10);
        }
    }

    fn lambda_series(xi: f64, t: f64) -> f64 {
        let mut sum = 0.0;
        let mut p = 1.0;
        for n in 1..2000 {
            p *= xi;
            sum += p * (2.0 * PI * n as f64 * t).sin() / n as f64;
            if p.abs() < 1e-18 {
                break;
            }
        }
        sum / PI
    }

    #[test]
    fn lambda_examples() {
        assert_eq!(lambda_xi(c(0.0, 0.0), 0.3).unwrap().norm(), 0.0);
        assert!(lambda_xi(c(0.7, 0.0), 0.0).unwrap().norm() < 1e-16);
        let v = lambda_xi(c(0.5, 0.0), 0.25).unwrap();
        assert!(v.im.abs() < 1e-15);
        assert!((v.re - lambda_series(0.5, 0.25)).abs() < 1e-10);
        assert!((v.re - 0.5f64.atan() / PI).abs() < 1e-14);
        for (xi, t) in [(0.9, 0.1), (-0.5, 0.37), (0.2, 3.9)] {
            assert!((lambda_xi(c(xi, 0.0), t).unwrap().re - lambda_series(xi, t)).abs() < 1e-10);
        }
        assert!(lambda_xi(c(0.0, 1.0), 0.1).is_err());
    }

    #[test]
    fn lambda_integral_grid() {
        for xi in [-0.5, 0.0, 0.5, 0.9] {
            for t in [0.1, 0.5, 1.0, 10.0] {
                let (lhs, bound) = lambda_integral_check(xi, t).unwrap();
                assert!(lhs <= bound, "ξ = {xi}, t = {t}: {lhs} > {bound}");
            }
        }
        assert!(lambda_integral_check(0.0, 1.0).unwrap().0 < 1e-12);
    }

    #[test]
    fn n_delta_eps_bracket_grid() {
        let xis = [c(0.0, 0.0), c(0.5, 0.0), c(-0.5, 0.0), c(0.9, 0.0), c(0.0, 0.5)];
        for delta in [1.5, 2.0, 3.0] {
            for eps in [0.05, 0.1, 0.3] {
                let r = r_delta(delta).unwrap();
                for xi in xis {
                    let n = n_delta_eps(delta, eps, xi).unwrap();
                    let gap = (n - n_delta_eps_centre(delta, eps, xi)).abs();
                    assert!(gap <= eps * r, "δ = {delta}, ε = {eps}, ξ = {xi}: {gap} > {}", eps * r);
                }
            }
        }
    }

    #[test]
    fn n_delta_eps_examples() {
        let n = n_delta_eps(2.0, 0.3, c(0.5, 0.0)).unwrap();
        let centre = (1.0 / 0.3) * (2.0 / PI) * 0.5f64.sqrt().atan() - 0.5f64.ln() / (2.0 * PI);
        assert!((n - centre).abs() <= 0.3 * r_delta(2.0).unwrap());

        // λ(0, t) = 0, so only the arctan term survives
        let n0 = n_delta_eps(2.0, 0.1, c(0.0, 0.0)).unwrap();
        assert!((n0 - (2.0 / (PI * 0.1)) * 0.5f64.sqrt().atan()).abs() < 1e-9);

        assert!(n_delta_eps(2.0, 1e12, c(0.5, 0.0)).unwrap().abs() < 1e-9);
        assert!(n_delta_eps(1.0, 0.1, c(0.0, 0.0)).is_err());
    }

    #[test]
    fn admissible_eps_examples() {
        let (ep, e) = admissible_eps(2.0, 1.0).unwrap();
        assert!((ep - 0.5176381).abs() < 1e-7);
        assert!((e - 0.1387007).abs() < 1e-7);
        assert!((admissible_eps(1.0 + 1e-14, 1.0).unwrap().0 - 1.0).abs() < 1e-6);
        let (ep2, _) = admissible_eps(2.0, 2.0).unwrap();
        assert!((ep2 - 2.0 * ep).abs() < 1e-15);
    }

    #[test]
    fn geometry_validation() {
        assert!(CuspGeometry::new(0.05, 0.2, 2.0, 1.0, 2).is_ok());
        let (ep, e) = admissible_eps(2.0, 1.0).unwrap();
        assert!(CuspGeometry::new(e, ep, 2.0, 1.0, 2).is_ok());
        let err = CuspGeometry::new(0.05, 0.6, 2.0, 1.0, 2).unwrap_err();
        assert!(matches!(err, GreenError::Constraint { constraint: "eps_prime_admissible", .. }));
        let err = CuspGeometry::new(0.1, 0.2, 2.0, 1.0, 2).unwrap_err();
        assert!(matches!(err, GreenError::Constraint { constraint: "eps_admissible", .. }));
        assert!(CuspGeometry::new(0.2, 0.1, 2.0, 1.0, 2).is_err());
        assert!(CuspGeometry::new(0.05, 0.2, 2.0, 1.0, 3).is_err());
    }

    fn base(a: f64, b: f64) -> BoundReport {
        BoundReport {
            q_plus: 0.0,
            q_minus: 0.0,
            d_plus: 0.0,
            d_minus: 0.0,
            n_bar: 2.0,
            spectral_factor: 1.0,
            a,
            b,
            mode: crate::bounds::ArithmeticMode::TheoremExact,
        }
    }

    #[test]
    fn extend_case_c_example() {
        let geom = CuspGeometry::new(0.05, 0.2, 2.0, 1.0, 2).unwrap();
        let r = extend_bounds(&base(-100.0, 50.0), &geom, CuspCase::C).unwrap();
        assert!((r.a_tilde.unwrap() - (-100.0 + 6.070962)).abs() < 1e-5);
        assert!((r.b_tilde.unwrap() - (50.0 + 6.092498)).abs() < 1e-5);
        let widened = (r.b_tilde.unwrap() - r.a_tilde.unwrap()) - 150.0;
        assert!((widened - 2.0 * 2.0 * 0.2 * r_delta(2.0).unwrap()).abs() < 1e-12);
        assert!(r.offset_terms.contains("log|q_c(z) - q_c(w)|"));
    }

    #[test]
    fn extend_other_cases() {
        let geom = CuspGeometry::new(0.05, 0.2, 2.0, 1.0, 2).unwrap();
        let r = extend_bounds(&base(-3.0, 4.0), &geom, CuspCase::A).unwrap();
        assert_eq!((r.base_a, r.base_b, r.a_tilde, r.b_tilde), (-3.0, 4.0, None, None));
        assert!(r.offset_terms.contains("log(eps*y_c(z))"));
        let r = extend_bounds(&base(-3.0, 4.0), &geom, CuspCase::APrime).unwrap();
        assert!(r.offset_terms.contains("log(eps*y_c(w))"));
        let r = extend_bounds(&base(-3.0, 4.0), &geom, CuspCase::B).unwrap();
        assert!(r.offset_terms.contains("y_c(z)") && r.offset_terms.contains("y_c(w)"));
        assert!(extend_bounds(&base(4.0, -3.0), &geom, CuspCase::C).is_err());
    }

    #[test]
    fn separation_examples() {
        let z = UpperHalfPoint::new(0.0, 3.0).unwrap();
        let reps = orbit_representatives(&z, &z, 2.0);
        assert!(!reps.is_empty());
        for (g, u) in reps {
            if u < 2.0 {
                assert_eq!(g.c, 0, "{g}");
            }
        }

        let z = UpperHalfPoint::new(0.0, 10.0).unwrap();
        let w = UpperHalfPoint::new(0.3, 0.5).unwrap();
        let m = min_orbit_u(&z, &w, 8.0).unwrap();
        assert!(m >= 2.0, "{m}");

        assert!(check_separation(2.0, 0.05, 0.6, 5, 1).is_err());
        let r = check_separation(2.0, 0.1, 0.5, 40, 7).unwrap();
        assert!(r.holds(), "{:?}", r.counterexamples);
        assert_eq!((r.part_a_pairs, r.part_b_pairs), (40, 40));
    }

    #[test]
    fn separation_is_sharp_without_admissibility() {
        // with ε′ far too large, a pair near height 1 sees S within u < δ
        let z = UpperHalfPoint::new(0.0, 1.0).unwrap();
        assert!(!part_a_violations(&z, &z, 2.0).is_empty());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(10))]

        #[test]
        fn poisson_convolution_identity(
            r1 in 0.0f64..0.8, a1 in 0.0f64..(2.0 * PI),
            r2 in 0.0f64..0.8, a2 in 0.0f64..(2.0 * PI),
        ) {
            let zeta = ComplexValue::from_polar(r1, a1);
            let eta = ComplexValue::from_polar(r2, a2);
            let lhs = poisson_convolution(zeta, eta).unwrap();
            let rhs = poisson_kernel(zeta * eta).unwrap();
            prop_assert!((lhs - rhs).abs() < 1e-8);
        }
    }
}
