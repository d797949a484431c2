//! Randomized inequality suites, runnable from a release binary.
//!
//! Each suite draws its samples from a seeded generator and reports every
//! violation it finds, so a run is reproducible from its seed.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::cusps::{check_separation, lambda_integral_check, n_delta_eps, n_delta_eps_centre, poisson_convolution, poisson_kernel, r_delta};
use crate::geom::{mobius_apply, point_u, u_of_gamma, Rectangle, UnimodularMatrix, UpperHalfPoint};
use crate::lattice::{count_bound, exact_count};
use crate::specfun::{
    gamma_ratio_bounds, legendre_p_neg1, legendre_p_negm, legendre_q_deriv, log_gamma_complex, p_sigma, StripParameter,
};
use crate::transforms::{h_u, h_u_pm, t_of_u, v_of_u, Sign, TrapezoidParams};
use crate::ComplexValue;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SuiteResult {
    pub name: &'static str,
    pub samples: usize,
    /// Up to ten failing samples, rendered.
    pub violations: Vec<String>,
    pub violation_count: usize,
}

impl SuiteResult {
    pub fn passed(&self) -> bool {
        self.violation_count == 0
    }
}

fn collect(name: &'static str, outcomes: Vec<Option<String>>) -> SuiteResult {
    let samples = outcomes.len();
    let failures: Vec<String> = outcomes.into_iter().flatten().collect();
    SuiteResult {
        name,
        samples,
        violation_count: failures.len(),
        violations: failures.into_iter().take(10).collect(),
    }
}

fn c(re: f64, im: f64) -> ComplexValue {
    ComplexValue::new(re, im)
}

/// Draws `n` items from a generator seeded with `seed` and checks them in parallel.
fn sampled<T, G, F>(name: &'static str, seed: u64, n: usize, mut draw: G, check: F) -> SuiteResult
where
    T: Send + Sync,
    G: FnMut(&mut ChaCha8Rng) -> T,
    F: Fn(&T) -> Option<String> + Sync + Send,
{
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let items: Vec<T> = (0..n).map(|_| draw(&mut rng)).collect();
    collect(name, items.par_iter().map(check).collect())
}

/// `(2 − 4/π)√((u−1)/(u+1)) ≤ P^{−1}_{s−1}(u) ≤ (4/π)√((u−1)/(u+1))` for
/// `1 < u < 3`, `λ = s(1−s) ≤ 1/(2(u−1))`, real `λ`.
pub fn p_neg1_bracket(seed: u64, n: usize) -> SuiteResult {
    sampled(
        "P-1 bracket",
        seed,
        n,
        |r| {
            let u: f64 = 1.0 + r.gen_range(1e-9..2.0);
            let lambda: f64 = r.gen_range(0.0..=1.0) * 0.5 / (u - 1.0);
            (u, lambda)
        },
        |&(u, lambda)| {
            let s = if lambda <= 0.25 {
                c(0.5 + (0.25 - lambda).sqrt(), 0.0)
            } else {
                c(0.5, (lambda - 0.25).sqrt())
            };
            let root = ((u - 1.0) / (u + 1.0)).sqrt();
            let v = match legendre_p_neg1(s, u) {
                Ok(v) => v.re,
                Err(e) => return Some(format!("u = {u}, λ = {lambda}: {e}")),
            };
            let ok = (2.0 - 4.0 / PI) * root <= v + 1e-14 && v <= 4.0 / PI * root + 1e-14;
            (!ok).then(|| format!("u = {u}, λ = {lambda}: P = {v}"))
        },
    )
}

/// `−(2/(u+1))^ν/(u²−1) ≤ Q′_ν(u) ≤ 0`.
pub fn q_deriv_bracket(seed: u64, n: usize) -> SuiteResult {
    sampled(
        "Q' bracket",
        seed,
        n,
        |r| (r.gen_range(0.0..=10.0), 1.0 + r.gen_range(1e-6..=99.0)),
        |&(nu, u)| {
            let v = match legendre_q_deriv(nu, u) {
                Ok(v) => v,
                Err(e) => return Some(format!("ν = {nu}, u = {u}: {e}")),
            };
            let lower = -(2.0 / (u + 1.0)).powf(nu) / (u * u - 1.0);
            let ok = v <= 0.0 && lower <= v * (1.0 - 1e-13);
            (!ok).then(|| format!("ν = {nu}, u = {u}: Q' = {v}, lower {lower}"))
        },
    )
}

/// `|P^{−2}_{s−1}(u)| ≤ |s(1−s)|^{−5/4} p_σ(u)/(u²−1)` on `s = 1/2 + it`.
pub fn p2_regular_bound(seed: u64, n: usize) -> SuiteResult {
    sampled(
        "P-2 regular bound",
        seed,
        n,
        |r| {
            let sigma = [0.1, 0.25, 0.306, 0.45][r.gen_range(0..4)];
            (sigma, r.gen_range(0.01..=50.0), 1.0 + r.gen_range(1e-9..=99.0))
        },
        |&(sigma, t, u)| {
            let sp = StripParameter::new(sigma).ok()?;
            let s = c(0.5, t);
            let v = match legendre_p_negm(2, s, u) {
                Ok(v) => v.norm(),
                Err(e) => return Some(format!("σ = {sigma}, t = {t}, u = {u}: {e}")),
            };
            let bound = (s * (1.0 - s)).norm().powf(-1.25) * p_sigma(&sp, u).ok()? / (u * u - 1.0);
            (v > bound).then(|| format!("σ = {sigma}, t = {t}, u = {u}: |P| = {v} > {bound}"))
        },
    )
}

/// The bracket on `|Γ(a+iy)/Γ(b+iy)|` against `exp(Re(log Γ(a+iy) − log Γ(b+iy)))`.
pub fn gamma_ratio_sandwich(seed: u64, n: usize) -> SuiteResult {
    sampled(
        "gamma quotient sandwich",
        seed,
        n,
        |r| {
            let a = r.gen_range(0.1..=5.0);
            (a, a + r.gen_range(0.0..=5.0), r.gen_range(-50.0..=50.0))
        },
        |&(a, b, y)| {
            let (lo, hi) = gamma_ratio_bounds(a, b, y).ok()?;
            let truth = (log_gamma_complex(c(a, y)).ok()? - log_gamma_complex(c(b, y)).ok()?).re.exp();
            let ok = lo <= hi && lo <= truth * (1.0 + 1e-10) && truth <= hi * (1.0 + 1e-10);
            (!ok).then(|| format!("a = {a}, b = {b}, y = {y}: {lo} ≤ {truth} ≤ {hi} fails"))
        },
    )
}

/// `(4π − 8)(U − 1) ≤ h_U(s) ≤ 8(U − 1)` for real `s`, `λ(U−1) ≤ 1/2`, `U < 3`.
pub fn h_u_bracket(seed: u64, n: usize) -> SuiteResult {
    sampled(
        "h_U bracket",
        seed,
        n,
        |r| (r.gen_range(1.01..3.0), r.gen_range(0.5..=1.0)),
        |&(u, s_re)| {
            if s_re * (1.0 - s_re) * (u - 1.0) > 0.5 {
                return None;
            }
            let h = match h_u(c(s_re, 0.0), u) {
                Ok(h) => h.re,
                Err(e) => return Some(format!("U = {u}, s = {s_re}: {e}")),
            };
            let ok = (4.0 * PI - 8.0) * (u - 1.0) <= h * (1.0 + 1e-13) && h <= 8.0 * (u - 1.0) * (1.0 + 1e-13);
            (!ok).then(|| format!("U = {u}, s = {s_re}: h = {h}"))
        },
    )
}

pub fn lambda_integral_grid() -> SuiteResult {
    let pts: Vec<(f64, f64)> = [-0.5, 0.0, 0.5, 0.9]
        .iter()
        .flat_map(|&xi| [0.1, 0.5, 1.0, 10.0].map(|t| (xi, t)))
        .collect();
    collect(
        "lambda integral",
        pts.par_iter()
            .map(|&(xi, t)| match lambda_integral_check(xi, t) {
                Ok((lhs, bound)) => (lhs > bound).then(|| format!("ξ = {xi}, t = {t}: {lhs} > {bound}")),
                Err(e) => Some(format!("ξ = {xi}, t = {t}: {e}")),
            })
            .collect(),
    )
}

/// `|N_{δ,ε}(ξ) − (2/πε) arctan √((δ−1)/2) + (1/2π) log|1−ξ|| ≤ ε r_δ` on a 5×5×5 grid.
pub fn bounds_n_grid() -> SuiteResult {
    let xis = [c(0.0, 0.0), c(0.5, 0.0), c(-0.5, 0.0), c(0.9, 0.0), c(0.0, 0.5)];
    let mut pts = Vec::new();
    for delta in [1.5, 2.0, 3.0, 5.0, 10.0] {
        for eps in [0.05, 0.1, 0.2, 0.3, 0.5] {
            for xi in xis {
                pts.push((delta, eps, xi));
            }
        }
    }
    collect(
        "N bracket",
        pts.par_iter()
            .map(|&(delta, eps, xi)| {
                let n = match n_delta_eps(delta, eps, xi) {
                    Ok(n) => n,
                    Err(e) => return Some(format!("δ = {delta}, ε = {eps}, ξ = {xi}: {e}")),
                };
                let gap = (n - n_delta_eps_centre(delta, eps, xi)).abs();
                let bound = eps * r_delta(delta).ok()?;
                (gap > bound).then(|| format!("δ = {delta}, ε = {eps}, ξ = {xi}: {gap} > {bound}"))
            })
            .collect(),
    )
}

pub fn poisson_convolution_suite(seed: u64, n: usize) -> SuiteResult {
    sampled(
        "Poisson convolution",
        seed,
        n,
        |r| {
            (
                ComplexValue::from_polar(r.gen_range(0.0..=0.8), r.gen_range(0.0..2.0 * PI)),
                ComplexValue::from_polar(r.gen_range(0.0..=0.8), r.gen_range(0.0..2.0 * PI)),
            )
        },
        |&(zeta, eta)| {
            let lhs = match poisson_convolution(zeta, eta) {
                Ok(v) => v,
                Err(e) => return Some(format!("ζ = {zeta}, η = {eta}: {e}")),
            };
            let rhs = poisson_kernel(zeta * eta).ok()?;
            ((lhs - rhs).abs() > 1e-8).then(|| format!("ζ = {zeta}, η = {eta}: {lhs} vs {rhs}"))
        },
    )
}

/// Separation lemma on `n` random admissible `(δ, ε, ε′)`, 10 pairs per part each.
pub fn separation_suite(seed: u64, n: usize) -> SuiteResult {
    sampled(
        "separation lemma",
        seed,
        n,
        |r| {
            let delta: f64 = r.gen_range(1.05..4.0);
            let rho = delta + (delta * delta - 1.0).sqrt();
            let eps_prime: f64 = r.gen_range(0.2..=1.0) / rho.sqrt();
            let eps = eps_prime / rho * r.gen_range(0.2..=1.0);
            (delta, eps, eps_prime, r.gen::<u64>())
        },
        |&(delta, eps, eps_prime, sub)| match check_separation(delta, eps, eps_prime, 10, sub) {
            Ok(rep) if rep.holds() => None,
            Ok(rep) => Some(rep.counterexamples.join("; ")),
            Err(e) => Some(format!("δ = {delta}, ε = {eps}, ε′ = {eps_prime}: {e}")),
        },
    )
}

fn random_unimodular(r: &mut ChaCha8Rng) -> UnimodularMatrix {
    let mut g = UnimodularMatrix::IDENTITY;
    for _ in 0..r.gen_range(0..6) {
        let step = if r.gen_bool(0.5) {
            UnimodularMatrix::S
        } else {
            UnimodularMatrix::translation(r.gen_range(-3..=3))
        };
        g = step.mul(&g);
    }
    g
}

/// `u_of_gamma(γ, z)` against `point_u(z, γz)`.
pub fn u_of_gamma_oracle(seed: u64, n: usize) -> SuiteResult {
    sampled(
        "u(z, γz) vs Möbius",
        seed,
        n,
        |r| (random_unimodular(r), r.gen_range(-2.0..2.0), r.gen_range(0.2..5.0)),
        |&(g, x, y)| {
            let z = UpperHalfPoint::new(x, y).ok()?;
            let a = u_of_gamma(&g, &z);
            let b = point_u(&z, &mobius_apply(&g, &z));
            ((a - b).abs() > 1e-12 * a.max(b)).then(|| format!("γ = {g}, z = {z}: {a} vs {b}"))
        },
    )
}

/// `N(z, z, U)` never exceeds the grid bound of a cell containing `z`.
pub fn count_soundness(seed: u64, n: usize) -> SuiteResult {
    let region = Rectangle::y0();
    let cert = count_bound(&region, 17.0, (10, 10));
    sampled(
        "exact count ≤ grid bound",
        seed,
        n,
        |r| {
            (
                r.gen_range(region.x_min()..=region.x_max()),
                r.gen_range(region.y_min()..=region.y_max()),
            )
        },
        |&(x, y)| {
            let z = UpperHalfPoint::new(x, y).ok()?;
            let k = exact_count(&z, &z, 17.0);
            (k > cert.bound).then(|| format!("z = {z}: N = {k} > {}", cert.bound))
        },
    )
}

/// `h_U^±(1)` against the trapezoid areas and `P^{−2}_0(u)` against `(u−1)/(2u+2)`.
pub fn closed_forms() -> SuiteResult {
    let mut out = Vec::new();
    let p = TrapezoidParams::new(2.0, 0.0366, 2.72, 2.96e-3, 0.668).expect("valid");
    for u in [2.0, 3.0, 5.0, 17.0, 100.0] {
        let (v, t) = (v_of_u(&p, u).unwrap_or(f64::NAN), t_of_u(&p, u).unwrap_or(f64::NAN));
        for (sign, area) in [
            (Sign::Plus, 2.0 * PI * (u - 1.0) + PI * (v - u)),
            (Sign::Minus, 2.0 * PI * (u - 1.0) - PI * (u - t)),
        ] {
            out.push(match h_u_pm(&p, sign, c(1.0, 0.0), u) {
                Ok(h) => ((h.re - area).abs() > 1e-10 * area).then(|| format!("h_U{sign}(1) at U = {u}: {} vs {area}", h.re)),
                Err(e) => Some(format!("h_U{sign}(1) at U = {u}: {e}")),
            });
        }
    }
    for k in 0..40 {
        let u = 1.0 + 1e-3 * 1.5f64.powi(k);
        let want = (u - 1.0) / (2.0 * u + 2.0);
        out.push(match legendre_p_negm(2, c(1.0, 0.0), u) {
            Ok(v) => ((v.re - want).abs() > 1e-12 * want).then(|| format!("P(2, 1, {u}) = {} vs {want}", v.re)),
            Err(e) => Some(format!("P(2, 1, {u}): {e}")),
        });
    }
    collect("closed forms", out)
}

/// Every suite, with sample counts matching the unit tests.
pub fn run_all(seed: u64) -> Vec<SuiteResult> {
    vec![
        p_neg1_bracket(seed, 500),
        q_deriv_bracket(seed.wrapping_add(1), 500),
        p2_regular_bound(seed.wrapping_add(2), 300),
        gamma_ratio_sandwich(seed.wrapping_add(3), 1000),
        h_u_bracket(seed.wrapping_add(4), 300),
        lambda_integral_grid(),
        bounds_n_grid(),
        poisson_convolution_suite(seed.wrapping_add(5), 10),
        separation_suite(seed.wrapping_add(6), 50),
        u_of_gamma_oracle(seed.wrapping_add(7), 1000),
        count_soundness(seed.wrapping_add(8), 200),
        closed_forms(),
    ]
}
