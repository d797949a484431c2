//! Adaptive Simpson quadrature for real- and complex-valued integrands.

use std::ops::{Add, Mul, Sub};

use crate::error::{GreenError, Result};
use crate::ComplexValue;

/// Values that can be integrated: closed under addition and real scaling.
pub trait QuadValue: Copy + Add<Output = Self> + Sub<Output = Self> + Mul<f64, Output = Self> {
    fn zero() -> Self;
    fn magnitude(&self) -> f64;
}

impl QuadValue for f64 {
    fn zero() -> Self {
        0.0
    }
    fn magnitude(&self) -> f64 {
        self.abs()
    }
}

impl QuadValue for ComplexValue {
    fn zero() -> Self {
        ComplexValue::new(0.0, 0.0)
    }
    fn magnitude(&self) -> f64 {
        self.norm()
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QuadSettings {
    pub rel_tol: f64,
    pub abs_tol: f64,
    /// Number of equal panels the interval is split into before refinement.
    pub initial_panels: usize,
    pub max_depth: u32,
}

impl Default for QuadSettings {
    fn default() -> Self {
        QuadSettings {
            rel_tol: 1e-8,
            abs_tol: 1e-300,
            initial_panels: 16,
            max_depth: 48,
        }
    }
}

impl QuadSettings {
    pub fn with_rel_tol(mut self, rel_tol: f64) -> Self {
        self.rel_tol = rel_tol;
        self
    }

    pub fn with_abs_tol(mut self, abs_tol: f64) -> Self {
        self.abs_tol = abs_tol;
        self
    }

    pub fn with_panels(mut self, panels: usize) -> Self {
        self.initial_panels = panels.max(1);
        self
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Estimate<T> {
    pub value: T,
    /// Accumulated Richardson error estimate.
    pub error: f64,
    pub evaluations: usize,
}

struct Panel<T> {
    a: f64,
    b: f64,
    fa: T,
    fm: T,
    fb: T,
    whole: T,
}

struct Integrator<'f, T, F> {
    f: &'f F,
    tol: f64,
    max_depth: u32,
    evaluations: usize,
    error: f64,
    failed: bool,
    _marker: std::marker::PhantomData<T>,
}

impl<T: QuadValue, F: Fn(f64) -> T> Integrator<'_, T, F> {
    fn eval(&mut self, x: f64) -> T {
        self.evaluations += 1;
        (self.f)(x)
    }

    fn panel(&mut self, a: f64, b: f64, fa: T, fb: T) -> Panel<T> {
        let fm = self.eval(0.5 * (a + b));
        let whole = (fa + fm * 4.0 + fb) * ((b - a) / 6.0);
        Panel { a, b, fa, fm, fb, whole }
    }

    fn refine(&mut self, p: Panel<T>, tol: f64, depth: u32) -> T {
        let m = 0.5 * (p.a + p.b);
        let left = self.panel(p.a, m, p.fa, p.fm);
        let right = self.panel(m, p.b, p.fm, p.fb);
        let delta = left.whole + right.whole - p.whole;
        let err = delta.magnitude() / 15.0;
        if !err.is_finite() {
            self.failed = true;
            self.error = f64::INFINITY;
            return left.whole + right.whole;
        }
        if err <= tol || depth >= self.max_depth || (p.b - p.a) <= 4.0 * f64::EPSILON * p.a.abs().max(1.0) {
            if err > tol {
                self.failed = true;
            }
            self.error += err;
            return left.whole + right.whole + delta * (1.0 / 15.0);
        }
        self.refine(left, 0.5 * tol, depth + 1) + self.refine(right, 0.5 * tol, depth + 1)
    }
}

/// `∫_a^b f(x) dx` by adaptive Simpson with Richardson correction.
///
/// The tolerance is `max(abs_tol, rel_tol · |coarse estimate|)`, where the
/// coarse estimate is the composite Simpson sum over the initial panels.
pub fn integrate<T, F>(f: &F, a: f64, b: f64, settings: &QuadSettings) -> Result<Estimate<T>>
where
    T: QuadValue,
    F: Fn(f64) -> T,
{
    if !(a.is_finite() && b.is_finite()) {
        return Err(GreenError::domain("integrate", format!("bounds must be finite, got [{a}, {b}]")));
    }
    if a == b {
        return Ok(Estimate {
            value: T::zero(),
            error: 0.0,
            evaluations: 0,
        });
    }
    let mut it = Integrator {
        f,
        tol: 0.0,
        max_depth: settings.max_depth,
        evaluations: 0,
        error: 0.0,
        failed: false,
        _marker: std::marker::PhantomData,
    };
    let n = settings.initial_panels.max(1);
    let h = (b - a) / n as f64;
    let nodes: Vec<f64> = (0..=n).map(|k| if k == n { b } else { a + h * k as f64 }).collect();
    let values: Vec<T> = nodes.iter().map(|&x| it.eval(x)).collect();
    let panels: Vec<Panel<T>> = (0..n)
        .map(|k| it.panel(nodes[k], nodes[k + 1], values[k], values[k + 1]))
        .collect();
    let coarse = panels.iter().fold(T::zero(), |acc, p| acc + p.whole);
    if !coarse.magnitude().is_finite() {
        return Err(GreenError::no_convergence("integrate", format!("non-finite integrand on [{a}, {b}]")));
    }
    let scale = panels.iter().map(|p| p.whole.magnitude()).sum::<f64>().max(coarse.magnitude());
    it.tol = settings.abs_tol.max(settings.rel_tol * scale);
    let per_panel = it.tol / n as f64;
    let mut total = T::zero();
    for p in panels {
        total = total + it.refine(p, per_panel, 0);
    }
    if it.failed && !(it.error <= it.tol) {
        return Err(GreenError::no_convergence(
            "integrate",
            format!(
                "[{a}, {b}]: error estimate {:.3e} exceeds tolerance {:.3e} at maximum depth",
                it.error, it.tol
            ),
        ));
    }
    Ok(Estimate {
        value: total,
        error: it.error,
        evaluations: it.evaluations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn polynomials_are_exact() {
        let est = integrate(&|x: f64| x * x * x - 2.0 * x, 0.0, 2.0, &QuadSettings::default()).unwrap();
        assert!((est.value - 0.0).abs() < 1e-13);
    }

    #[test]
    fn smooth_integrals() {
        let s = QuadSettings::default().with_rel_tol(1e-12);
        let est = integrate(&|x: f64| x.sin(), 0.0, PI, &s).unwrap();
        assert!((est.value - 2.0).abs() < 1e-11);
        let est = integrate(&|x: f64| 1.0 / (1.0 + x * x), 0.0, 1.0, &s).unwrap();
        assert!((est.value - PI / 4.0).abs() < 1e-12);
    }

    #[test]
    fn complex_integrand() {
        let s = QuadSettings::default().with_rel_tol(1e-12);
        let est = integrate(&|t: f64| ComplexValue::new(0.0, 2.0 * PI * t).exp(), 0.0, 0.25, &s).unwrap();
        // ∫_0^{1/4} e^{2πit} dt = (i − 1)/(2πi) · ... = (1 + i)/(2π)
        assert!((est.value - ComplexValue::new(1.0, 1.0) / (2.0 * PI)).norm() < 1e-12);
    }

    #[test]
    fn empty_interval_and_bad_bounds() {
        let est = integrate(&|x: f64| x, 1.0, 1.0, &QuadSettings::default()).unwrap();
        assert_eq!(est.value, 0.0);
        assert!(integrate(&|x: f64| x, 0.0, f64::INFINITY, &QuadSettings::default()).is_err());
    }

    #[test]
    fn non_finite_integrand_fails_fast() {
        let s = QuadSettings::default();
        assert!(integrate(&|x: f64| if x > 0.5 { f64::NAN } else { x }, 0.0, 1.0, &s).is_err());
        let spike = |x: f64| if (x - 0.3).abs() < 1e-9 { f64::INFINITY } else { 1.0 };
        let _ = integrate(&spike, 0.0, 1.0, &s);
    }

    #[test]
    fn unresolvable_integrand_reports_failure() {
        let s = QuadSettings {
            max_depth: 3,
            initial_panels: 1,
            ..QuadSettings::default().with_rel_tol(1e-14)
        };
        assert!(integrate(&|x: f64| (1.0 / x).sin(), 1e-6, 1.0, &s).is_err());
    }
}
