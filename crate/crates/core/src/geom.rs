//! Hyperbolic-plane primitives: points, the invariant `u(z, w) = cosh d(z, w)`,
//! Möbius actions of unimodular matrices and the logarithmic kernels `L`, `J_δ`.

use std::f64::consts::PI;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{GreenError, Result};

/// A point `x + iy` of the upper half-plane.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct UpperHalfPoint {
    x: f64,
    y: f64,
}

impl UpperHalfPoint {
    pub fn new(x: f64, y: f64) -> Result<Self> {
        if !x.is_finite() || !y.is_finite() || y <= 0.0 {
            return Err(GreenError::domain(
                "UpperHalfPoint",
                format!("need finite x and y > 0, got ({x}, {y})"),
            ));
        }
        Ok(UpperHalfPoint { x, y })
    }

    /// The point `i`.
    pub fn i() -> Self {
        UpperHalfPoint { x: 0.0, y: 1.0 }
    }

    pub fn x(&self) -> f64 {
        self.x
    }

    pub fn y(&self) -> f64 {
        self.y
    }
}

impl fmt::Display for UpperHalfPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}+{}i", self.x, self.y)
    }
}

/// An integer matrix `(a b; c d)` with determinant one.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct UnimodularMatrix {
    pub a: i64,
    pub b: i64,
    pub c: i64,
    pub d: i64,
}

impl UnimodularMatrix {
    pub fn new(a: i64, b: i64, c: i64, d: i64) -> Result<Self> {
        let det = (a as i128) * (d as i128) - (b as i128) * (c as i128);
        if det != 1 {
            return Err(GreenError::domain(
                "UnimodularMatrix",
                format!("determinant of ({a} {b}; {c} {d}) is {det}, not 1"),
            ));
        }
        Ok(UnimodularMatrix { a, b, c, d })
    }

    pub const IDENTITY: UnimodularMatrix = UnimodularMatrix { a: 1, b: 0, c: 0, d: 1 };
    /// `z ↦ −1/z`
    pub const S: UnimodularMatrix = UnimodularMatrix { a: 0, b: -1, c: 1, d: 0 };
    /// `z ↦ z + 1`
    pub const T: UnimodularMatrix = UnimodularMatrix { a: 1, b: 1, c: 0, d: 1 };

    /// The translation `z ↦ z + b`.
    pub fn translation(b: i64) -> Self {
        UnimodularMatrix { a: 1, b, c: 0, d: 1 }
    }

    pub fn negate(&self) -> Self {
        UnimodularMatrix {
            a: -self.a,
            b: -self.b,
            c: -self.c,
            d: -self.d,
        }
    }

    pub fn inverse(&self) -> Self {
        UnimodularMatrix {
            a: self.d,
            b: -self.b,
            c: -self.c,
            d: self.a,
        }
    }

    pub fn mul(&self, other: &UnimodularMatrix) -> Self {
        UnimodularMatrix {
            a: self.a * other.a + self.b * other.c,
            b: self.a * other.b + self.b * other.d,
            c: self.c * other.a + self.d * other.c,
            d: self.c * other.b + self.d * other.d,
        }
    }

    /// Representative of `±γ` with `c > 0`, or `c = 0` and `a = d = 1`.
    pub fn normalized(&self) -> Self {
        if self.c < 0 || (self.c == 0 && self.a < 0) {
            self.negate()
        } else {
            *self
        }
    }
}

impl fmt::Display for UnimodularMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({} {}; {} {})", self.a, self.b, self.c, self.d)
    }
}

/// Closed coordinate rectangle `[x_min, x_max] × [y_min, y_max]` in the upper half-plane.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Rectangle {
    x_min: f64,
    x_max: f64,
    y_min: f64,
    y_max: f64,
}

impl Rectangle {
    pub fn new(x_min: f64, x_max: f64, y_min: f64, y_max: f64) -> Result<Self> {
        let all_finite = [x_min, x_max, y_min, y_max].iter().all(|v| v.is_finite());
        if !all_finite {
            return Err(GreenError::domain("Rectangle", "coordinates must be finite"));
        }
        if x_min > x_max {
            return Err(GreenError::domain(
                "Rectangle",
                format!("x_min = {x_min} exceeds x_max = {x_max}"),
            ));
        }
        if y_min <= 0.0 {
            return Err(GreenError::domain(
                "Rectangle",
                format!("y_min = {y_min} must be positive"),
            ));
        }
        if y_min > y_max {
            return Err(GreenError::domain(
                "Rectangle",
                format!("y_min = {y_min} exceeds y_max = {y_max}"),
            ));
        }
        Ok(Rectangle {
            x_min,
            x_max,
            y_min,
            y_max,
        })
    }

    /// The degenerate rectangle `{z}`.
    pub fn point(z: UpperHalfPoint) -> Self {
        Rectangle {
            x_min: z.x,
            x_max: z.x,
            y_min: z.y,
            y_max: z.y,
        }
    }

    /// `[−1/2, 1/2] × [√3/2, 2]`, whose image in the modular curve is the
    /// complement of a disc around the cusp.
    pub fn y0() -> Self {
        Rectangle {
            x_min: -0.5,
            x_max: 0.5,
            y_min: 3f64.sqrt() / 2.0,
            y_max: 2.0,
        }
    }

    pub fn x_min(&self) -> f64 {
        self.x_min
    }
    pub fn x_max(&self) -> f64 {
        self.x_max
    }
    pub fn y_min(&self) -> f64 {
        self.y_min
    }
    pub fn y_max(&self) -> f64 {
        self.y_max
    }

    pub fn contains(&self, z: &UpperHalfPoint) -> bool {
        z.x >= self.x_min && z.x <= self.x_max && z.y >= self.y_min && z.y <= self.y_max
    }

    /// Cell `(ix, iy)` of an `nx × ny` subdivision. Cells share their edges.
    pub fn cell(&self, nx: usize, ny: usize, ix: usize, iy: usize) -> Rectangle {
        let dx = (self.x_max - self.x_min) / nx as f64;
        let dy = (self.y_max - self.y_min) / ny as f64;
        let x0 = self.x_min + dx * ix as f64;
        let y0 = self.y_min + dy * iy as f64;
        let x1 = if ix + 1 == nx { self.x_max } else { x0 + dx };
        let y1 = if iy + 1 == ny { self.y_max } else { y0 + dy };
        Rectangle {
            x_min: x0,
            x_max: x1,
            y_min: y0,
            y_max: y1,
        }
    }
}

/// `u(z, w) = 1 + |z − w|² / (2 Im z Im w)`, the hyperbolic cosine of the distance.
pub fn point_u(z: &UpperHalfPoint, w: &UpperHalfPoint) -> f64 {
    let dx = z.x - w.x;
    let dy = z.y - w.y;
    1.0 + (dx * dx + dy * dy) / (2.0 * z.y * w.y)
}

/// `(a z + b) / (c z + d)`.
pub fn mobius_apply(g: &UnimodularMatrix, z: &UpperHalfPoint) -> UpperHalfPoint {
    let (a, b, c, d) = (g.a as f64, g.b as f64, g.c as f64, g.d as f64);
    // (az+b)(c z̄+d) / |cz+d|²
    let den_re = c * z.x + d;
    let den_im = c * z.y;
    let norm = den_re * den_re + den_im * den_im;
    let num_re = a * z.x + b;
    let num_im = a * z.y;
    let re = (num_re * den_re + num_im * den_im) / norm;
    UpperHalfPoint {
        x: re,
        y: z.y / norm,
    }
}

/// `u(z, γz)` from the matrix entries directly.
pub fn u_of_gamma(g: &UnimodularMatrix, z: &UpperHalfPoint) -> f64 {
    let (a, b, c, d) = (g.a as f64, g.b as f64, g.c as f64, g.d as f64);
    let (x, y) = (z.x, z.y);
    let p = a - c * x;
    let w = (b + (a - d) * x - c * x * x) / y;
    let q = c * y;
    let r = d + c * x;
    0.5 * (p * p + w * w + q * q + r * r)
}

/// `L(u) = (1/4π) log((u+1)/(u−1))`, the free-space Green kernel in terms of `u`.
pub fn kernel_l(u: f64) -> Result<f64> {
    if !(u > 1.0) || !u.is_finite() {
        return Err(GreenError::domain("kernel_L", format!("need u > 1, got {u}")));
    }
    Ok((2.0 / (u - 1.0)).ln_1p() / (4.0 * PI))
}

/// `J_δ(u) = max(0, L(u) − L(δ))`.
pub fn kernel_j(delta: f64, u: f64) -> Result<f64> {
    if !(delta > 1.0) {
        return Err(GreenError::domain("kernel_J", format!("need δ > 1, got {delta}")));
    }
    if !(u > 1.0) {
        return Err(GreenError::domain("kernel_J", format!("need u > 1, got {u}")));
    }
    if u >= delta {
        return Ok(0.0);
    }
    Ok((kernel_l(u)? - kernel_l(delta)?).max(0.0))
}

/// Moves `z` into the standard fundamental domain of SL₂(Z),
/// `|x| ≤ 1/2`, `|z| ≥ 1`. Returns the image and the matrix `γ` with `γz` equal to it.
pub fn reduce_to_fundamental_domain(z: &UpperHalfPoint) -> (UpperHalfPoint, UnimodularMatrix) {
    let mut g = UnimodularMatrix::IDENTITY;
    let mut w = *z;
    for _ in 0..10_000 {
        let shift = (-w.x).round() as i64;
        if shift != 0 {
            let t = UnimodularMatrix::translation(shift);
            g = t.mul(&g);
            w = mobius_apply(&t, &w);
        }
        if w.x * w.x + w.y * w.y < 1.0 - 1e-14 {
            g = UnimodularMatrix::S.mul(&g);
            w = mobius_apply(&UnimodularMatrix::S, &w);
        } else {
            break;
        }
    }
    (w, g)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn pt(x: f64, y: f64) -> UpperHalfPoint {
        UpperHalfPoint::new(x, y).unwrap()
    }

    #[test]
    fn u_examples() {
        assert_eq!(point_u(&UpperHalfPoint::i(), &UpperHalfPoint::i()), 1.0);
        assert!((point_u(&pt(0.0, 1.0), &pt(0.0, 2.0)) - 1.25).abs() < 1e-15);
    }

    #[test]
    fn mobius_examples() {
        let z = pt(0.3, 0.7);
        assert_eq!(mobius_apply(&UnimodularMatrix::IDENTITY, &z), z);
        let si = mobius_apply(&UnimodularMatrix::S, &UpperHalfPoint::i());
        assert!(si.x().abs() < 1e-15 && (si.y() - 1.0).abs() < 1e-15);
        let ti = mobius_apply(&UnimodularMatrix::T, &UpperHalfPoint::i());
        assert_eq!((ti.x(), ti.y()), (1.0, 1.0));
    }

    #[test]
    fn u_of_gamma_examples() {
        assert_eq!(u_of_gamma(&UnimodularMatrix::IDENTITY, &UpperHalfPoint::i()), 1.0);
        assert_eq!(u_of_gamma(&UnimodularMatrix::T, &UpperHalfPoint::i()), 1.5);
        let via_mobius = point_u(
            &UpperHalfPoint::i(),
            &mobius_apply(&UnimodularMatrix::T, &UpperHalfPoint::i()),
        );
        assert_eq!(via_mobius, 1.5);
    }

    #[test]
    fn kernel_values() {
        assert!((kernel_l(2.0).unwrap() - 3f64.ln() / (4.0 * PI)).abs() < 1e-15);
        assert!((kernel_l(2.0).unwrap() - 0.0874248).abs() < 1e-7);
        assert!((kernel_l(3.0).unwrap() - 0.0551589).abs() < 1e-7);
        assert!(kernel_l(1.0 + 1e-12).unwrap() > 2.0);
        assert!(kernel_l(1.0).is_err());
        assert!(kernel_l(0.5).is_err());
        assert!(kernel_l(f64::NAN).is_err());

        assert_eq!(kernel_j(2.0, 3.0).unwrap(), 0.0);
        assert_eq!(kernel_j(2.0, 2.0).unwrap(), 0.0);
        let expected = (5f64.ln() - 3f64.ln()) / (4.0 * PI);
        assert!((kernel_j(2.0, 1.5).unwrap() - expected).abs() < 1e-15);
        assert!((kernel_j(2.0, 1.5).unwrap() - 0.0406502).abs() < 1e-7);
        assert!(kernel_j(1.0, 1.5).is_err());
        assert!(kernel_j(2.0, 1.0).is_err());
    }

    #[test]
    fn invalid_inputs_rejected() {
        assert!(UpperHalfPoint::new(0.0, 0.0).is_err());
        assert!(UpperHalfPoint::new(0.0, -1.0).is_err());
        assert!(UnimodularMatrix::new(1, 1, 1, 1).is_err());
        assert!(UnimodularMatrix::new(2, 1, 1, 1).is_ok());
        assert!(Rectangle::new(0.0, 1.0, 0.0, 1.0).is_err());
        assert!(Rectangle::new(1.0, 0.0, 0.5, 1.0).is_err());
        assert!(Rectangle::new(0.0, 1.0, 2.0, 1.0).is_err());
    }

    #[test]
    fn cells_tile_the_rectangle() {
        let r = Rectangle::y0();
        let first = r.cell(4, 3, 0, 0);
        let last = r.cell(4, 3, 3, 2);
        assert_eq!(first.x_min(), r.x_min());
        assert_eq!(first.y_min(), r.y_min());
        assert_eq!(last.x_max(), r.x_max());
        assert_eq!(last.y_max(), r.y_max());
        assert_eq!(r.cell(4, 3, 1, 0).x_min(), first.x_max());
    }

    #[test]
    fn reduction_lands_in_fundamental_domain() {
        for &(x, y) in &[(0.3, 0.01), (-7.2, 0.2), (0.49, 0.9), (12.0, 3.0)] {
            let z = pt(x, y);
            let (w, g) = reduce_to_fundamental_domain(&z);
            assert!(w.x().abs() <= 0.5 + 1e-12);
            assert!(w.x() * w.x() + w.y() * w.y() >= 1.0 - 1e-12);
            let again = mobius_apply(&g, &z);
            assert!((again.x() - w.x()).abs() < 1e-9 && (again.y() - w.y()).abs() < 1e-9);
        }
    }

    fn matrix_strategy() -> impl Strategy<Value = UnimodularMatrix> {
        (-50i64..=50, -50i64..=50, -50i64..=50).prop_filter_map(
            "need a solvable determinant equation",
            |(a, c, seed)| {
                // complete (a, c) to a determinant-one matrix when coprime
                let (g, s, t) = ext_gcd(a, c);
                if g.abs() != 1 {
                    return None;
                }
                // a*s + c*t = g → a*(s*g) - b*c = 1 with b = -t*g
                let (d0, b0) = (s * g, -t * g);
                let d = d0 + seed * c;
                let b = b0 + seed * a;
                if d.abs() > 50 || b.abs() > 50 {
                    return None;
                }
                UnimodularMatrix::new(a, b, c, d).ok()
            },
        )
    }

    fn ext_gcd(a: i64, b: i64) -> (i64, i64, i64) {
        if b == 0 {
            (a, 1, 0)
        } else {
            let (g, x, y) = ext_gcd(b, a % b);
            (g, y, x - (a / b) * y)
        }
    }

    proptest! {
        #[test]
        fn u_of_gamma_matches_mobius(g in matrix_strategy(), x in -5.0f64..5.0, y in 0.1f64..10.0) {
            let z = pt(x, y);
            let direct = u_of_gamma(&g, &z);
            let oracle = point_u(&z, &mobius_apply(&g, &z));
            prop_assert!((direct - oracle).abs() <= 1e-12 * oracle);
            prop_assert_eq!(direct, u_of_gamma(&g.negate(), &z));
        }

        #[test]
        fn u_is_symmetric_and_at_least_one(x1 in -5.0f64..5.0, y1 in 0.01f64..10.0, x2 in -5.0f64..5.0, y2 in 0.01f64..10.0) {
            let (z, w) = (pt(x1, y1), pt(x2, y2));
            prop_assert_eq!(point_u(&z, &w), point_u(&w, &z));
            prop_assert!(point_u(&z, &w) >= 1.0);
            prop_assert_eq!(point_u(&z, &z), 1.0);
        }

        #[test]
        fn kernel_l_decreasing(u1 in 1.0001f64..100.0, gap in 1e-6f64..50.0) {
            prop_assert!(kernel_l(u1).unwrap() > kernel_l(u1 + gap).unwrap());
        }
    }
}
