//! Counting `N(z, w, U) = #{γ ∈ SL₂(Z) : u(z, γw) ≤ U}`.
//!
//! Two routes are provided: [`exact_count`] enumerates the orbit at a fixed
//! pair of points, and [`count_bound`] bounds `sup_{z ∈ R} N(z, z, U)` over a
//! rectangle by subdividing it into cells and counting, per cell, every
//! matrix whose minimum of `u(z, γz)` over the cell is at most `U`.
//!
//! Matrices are enumerated up to sign: `c > 0`, or `c = 0` and `a = d = 1`.
//! Counts of group elements are twice the number of representatives.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::geom::{mobius_apply, point_u, u_of_gamma, Rectangle, UnimodularMatrix, UpperHalfPoint};

/// Slack applied to the real coefficient bounds before rounding to integers.
const RANGE_SLACK: f64 = 1e-9;
/// Relative slack when testing `u ≤ U` at exact points.
const EXACT_SLACK: f64 = 1e-12;
/// Absolute tolerance on `x` for golden-section minimization.
const X_TOL: f64 = 1e-10;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CandidateSet {
    pub matrices: Vec<UnimodularMatrix>,
    /// Estimated minimum of `u(z, γz)` over the rectangle, per matrix.
    pub min_u_estimate: Vec<f64>,
}

impl CandidateSet {
    pub fn len(&self) -> usize {
        self.matrices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.matrices.is_empty()
    }

    /// Candidates whose estimated minimum is at most `u_max`.
    pub fn within(&self, u_max: f64) -> impl Iterator<Item = &UnimodularMatrix> + '_ {
        self.matrices
            .iter()
            .zip(&self.min_u_estimate)
            .filter(move |(_, &m)| m <= u_max)
            .map(|(g, _)| g)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CountCertificate {
    pub region: Rectangle,
    #[serde(rename = "U")]
    pub u_max: f64,
    pub grid: (usize, usize),
    /// Representative counts, indexed `[ix][iy]`.
    pub per_cell_counts: Vec<Vec<u32>>,
    /// Twice the largest per-cell representative count.
    pub bound: u64,
}

fn ceil_slack(v: f64) -> i64 {
    (v - RANGE_SLACK).ceil() as i64
}

fn floor_slack(v: f64) -> i64 {
    (v + RANGE_SLACK).floor() as i64
}

fn gcd(mut a: i64, mut b: i64) -> i64 {
    a = a.abs();
    b = b.abs();
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

/// Inverse of `d` modulo `c > 0`, assuming `gcd(c, d) = 1`.
fn mod_inverse(d: i64, c: i64) -> i64 {
    if c == 1 {
        return 0;
    }
    let (mut old_r, mut r) = (d.rem_euclid(c), c);
    let (mut old_s, mut s) = (1i64, 0i64);
    while r != 0 {
        let q = old_r / r;
        (old_r, r) = (r, old_r - q * r);
        (old_s, s) = (s, old_s - q * s);
    }
    old_s.rem_euclid(c)
}

/// Calls `visit` on every representative whose entries fall in the given
/// ranges, in ascending `(c, a, d)` order. `b_range` covers the `c = 0`
/// translations; `a_range(c)` and `d_range(c)` cover `1 ≤ c ≤ c_max`.
fn for_each_representative<A, D, V>(b_range: Option<(i64, i64)>, c_max: i64, a_range: A, d_range: D, mut visit: V)
where
    A: Fn(i64) -> (i64, i64),
    D: Fn(i64) -> (i64, i64),
    V: FnMut(UnimodularMatrix),
{
    if let Some((lo, hi)) = b_range {
        for b in lo..=hi {
            visit(UnimodularMatrix::translation(b));
        }
    }
    let mut row = Vec::new();
    for c in 1..=c_max {
        let (a_lo, a_hi) = a_range(c);
        let (d_lo, d_hi) = d_range(c);
        if a_lo > a_hi || d_lo > d_hi {
            continue;
        }
        row.clear();
        for d in d_lo..=d_hi {
            if gcd(c, d) != 1 {
                continue;
            }
            let a0 = mod_inverse(d, c);
            // first a ≥ a_lo with a ≡ a0 (mod c)
            let mut a = a_lo + (a0 - a_lo).rem_euclid(c);
            while a <= a_hi {
                let b = (a * d - 1) / c;
                row.push(UnimodularMatrix { a, b, c, d });
                a += c;
            }
        }
        row.sort_by_key(|g| (g.a, g.d));
        for g in &row {
            visit(*g);
        }
    }
}

/// Every representative that might satisfy `min_{z ∈ R} u(z, γz) ≤ U`,
/// from the coefficient bounds implied by the explicit formula for `u(z, γz)`.
pub fn enumerate_candidates(region: &Rectangle, u_max: f64) -> CandidateSet {
    let mut matrices = Vec::new();
    if u_max >= 1.0 {
        let root = (2.0 * u_max).sqrt();
        let b_max = floor_slack(region.y_max() * (2.0 * u_max - 2.0).sqrt());
        let c_max = floor_slack(root / region.y_min());
        for_each_representative(
            Some((-b_max, b_max)),
            c_max,
            |c| {
                let c = c as f64;
                (
                    ceil_slack(-root + c * region.x_min()),
                    floor_slack(root + c * region.x_max()),
                )
            },
            |c| {
                let c = c as f64;
                (
                    ceil_slack(-root - c * region.x_max()),
                    floor_slack(root - c * region.x_min()),
                )
            },
            |g| matrices.push(g),
        );
    }
    let min_u_estimate = matrices.iter().map(|g| min_u_over_rect(g, region)).collect();
    CandidateSet {
        matrices,
        min_u_estimate,
    }
}

/// Minimum over `y ∈ [y_min, y_max]` of `W²/y² + c²y²`.
fn y_part_min(w: f64, c: f64, y_min: f64, y_max: f64) -> f64 {
    let f = |y: f64| (w / y) * (w / y) + (c * y) * (c * y);
    if c == 0.0 {
        return f(y_max);
    }
    if w == 0.0 {
        return f(y_min);
    }
    let y_star = (w.abs() / c.abs()).sqrt().clamp(y_min, y_max);
    f(y_star)
}

fn golden_section<F: Fn(f64) -> f64>(f: &F, mut lo: f64, mut hi: f64) -> f64 {
    const INV_PHI: f64 = 0.618_033_988_749_894_9;
    let mut x1 = hi - INV_PHI * (hi - lo);
    let mut x2 = lo + INV_PHI * (hi - lo);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    let mut best = f1.min(f2);
    while hi - lo > X_TOL {
        if f1 <= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - INV_PHI * (hi - lo);
            f1 = f(x1);
            best = best.min(f1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + INV_PHI * (hi - lo);
            f2 = f(x2);
            best = best.min(f2);
        }
    }
    best
}

/// Estimate of `min_{z ∈ R} u(z, γz)`.
///
/// The minimum over `y` is exact for each `x`; the minimum over `x` uses
/// golden-section searches on both halves of `[x_min, x_max]` and around the
/// best point of a 17-point scan.
pub fn min_u_over_rect(g: &UnimodularMatrix, region: &Rectangle) -> f64 {
    let (a, b, c, d) = (g.a as f64, g.b as f64, g.c as f64, g.d as f64);
    let (y_min, y_max) = (region.y_min(), region.y_max());
    let along_x = |x: f64| {
        let p = a - c * x;
        let r = d + c * x;
        let w = b + (a - d) * x - c * x * x;
        0.5 * (p * p + r * r + y_part_min(w, c, y_min, y_max))
    };
    let (x_lo, x_hi) = (region.x_min(), region.x_max());
    if x_hi - x_lo <= X_TOL {
        return along_x(x_lo);
    }
    const SCAN: usize = 16;
    let step = (x_hi - x_lo) / SCAN as f64;
    let mut best = f64::INFINITY;
    let mut best_k = 0;
    for k in 0..=SCAN {
        let x = if k == SCAN { x_hi } else { x_lo + step * k as f64 };
        let v = along_x(x);
        if v < best {
            best = v;
            best_k = k;
        }
    }
    let mid = 0.5 * (x_lo + x_hi);
    best = best.min(golden_section(&along_x, x_lo, mid));
    best = best.min(golden_section(&along_x, mid, x_hi));
    let around_lo = x_lo + step * best_k.saturating_sub(1) as f64;
    let around_hi = (x_lo + step * (best_k + 1) as f64).min(x_hi);
    best.min(golden_section(&along_x, around_lo, around_hi))
}

/// Minimum of `|b + (a−d)x − cx²|` on `[x0, x1]`.
fn min_abs_quadratic(g: &UnimodularMatrix, x0: f64, x1: f64) -> f64 {
    let (a, b, c, d) = (g.a as f64, g.b as f64, g.c as f64, g.d as f64);
    let w = |x: f64| b + (a - d) * x - c * x * x;
    let mut pts = vec![x0, x1];
    if c != 0.0 {
        let xv = (a - d) / (2.0 * c);
        if xv > x0 && xv < x1 {
            pts.insert(1, xv);
        }
    }
    let vals: Vec<f64> = pts.iter().map(|&x| w(x)).collect();
    if vals.windows(2).any(|p| p[0] * p[1] <= 0.0) {
        return 0.0;
    }
    vals.iter().fold(f64::INFINITY, |m, v| m.min(v.abs()))
}

/// Minimum of `(p + q x)²` on `[x0, x1]`.
fn min_square_linear(p: f64, q: f64, x0: f64, x1: f64) -> f64 {
    let v0 = p + q * x0;
    let v1 = p + q * x1;
    if v0 * v1 <= 0.0 {
        0.0
    } else {
        (v0 * v0).min(v1 * v1)
    }
}

/// A rigorous lower bound for `min_{z ∈ R} u(z, γz)` (up to rounding).
pub fn u_lower_bound(g: &UnimodularMatrix, region: &Rectangle) -> f64 {
    let (a, c, d) = (g.a as f64, g.c as f64, g.d as f64);
    let (x0, x1) = (region.x_min(), region.x_max());
    let w_min = min_abs_quadratic(g, x0, x1);
    let split = (w_min / region.y_max()).powi(2) + (c * region.y_min()).powi(2);
    let am_gm = 2.0 * w_min * c.abs();
    0.5 * (min_square_linear(a, -c, x0, x1) + min_square_linear(d, c, x0, x1) + split.max(am_gm))
}

fn count_cell(cell: &Rectangle, candidates: &[UnimodularMatrix], threshold: f64) -> u32 {
    let center = UpperHalfPoint::new(
        0.5 * (cell.x_min() + cell.x_max()),
        0.5 * (cell.y_min() + cell.y_max()),
    )
    .expect("cell centre lies in the upper half-plane");
    candidates
        .iter()
        .filter(|g| {
            if u_lower_bound(g, cell) > threshold {
                return false;
            }
            u_of_gamma(g, &center) <= threshold || min_u_over_rect(g, cell) <= threshold
        })
        .count() as u32
}

/// Upper bound for `sup_{z ∈ R} N(z, z, U)` from an `nx × ny` subdivision of `R`.
pub fn count_bound(region: &Rectangle, u_max: f64, grid: (usize, usize)) -> CountCertificate {
    let (nx, ny) = (grid.0.max(1), grid.1.max(1));
    let threshold = u_max + 1e-6 * u_max;
    let candidates = enumerate_candidates(region, u_max);
    let live: Vec<UnimodularMatrix> = candidates
        .matrices
        .iter()
        .copied()
        .filter(|g| u_lower_bound(g, region) <= threshold)
        .collect();

    let flat: Vec<u32> = (0..nx * ny)
        .into_par_iter()
        .map(|k| {
            let (ix, iy) = (k / ny, k % ny);
            count_cell(&region.cell(nx, ny, ix, iy), &live, threshold)
        })
        .collect();
    let per_cell_counts: Vec<Vec<u32>> = flat.chunks(ny).map(|col| col.to_vec()).collect();
    let max_reps = flat.iter().copied().max().unwrap_or(0);
    CountCertificate {
        region: *region,
        u_max,
        grid: (nx, ny),
        per_cell_counts,
        bound: 2 * max_reps as u64,
    }
}

/// Representatives `γ` (up to sign) with `u(z, γw) ≤ U`, paired with that value.
pub fn orbit_representatives(z: &UpperHalfPoint, w: &UpperHalfPoint, u_max: f64) -> Vec<(UnimodularMatrix, f64)> {
    let mut out = Vec::new();
    if u_max < 1.0 {
        return out;
    }
    let (xz, yz, xw, yw) = (z.x(), z.y(), w.x(), w.y());
    let same = z == w;
    let accept = u_max * (1.0 + EXACT_SLACK);

    let r2 = 2.0 * (u_max - 1.0) * yz * yw - (yz - yw) * (yz - yw);
    let b_range = if r2 >= 0.0 {
        let r = r2.sqrt();
        Some((ceil_slack(xz - xw - r), floor_slack(xz - xw + r)))
    } else {
        None
    };
    let c_max = floor_slack((2.0 * u_max / (yz * yw)).sqrt());
    let a_half = (2.0 * u_max * yz / yw).sqrt();
    let d_half = (2.0 * u_max * yw / yz).sqrt();
    for_each_representative(
        b_range,
        c_max,
        |c| {
            let c = c as f64;
            (ceil_slack(c * xz - a_half), floor_slack(c * xz + a_half))
        },
        |c| {
            let c = c as f64;
            (ceil_slack(-c * xw - d_half), floor_slack(-c * xw + d_half))
        },
        |g| {
            let u = if same {
                u_of_gamma(&g, z)
            } else {
                point_u(z, &mobius_apply(&g, w))
            };
            if u <= accept {
                out.push((g, u));
            }
        },
    );
    out
}

/// `N(z, w, U)` for SL₂(Z), counting both `γ` and `−γ`.
pub fn exact_count(z: &UpperHalfPoint, w: &UpperHalfPoint, u_max: f64) -> u64 {
    2 * orbit_representatives(z, w, u_max).len() as u64
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn pt(x: f64, y: f64) -> UpperHalfPoint {
        UpperHalfPoint::new(x, y).unwrap()
    }

    /// Direct search over a box of entries, no congruence tricks.
    fn brute_force_count(z: &UpperHalfPoint, w: &UpperHalfPoint, u_max: f64, box_size: i64) -> u64 {
        let mut n = 0;
        for a in -box_size..=box_size {
            for b in -box_size..=box_size {
                for c in -box_size..=box_size {
                    for d in -box_size..=box_size {
                        if a * d - b * c != 1 {
                            continue;
                        }
                        let g = UnimodularMatrix { a, b, c, d };
                        if point_u(z, &mobius_apply(&g, w)) <= u_max * (1.0 + 1e-12) {
                            n += 1;
                        }
                    }
                }
            }
        }
        n
    }

    #[test]
    fn stabilizer_of_i() {
        let i = UpperHalfPoint::i();
        assert_eq!(exact_count(&i, &i, 1.0), 4);
        assert_eq!(exact_count(&i, &i, 1.4), 4);
        // ±I, ±S and the sixteen matrices with entries in {0, ±1} and exactly one zero
        assert_eq!(exact_count(&i, &i, 1.5), 20);
        let reps: Vec<_> = orbit_representatives(&i, &i, 1.0).into_iter().map(|(g, _)| g).collect();
        assert!(reps.contains(&UnimodularMatrix::IDENTITY));
        assert!(reps.contains(&UnimodularMatrix::S));
    }

    #[test]
    fn exact_count_matches_brute_force() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..20 {
            let z = pt(rng.gen_range(-0.5..0.5), rng.gen_range(0.8..2.0));
            let w = pt(rng.gen_range(-0.5..0.5), rng.gen_range(0.8..2.0));
            let u = rng.gen_range(1.0..6.0);
            assert_eq!(exact_count(&z, &w, u), brute_force_count(&z, &w, u, 12), "z={z} w={w} U={u}");
            assert_eq!(exact_count(&z, &z, u), brute_force_count(&z, &z, u, 12));
        }
    }

    #[test]
    fn candidates_at_i() {
        let r = Rectangle::point(UpperHalfPoint::i());
        let set = enumerate_candidates(&r, 1.0);
        let hits: Vec<_> = set.within(1.0 + 1e-12).copied().collect();
        assert!(hits.contains(&UnimodularMatrix::IDENTITY));
        assert!(hits.contains(&UnimodularMatrix::S));
        assert_eq!(hits.len(), 2);
        // U = 1 leaves only b = 0 in the translation branch
        assert_eq!(set.matrices.iter().filter(|g| g.c == 0).count(), 1);
    }

    #[test]
    fn candidates_are_normalized_and_ordered() {
        let set = enumerate_candidates(&Rectangle::y0(), 5.0);
        for g in &set.matrices {
            assert_eq!(g.a * g.d - g.b * g.c, 1);
            assert!(g.c >= 0);
            if g.c == 0 {
                assert_eq!((g.a, g.d), (1, 1));
            }
            assert!(!set.matrices.contains(&g.negate()) || *g == g.negate());
        }
        let keys: Vec<_> = set.matrices.iter().filter(|g| g.c > 0).map(|g| (g.c, g.a, g.d)).collect();
        let mut sorted = keys.clone();
        sorted.sort();
        assert_eq!(keys, sorted);
    }

    #[test]
    fn min_u_examples() {
        let r = Rectangle::y0();
        assert_eq!(min_u_over_rect(&UnimodularMatrix::IDENTITY, &r), 1.0);
        let col = Rectangle::new(0.0, 0.0, 1.0, 2.0).unwrap();
        assert!((min_u_over_rect(&UnimodularMatrix::T, &col) - 1.125).abs() < 1e-15);
        let at_i = Rectangle::point(UpperHalfPoint::i());
        assert_eq!(min_u_over_rect(&UnimodularMatrix::S, &at_i), 1.0);
    }

    #[test]
    fn min_u_never_exceeds_sampled_values() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let r = Rectangle::y0();
        let set = enumerate_candidates(&r, 17.0);
        for g in set.matrices.iter().step_by(7) {
            let m = min_u_over_rect(g, &r);
            let lb = u_lower_bound(g, &r);
            assert!(lb <= m + 1e-9, "lower bound {lb} above minimum {m} for {g}");
            for _ in 0..50 {
                let z = pt(rng.gen_range(-0.5..=0.5), rng.gen_range(r.y_min()..=r.y_max()));
                assert!(m <= u_of_gamma(g, &z) + 1e-8, "{g} at {z}");
            }
        }
    }

    #[test]
    fn degenerate_rectangle_bounds() {
        let cert = count_bound(&Rectangle::point(UpperHalfPoint::i()), 1.0, (1, 1));
        assert_eq!(cert.bound, 4);
        let cert = count_bound(&Rectangle::y0(), 1.0 + 1e-9, (8, 8));
        assert!(cert.bound >= 2);
    }

    #[test]
    fn bound_dominates_exact_counts() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let r = Rectangle::y0();
        for _ in 0..10 {
            let u = rng.gen_range(1.0..8.0);
            let cert = count_bound(&r, u, (6, 6));
            for _ in 0..5 {
                let z = pt(rng.gen_range(-0.5..=0.5), rng.gen_range(r.y_min()..=r.y_max()));
                assert!(exact_count(&z, &z, u) <= cert.bound);
                let single = count_bound(&Rectangle::point(z), u, (1, 1));
                assert!(exact_count(&z, &z, u) <= single.bound);
            }
        }
    }

    #[test]
    fn counts_are_even_and_monotone() {
        let z = pt(0.1, 1.3);
        let w = pt(-0.2, 0.9);
        let mut last = 0;
        for k in 0..20 {
            let n = exact_count(&z, &w, 1.0 + k as f64);
            assert_eq!(n % 2, 0);
            assert!(n >= last);
            last = n;
        }
    }
}
