//! Adaptive Gauss–Legendre quadrature for complex integrands on intervals
//! and rectangles.
//!
//! Each cell is integrated with an `m`-point and an `m/2`-point rule; their
//! difference is the error estimate. Cells that miss their share of the
//! tolerance are bisected. Known kinks and jumps of the integrand should be
//! passed as breakpoints so that no cell straddles them.

use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;
use num_traits::Float;
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Error)]
pub enum QuadError {
    #[error("integrand returned a non-finite value at ({x}, {y})")]
    NonFinite { x: f64, y: f64 },
    #[error("invalid quadrature configuration: {0}")]
    InvalidConfig(&'static str),
    #[error("invalid integration domain")]
    InvalidDomain,
    #[error("tolerance not reached, error estimate {error_estimate:e}")]
    ToleranceNotReached { error_estimate: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub const fn new(lo: f64, hi: f64) -> Self {
        Self { lo, hi }
    }

    pub fn len(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn is_empty(&self) -> bool {
        !(self.hi > self.lo)
    }

    pub fn intersect(&self, other: &Interval) -> Interval {
        Interval::new(self.lo.max(other.lo), self.hi.min(other.hi))
    }
}

/// Axis-aligned rectangle `[x0, x1] × [y0, y1]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rectangle {
    pub x0: f64,
    pub x1: f64,
    pub y0: f64,
    pub y1: f64,
}

impl Rectangle {
    pub const fn new(x0: f64, x1: f64, y0: f64, y1: f64) -> Self {
        Self { x0, x1, y0, y1 }
    }

    pub const fn square(lo: f64, hi: f64) -> Self {
        Self::new(lo, hi, lo, hi)
    }

    pub fn x(&self) -> Interval {
        Interval::new(self.x0, self.x1)
    }

    pub fn y(&self) -> Interval {
        Interval::new(self.y0, self.y1)
    }

    pub fn area(&self) -> f64 {
        (self.x1 - self.x0).max(0.0) * (self.y1 - self.y0).max(0.0)
    }

    pub fn is_empty(&self) -> bool {
        self.x().is_empty() || self.y().is_empty()
    }

    pub fn contains(&self, x: f64, y: f64) -> bool {
        x >= self.x0 && x <= self.x1 && y >= self.y0 && y <= self.y1
    }

    pub fn intersect(&self, other: &Rectangle) -> Rectangle {
        Rectangle::new(
            self.x0.max(other.x0),
            self.x1.min(other.x1),
            self.y0.max(other.y0),
            self.y1.min(other.y1),
        )
    }

    pub fn translate(&self, dx: f64, dy: f64) -> Rectangle {
        Rectangle::new(self.x0 + dx, self.x1 + dx, self.y0 + dy, self.y1 + dy)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadConfig {
    pub node_count: usize,
    pub tolerance: f64,
    pub max_subdivisions: u32,
}

impl Default for QuadConfig {
    fn default() -> Self {
        Self {
            node_count: 16,
            tolerance: 1e-10,
            max_subdivisions: 12,
        }
    }
}

impl QuadConfig {
    pub fn with_tolerance(mut self, tolerance: f64) -> Self {
        self.tolerance = tolerance;
        self
    }

    pub fn with_nodes(mut self, node_count: usize) -> Self {
        self.node_count = node_count;
        self
    }

    pub fn validate(&self) -> Result<(), QuadError> {
        if self.node_count < 2 || self.node_count % 2 != 0 || self.node_count > 128 {
            return Err(QuadError::InvalidConfig("node_count must be even and in 2..=128"));
        }
        if !(self.tolerance > 0.0) || !self.tolerance.is_finite() {
            return Err(QuadError::InvalidConfig("tolerance must be positive"));
        }
        if self.max_subdivisions > 40 {
            return Err(QuadError::InvalidConfig("max_subdivisions must be at most 40"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadResult {
    pub value: Complex64,
    pub error_estimate: f64,
    /// Deepest bisection level reached by any cell.
    pub subdivisions_used: u32,
    /// False when some cell hit `max_subdivisions` above its tolerance share.
    pub converged: bool,
    pub evaluations: usize,
}

impl QuadResult {
    /// The value, or an error when some cell missed its tolerance.
    pub fn strict(self) -> Result<Complex64, QuadError> {
        if self.converged {
            Ok(self.value)
        } else {
            Err(QuadError::ToleranceNotReached {
                error_estimate: self.error_estimate,
            })
        }
    }
}

/// Gauss–Legendre rule on `[-1, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussRule {
    pub fn new(n: usize) -> Self {
        let mut nodes = alloc::vec![0.0; n];
        let mut weights = alloc::vec![0.0; n];
        let nf = n as f64;
        for i in 0..n.div_ceil(2) {
            let mut z = (PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre(n, z);
                dp = d;
                let dz = p / d;
                z -= dz;
                if dz.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre(n, z);
            if d != 0.0 {
                dp = d;
            }
            let w = 2.0 / ((1.0 - z * z) * dp * dp);
            nodes[i] = -z;
            nodes[n - 1 - i] = z;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        if n % 2 == 1 {
            nodes[n / 2] = 0.0;
        }
        Self { nodes, weights }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Nodes and weights mapped to `[a, b]`.
    pub fn mapped(&self, a: f64, b: f64) -> impl Iterator<Item = (f64, f64)> + '_ {
        let h = 0.5 * (b - a);
        let c = 0.5 * (b + a);
        self.nodes
            .iter()
            .zip(self.weights.iter())
            .map(move |(t, w)| (c + h * t, h * w))
    }
}

fn legendre(n: usize, z: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = z;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * z * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (z * p1 - p0) / (z * z - 1.0);
    (p1, d)
}

struct Rules {
    fine: GaussRule,
    coarse: GaussRule,
}

impl Rules {
    fn new(cfg: &QuadConfig) -> Self {
        Self {
            fine: GaussRule::new(cfg.node_count),
            coarse: GaussRule::new(cfg.node_count / 2),
        }
    }
}

fn split_points(iv: Interval, breaks: &[f64]) -> Vec<f64> {
    let mut pts: Vec<f64> = breaks
        .iter()
        .copied()
        .filter(|b| b.is_finite() && *b > iv.lo && *b < iv.hi)
        .collect();
    pts.push(iv.lo);
    pts.push(iv.hi);
    pts.sort_by(|a, b| a.partial_cmp(b).unwrap());
    pts.dedup();
    pts
}

fn checked(v: Complex64, x: f64, y: f64) -> Result<Complex64, QuadError> {
    if v.re.is_finite() && v.im.is_finite() {
        Ok(v)
    } else {
        Err(QuadError::NonFinite { x, y })
    }
}

/// Integrates `f` over `iv`, splitting at `breaks` first.
pub fn integrate_1d<F>(
    mut f: F,
    iv: Interval,
    breaks: &[f64],
    cfg: &QuadConfig,
) -> Result<QuadResult, QuadError>
where
    F: FnMut(f64) -> Complex64,
{
    cfg.validate()?;
    if iv.lo.is_nan() || iv.hi.is_nan() {
        return Err(QuadError::InvalidDomain);
    }
    let mut out = QuadResult {
        value: Complex64::new(0.0, 0.0),
        error_estimate: 0.0,
        subdivisions_used: 0,
        converged: true,
        evaluations: 0,
    };
    if iv.is_empty() {
        return Ok(out);
    }
    let rules = Rules::new(cfg);
    let total = iv.len();
    let pts = split_points(iv, breaks);
    let mut stack: Vec<(f64, f64, u32)> = Vec::new();
    for w in pts.windows(2).rev() {
        stack.push((w[0], w[1], 0));
    }
    while let Some((a, b, depth)) = stack.pop() {
        let mut fine = Complex64::new(0.0, 0.0);
        for (x, w) in rules.fine.mapped(a, b) {
            fine += checked(f(x), x, 0.0)? * w;
        }
        let mut coarse = Complex64::new(0.0, 0.0);
        for (x, w) in rules.coarse.mapped(a, b) {
            coarse += checked(f(x), x, 0.0)? * w;
        }
        out.evaluations += rules.fine.len() + rules.coarse.len();
        let err = (fine - coarse).norm();
        let share = cfg.tolerance * (b - a) / total;
        if err <= share || depth >= cfg.max_subdivisions {
            if err > share {
                out.converged = false;
            }
            out.value += fine;
            out.error_estimate += err;
            out.subdivisions_used = out.subdivisions_used.max(depth);
        } else {
            let m = 0.5 * (a + b);
            stack.push((m, b, depth + 1));
            stack.push((a, m, depth + 1));
        }
    }
    Ok(out)
}

/// Integrates `f` over `rect`, splitting at the given vertical and horizontal
/// lines first.
pub fn integrate_2d<F>(
    mut f: F,
    rect: Rectangle,
    x_breaks: &[f64],
    y_breaks: &[f64],
    cfg: &QuadConfig,
) -> Result<QuadResult, QuadError>
where
    F: FnMut(f64, f64) -> Complex64,
{
    cfg.validate()?;
    if [rect.x0, rect.x1, rect.y0, rect.y1].iter().any(|v| v.is_nan()) {
        return Err(QuadError::InvalidDomain);
    }
    let mut out = QuadResult {
        value: Complex64::new(0.0, 0.0),
        error_estimate: 0.0,
        subdivisions_used: 0,
        converged: true,
        evaluations: 0,
    };
    if rect.is_empty() {
        return Ok(out);
    }
    let rules = Rules::new(cfg);
    let total = rect.area();
    let xs = split_points(rect.x(), x_breaks);
    let ys = split_points(rect.y(), y_breaks);
    let mut stack: Vec<(Rectangle, u32)> = Vec::new();
    for wy in ys.windows(2).rev() {
        for wx in xs.windows(2).rev() {
            stack.push((Rectangle::new(wx[0], wx[1], wy[0], wy[1]), 0));
        }
    }
    let mut tensor = |rule: &GaussRule, c: &Rectangle, evals: &mut usize| {
        let mut acc = Complex64::new(0.0, 0.0);
        for (y, wy) in rule.mapped(c.y0, c.y1) {
            let mut row = Complex64::new(0.0, 0.0);
            for (x, wx) in rule.mapped(c.x0, c.x1) {
                row += checked(f(x, y), x, y)? * wx;
            }
            acc += row * wy;
        }
        *evals += rule.len() * rule.len();
        Ok::<Complex64, QuadError>(acc)
    };
    while let Some((c, depth)) = stack.pop() {
        let fine = tensor(&rules.fine, &c, &mut out.evaluations)?;
        let coarse = tensor(&rules.coarse, &c, &mut out.evaluations)?;
        let err = (fine - coarse).norm();
        let share = cfg.tolerance * c.area() / total;
        if err <= share || depth >= cfg.max_subdivisions {
            if err > share {
                out.converged = false;
            }
            out.value += fine;
            out.error_estimate += err;
            out.subdivisions_used = out.subdivisions_used.max(depth);
        } else {
            let mx = 0.5 * (c.x0 + c.x1);
            let my = 0.5 * (c.y0 + c.y1);
            stack.push((Rectangle::new(mx, c.x1, my, c.y1), depth + 1));
            stack.push((Rectangle::new(c.x0, mx, my, c.y1), depth + 1));
            stack.push((Rectangle::new(mx, c.x1, c.y0, my), depth + 1));
            stack.push((Rectangle::new(c.x0, mx, c.y0, my), depth + 1));
        }
    }
    Ok(out)
}

/// Integer lines strictly inside `[lo, hi]`.
pub fn integer_breaks(lo: f64, hi: f64) -> Vec<f64> {
    let mut out = Vec::new();
    if !(hi > lo) || !lo.is_finite() || !hi.is_finite() {
        return out;
    }
    let mut k = lo.floor() + 1.0;
    while k < hi {
        out.push(k);
        k += 1.0;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn rule_is_exact_for_polynomials() {
        let rule = GaussRule::new(16);
        for deg in 0..32 {
            let s: f64 = rule.mapped(0.0, 1.0).map(|(x, w)| w * x.powi(deg)).sum();
            assert_abs_diff_eq!(s, 1.0 / (deg as f64 + 1.0), epsilon = 1e-14);
        }
        let odd = GaussRule::new(7);
        let s: f64 = odd.mapped(-1.0, 1.0).map(|(_, w)| w).sum();
        assert_abs_diff_eq!(s, 2.0, epsilon = 1e-14);
    }

    #[test]
    fn oscillatory_1d() {
        let cfg = QuadConfig::default();
        let r = integrate_1d(|x| Complex64::new(0.0, 7.0 * x).exp(), Interval::new(0.0, 3.0), &[], &cfg)
            .unwrap();
        let exact = (Complex64::new(0.0, 21.0).exp() - 1.0) / Complex64::new(0.0, 7.0);
        assert!((r.value - exact).norm() < 1e-12);
        assert!(r.converged);
        assert!(r.error_estimate <= cfg.tolerance);
    }

    #[test]
    fn breakpoints_resolve_jumps() {
        let cfg = QuadConfig::default();
        let r = integrate_2d(
            |x, y| c(if x < 0.3 && y >= 0.7 { 1.0 } else { 0.0 }),
            Rectangle::square(0.0, 1.0),
            &[0.3],
            &[0.7],
            &cfg,
        )
        .unwrap();
        assert_abs_diff_eq!(r.value.re, 0.09, epsilon = 1e-14);
        assert_eq!(r.subdivisions_used, 0);
    }

    #[test]
    fn non_finite_is_reported() {
        let cfg = QuadConfig::default();
        let r = integrate_1d(|x| c(1.0 / (x - x)), Interval::new(0.0, 1.0), &[], &cfg);
        assert!(matches!(r, Err(QuadError::NonFinite { .. })));
    }

    #[test]
    fn tolerance_miss_is_flagged() {
        let cfg = QuadConfig {
            max_subdivisions: 2,
            ..QuadConfig::default()
        };
        let r = integrate_1d(|x| c(if x < 0.2 { 1.0 } else { 0.0 }), Interval::new(0.0, 1.0), &[], &cfg)
            .unwrap();
        assert!(!r.converged);
        assert_eq!(r.subdivisions_used, 2);
    }

    #[test]
    fn invalid_config() {
        let cfg = QuadConfig::default().with_nodes(7);
        assert!(integrate_1d(|_| c(1.0), Interval::new(0.0, 1.0), &[], &cfg).is_err());
    }

    proptest! {
        #[test]
        fn additivity(a in -3.0f64..3.0, len in 0.1f64..4.0, t in 0.05f64..0.95, k in -4.0f64..4.0) {
            let cfg = QuadConfig::default();
            let f = |x: f64| Complex64::new(0.0, k * x).exp() * (1.0 + x * x);
            let b = a + len;
            let m = a + t * len;
            let whole = integrate_1d(f, Interval::new(a, b), &[], &cfg).unwrap().value;
            let left = integrate_1d(f, Interval::new(a, m), &[], &cfg).unwrap().value;
            let right = integrate_1d(f, Interval::new(m, b), &[], &cfg).unwrap().value;
            prop_assert!((whole - left - right).norm() < 1e-9);
        }

        #[test]
        fn converged_error_below_tolerance(k in -6.0f64..6.0, l in -6.0f64..6.0) {
            let cfg = QuadConfig::default();
            let r = integrate_2d(
                |x, y| Complex64::new(0.0, k * x - l * y).exp(),
                Rectangle::new(-1.0, 2.0, 0.0, 1.5),
                &[],
                &[],
                &cfg,
            )
            .unwrap();
            if r.subdivisions_used < cfg.max_subdivisions {
                prop_assert!(r.error_estimate <= cfg.tolerance);
            }
            let ix = |w: f64, a: f64, b: f64| {
                if w.abs() < 1e-12 {
                    Complex64::new(b - a, 0.0)
                } else {
                    (Complex64::new(0.0, w * b).exp() - Complex64::new(0.0, w * a).exp())
                        / Complex64::new(0.0, w)
                }
            };
            let exact = ix(k, -1.0, 2.0) * ix(-l, 0.0, 1.5);
            prop_assert!((r.value - exact).norm() < 1e-9);
        }

        #[test]
        fn deterministic(k in -6.0f64..6.0) {
            let cfg = QuadConfig::default();
            let f = |x: f64, y: f64| Complex64::new(0.0, k * x * y).exp();
            let a = integrate_2d(f, Rectangle::square(0.0, 2.0), &[1.0], &[1.0], &cfg).unwrap();
            let b = integrate_2d(f, Rectangle::square(0.0, 2.0), &[1.0], &[1.0], &cfg).unwrap();
            prop_assert_eq!(a.value.re.to_bits(), b.value.re.to_bits());
            prop_assert_eq!(a.value.im.to_bits(), b.value.im.to_bits());
        }
    }
}
