//! Twisted B-splines `φₙ`, their moments, and classical cardinal B-splines.
//!
//! `φ₁` is the indicator of `[0,1)²` and
//! `φₙ₊₁(x,y) = ∬_Q φₙ(x−u, y−v) e^{πi(uy−vx)} du dv` with `Q = [0,1]²`.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;
use core::cell::RefCell;
use core::f64::consts::PI;

use num_complex::Complex64;
use num_traits::Float;

use crate::quad::{integer_breaks, integrate_2d, QuadConfig, Rectangle};
use crate::specfun::{ci, ei_imag, expm1_integral, si, sinc, EULER_GAMMA};
use crate::{Error, Result};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

pub(crate) fn cis_pi(t: f64) -> Complex64 {
    Complex64::cis(PI * t)
}

/// Indicator of `[0,1)²`.
pub fn phi1(x: f64, y: f64) -> Complex64 {
    if (0.0..1.0).contains(&x) && (0.0..1.0).contains(&y) {
        Complex64::new(1.0, 0.0)
    } else {
        ZERO
    }
}

fn hat(t: f64) -> f64 {
    t.min(2.0 - t)
}

/// `sin(a t)/t` with the removable singularity at `t = 0` filled in.
fn sin_over(a: f64, t: f64) -> f64 {
    let z = a * t;
    if z.abs() < 1e-6 {
        a * (1.0 - z * z / 6.0)
    } else {
        z.sin() / t
    }
}

/// The real closed form of `φ₂` on its four support regions.
///
/// Every region's cosine difference is rewritten as a product of sines,
/// `4 sin(πx·h(y)/2) sin(πy·h(x)/2) / (π² x y)` with `h(t) = min(t, 2 − t)`,
/// which is free of cancellation near the axes.
pub fn phi2_closed(x: f64, y: f64) -> Complex64 {
    let in_low = |t: f64| t > 0.0 && t <= 1.0;
    let in_high = |t: f64| t > 1.0 && t <= 2.0;
    let region = (in_low(x) || in_high(x)) && (in_low(y) || in_high(y));
    if !region || (x == 2.0 && in_high(y)) || (y == 2.0 && in_high(x)) {
        return ZERO;
    }
    let a = 0.5 * PI * hat(y);
    let b = 0.5 * PI * hat(x);
    let v = 4.0 / (PI * PI) * sin_over(a, x) * sin_over(b, y);
    Complex64::new(v, 0.0)
}

/// How `φₙ` is reduced to lower orders.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Strategy {
    /// Closed forms for `n ≤ 2`, the recursion above that.
    ClosedForm,
    /// The recursion all the way down to `φ₁`.
    Recursion,
}

fn eval_order(n: u32, x: f64, y: f64, strategy: Strategy, cfg: &QuadConfig) -> Result<Complex64> {
    match (n, strategy) {
        (0, _) => return Err(Error::UnsupportedOrder(0)),
        (1, _) => return Ok(phi1(x, y)),
        (2, Strategy::ClosedForm) => return Ok(phi2_closed(x, y)),
        _ => {}
    }
    let nf = n as f64;
    if !(x > 0.0 && y > 0.0 && x < nf && y < nf) {
        return Ok(ZERO);
    }
    let ub = integer_breaks(x - nf, x);
    let ub: Vec<f64> = ub.iter().map(|k| x - k).collect();
    let vb: Vec<f64> = integer_breaks(y - nf, y).iter().map(|k| y - k).collect();
    let mut failure = None;
    let r = integrate_2d(
        |u, v| match eval_order(n - 1, x - u, y - v, strategy, cfg) {
            Ok(val) => val * cis_pi(u * y - v * x),
            Err(e) => {
                failure.get_or_insert(e);
                ZERO
            }
        },
        Rectangle::square(0.0, 1.0),
        &ub,
        &vb,
        cfg,
    )?;
    if let Some(e) = failure {
        return Err(e);
    }
    Ok(r.strict()?)
}

/// `φₙ(x, y)`; closed forms for `n ≤ 2`, nested quadrature above.
pub fn phi_n(n: u32, x: f64, y: f64, cfg: &QuadConfig) -> Result<Complex64> {
    eval_order(n, x, y, Strategy::ClosedForm, cfg)
}

fn dyadic_key(x: f64, y: f64) -> Option<(u64, u64)> {
    const SCALE: f64 = 1048576.0;
    let ok = |t: f64| t.is_finite() && t.abs() <= SCALE && (t * SCALE).fract() == 0.0;
    if ok(x) && ok(y) {
        Some(((x + 0.0).to_bits(), (y + 0.0).to_bits()))
    } else {
        None
    }
}

/// A twisted B-spline of fixed order with a memo of values on dyadic points.
///
/// The memo uses interior mutability and is not `Sync`; share one instance
/// per thread.
#[derive(Debug)]
pub struct TwistedSpline {
    order: u32,
    strategy: Strategy,
    cfg: QuadConfig,
    cache: RefCell<BTreeMap<(u64, u64), Complex64>>,
}

impl TwistedSpline {
    pub fn new(order: u32, cfg: QuadConfig) -> Result<Self> {
        Self::with_strategy(order, Strategy::ClosedForm, cfg)
    }

    pub fn with_strategy(order: u32, strategy: Strategy, cfg: QuadConfig) -> Result<Self> {
        if order == 0 {
            return Err(Error::UnsupportedOrder(0));
        }
        cfg.validate()?;
        Ok(Self {
            order,
            strategy,
            cfg,
            cache: RefCell::new(BTreeMap::new()),
        })
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn strategy(&self) -> Strategy {
        self.strategy
    }

    pub fn config(&self) -> &QuadConfig {
        &self.cfg
    }

    pub fn support(&self) -> Rectangle {
        Rectangle::square(0.0, self.order as f64)
    }

    pub fn cached_points(&self) -> usize {
        self.cache.borrow().len()
    }

    pub fn eval(&self, x: f64, y: f64) -> Result<Complex64> {
        let key = dyadic_key(x, y);
        if let Some(k) = key {
            if let Some(v) = self.cache.borrow().get(&k) {
                return Ok(*v);
            }
        }
        let v = eval_order(self.order, x, y, self.strategy, &self.cfg)?;
        if let Some(k) = key {
            self.cache.borrow_mut().insert(k, v);
        }
        Ok(v)
    }
}

/// `(e^{ia} − 1)/a`, finite at `a = 0`.
pub(crate) fn expm1_over(a: f64) -> Complex64 {
    Complex64::i() * Complex64::cis(0.5 * a) * sinc(0.5 * a)
}

/// `L₁(u,v) = (e^{πiu} − 1)(e^{−πiv} − 1)/(π² u v)`, the twisted Fourier
/// transform of `φ₁`.
pub fn l1(u: f64, v: f64) -> Complex64 {
    -expm1_over(PI * u) * expm1_over(-PI * v)
}

/// `L₂` through the entire function `G(x) = ∫₀ˣ (e^{it} − 1)/t dt`.
pub fn l2(u: f64, v: f64) -> Complex64 {
    let g = expm1_integral;
    let a = g(PI * (1.0 - v) * (u + 1.0)) - g(PI * (1.0 - v) * u) - g(-PI * v * (u + 1.0))
        + g(-PI * v * u);
    let b = g(PI * (u - 1.0) * (v + 1.0)) - g(PI * (u - 1.0) * v) - g(PI * u * (v + 1.0))
        + g(PI * u * v);
    a * b / (PI * PI)
}

/// `L₂` as a product of two exponential-integral combinations.
///
/// Undefined where one of the arguments `uv`, `u(v±1)`, `(u±1)v`,
/// `(u±1)(v±1)` vanishes.
pub fn l2_ei(u: f64, v: f64) -> Result<Complex64> {
    let e = |x: f64| ei_imag(x);
    let first = e(-PI * u * v)? - e(-PI * u * (v - 1.0))? - e(-PI * (u + 1.0) * v)?
        + e(-PI * (u + 1.0) * (v - 1.0))?;
    let second = e(PI * u * v)? - e(PI * u * (v + 1.0))? - e(PI * (u - 1.0) * v)?
        + e(PI * (u - 1.0) * (v + 1.0))?;
    Ok(first * second / (PI * PI))
}

/// `Lₙ(u,v) = ∬ φₙ(r,s) e^{πi(us − vr)} dr ds`, via
/// `Lₙ₊₁(u,v) = ∬_Q Lₙ(p+u, q+v) e^{πi(uq − vp)} dp dq`.
pub fn l_function(n: u32, u: f64, v: f64, cfg: &QuadConfig) -> Result<Complex64> {
    match n {
        0 => Err(Error::UnsupportedOrder(0)),
        1 => Ok(l1(u, v)),
        2 => Ok(l2(u, v)),
        _ => {
            let mut failure = None;
            let r = integrate_2d(
                |p, q| match l_function(n - 1, p + u, q + v, cfg) {
                    Ok(val) => val * cis_pi(u * q - v * p),
                    Err(e) => {
                        failure.get_or_insert(e);
                        ZERO
                    }
                },
                Rectangle::square(0.0, 1.0),
                &[],
                &[],
                cfg,
            )?;
            if let Some(e) = failure {
                return Err(e);
            }
            Ok(r.strict()?)
        }
    }
}

/// The total integral of `φₙ` together with samples of the `L` function it
/// came from.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentFunctional {
    pub order: u32,
    pub value: Complex64,
    /// `(u, v, L_{n−1}(u, v))` on a 5×5 grid of `Q`; empty for `n = 1`.
    pub l_table: Vec<(f64, f64, Complex64)>,
}

/// `∬ φₙ`.
pub fn moment(n: u32, cfg: &QuadConfig) -> Result<Complex64> {
    match n {
        0 => Err(Error::UnsupportedOrder(0)),
        1 => Ok(Complex64::new(1.0, 0.0)),
        2 => {
            let c = Complex64::new(-EULER_GAMMA - PI.ln() + ci(PI)?, si(PI)?);
            Ok(c * c.conj() / (PI * PI))
        }
        _ => {
            let mut failure = None;
            let r = integrate_2d(
                |u, v| match l_function(n - 1, u, v, cfg) {
                    Ok(val) => val,
                    Err(e) => {
                        failure.get_or_insert(e);
                        ZERO
                    }
                },
                Rectangle::square(0.0, 1.0),
                &[],
                &[],
                cfg,
            )?;
            if let Some(e) = failure {
                return Err(e);
            }
            Ok(r.strict()?)
        }
    }
}

pub fn moment_functional(n: u32, cfg: &QuadConfig) -> Result<MomentFunctional> {
    let value = moment(n, cfg)?;
    let mut l_table = Vec::new();
    if n >= 2 {
        for i in 0..5 {
            for j in 0..5 {
                let (u, v) = (i as f64 / 4.0, j as f64 / 4.0);
                l_table.push((u, v, l_function(n - 1, u, v, cfg)?));
            }
        }
    }
    Ok(MomentFunctional {
        order: n,
        value,
        l_table,
    })
}

fn binomial(n: u32, k: u32) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

fn factorial(n: u32) -> f64 {
    (1..=n).map(|k| k as f64).product()
}

/// Cardinal B-spline of order `n` on `[0, n]` from truncated powers.
pub fn classical_bspline(n: u32, x: f64) -> f64 {
    if n == 0 || !(x >= 0.0 && x < n as f64) {
        return 0.0;
    }
    let mut s = 0.0;
    for k in 0..=n {
        let t = x - k as f64;
        if t >= 0.0 {
            let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
            s += sign * binomial(n, k) * t.powi(n as i32 - 1);
        }
    }
    s / factorial(n - 1)
}

pub fn tensor_bspline(n: u32, x: f64, y: f64) -> f64 {
    classical_bspline(n, x) * classical_bspline(n, y)
}

/// `B̂ₙ(ω) = ((1 − e^{−iω})/(iω))ⁿ`.
pub fn bspline_fourier(n: u32, omega: f64) -> Complex64 {
    let base = Complex64::cis(-0.5 * omega) * sinc(0.5 * omega);
    base.powu(n)
}

/// `|Bₙ(x) − Σₖ 2^{1−n} C(n,k) Bₙ(2x − k)|`.
pub fn two_scale_check(n: u32, x: f64) -> f64 {
    let scale = 2f64.powi(1 - n as i32);
    let rhs: f64 = (0..=n)
        .map(|k| scale * binomial(n, k) * classical_bspline(n, 2.0 * x - k as f64))
        .sum();
    (classical_bspline(n, x) - rhs).abs()
}
