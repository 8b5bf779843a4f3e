//! Twisted translations, dilations and the twisted convolution of planar
//! functions.

use alloc::sync::Arc;
use alloc::vec::Vec;
use core::fmt;

use num_complex::Complex64;

use crate::quad::{integrate_2d, QuadConfig, Rectangle};
use crate::splines::{cis_pi, phi1, phi2_closed, phi_n};
use crate::{Error, Result};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct LatticePoint {
    pub k: i64,
    pub l: i64,
}

impl LatticePoint {
    pub const fn new(k: i64, l: i64) -> Self {
        Self { k, l }
    }

    /// `k₁l₂ − l₁k₂`.
    pub fn cross(self, other: LatticePoint) -> i64 {
        self.k * other.l - self.l * other.k
    }
}

impl core::ops::Add for LatticePoint {
    type Output = LatticePoint;
    fn add(self, o: LatticePoint) -> LatticePoint {
        LatticePoint::new(self.k + o.k, self.l + o.l)
    }
}

impl core::ops::Sub for LatticePoint {
    type Output = LatticePoint;
    fn sub(self, o: LatticePoint) -> LatticePoint {
        LatticePoint::new(self.k - o.k, self.l - o.l)
    }
}

impl core::ops::Neg for LatticePoint {
    type Output = LatticePoint;
    fn neg(self) -> LatticePoint {
        LatticePoint::new(-self.k, -self.l)
    }
}

/// `(−1)^m` as a real number.
pub fn parity_sign(m: i64) -> f64 {
    if m.rem_euclid(2) == 0 {
        1.0
    } else {
        -1.0
    }
}

type Evaluator = Arc<dyn Fn(f64, f64) -> Result<Complex64> + Send + Sync>;

/// A complex function on the plane with a declared rectangular support and
/// the lines along which it may fail to be smooth.
#[derive(Clone)]
pub struct PlanarFunction {
    evaluator: Evaluator,
    support: Rectangle,
    x_breaks: Vec<f64>,
    y_breaks: Vec<f64>,
}

impl fmt::Debug for PlanarFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("PlanarFunction")
            .field("support", &self.support)
            .field("x_breaks", &self.x_breaks)
            .field("y_breaks", &self.y_breaks)
            .finish_non_exhaustive()
    }
}

fn normalized(mut v: Vec<f64>) -> Vec<f64> {
    v.retain(|t| t.is_finite());
    v.sort_by(|a, b| a.partial_cmp(b).unwrap());
    v.dedup();
    v
}

impl PlanarFunction {
    pub fn new<F>(support: Rectangle, f: F) -> Self
    where
        F: Fn(f64, f64) -> Result<Complex64> + Send + Sync + 'static,
    {
        Self {
            evaluator: Arc::new(f),
            support,
            x_breaks: Vec::new(),
            y_breaks: Vec::new(),
        }
    }

    /// Declares lines `x = c` and `y = c` where the function may jump or kink.
    pub fn with_breaks(mut self, x_breaks: Vec<f64>, y_breaks: Vec<f64>) -> Self {
        self.x_breaks = normalized(x_breaks);
        self.y_breaks = normalized(y_breaks);
        self
    }

    pub fn support(&self) -> Rectangle {
        self.support
    }

    /// Interior break lines together with the support edges.
    pub fn x_breaks(&self) -> Vec<f64> {
        let mut v = self.x_breaks.clone();
        v.push(self.support.x0);
        v.push(self.support.x1);
        normalized(v)
    }

    pub fn y_breaks(&self) -> Vec<f64> {
        let mut v = self.y_breaks.clone();
        v.push(self.support.y0);
        v.push(self.support.y1);
        normalized(v)
    }

    pub fn eval(&self, x: f64, y: f64) -> Result<Complex64> {
        if !self.support.contains(x, y) {
            return Ok(ZERO);
        }
        (self.evaluator)(x, y)
    }

    pub fn zero() -> Self {
        Self::new(Rectangle::square(0.0, 0.0), |_, _| Ok(ZERO))
    }

    pub fn phi1() -> Self {
        Self::new(Rectangle::square(0.0, 1.0), |x, y| Ok(phi1(x, y)))
    }

    pub fn phi2() -> Self {
        Self::new(Rectangle::square(0.0, 2.0), |x, y| Ok(phi2_closed(x, y)))
            .with_breaks(alloc::vec![1.0], alloc::vec![1.0])
    }

    /// `φₙ` through the quadrature recursion.
    pub fn phi(n: u32, cfg: QuadConfig) -> Result<Self> {
        if n == 0 {
            return Err(Error::UnsupportedOrder(0));
        }
        cfg.validate()?;
        let nf = n as f64;
        let inner: Vec<f64> = (1..n).map(|k| k as f64).collect();
        Ok(
            Self::new(Rectangle::square(0.0, nf), move |x, y| phi_n(n, x, y, &cfg))
                .with_breaks(inner.clone(), inner),
        )
    }
}

/// `∬ f · conj(g)` over the intersection of the supports.
pub fn inner_product(f: &PlanarFunction, g: &PlanarFunction, cfg: &QuadConfig) -> Result<Complex64> {
    let rect = f.support().intersect(&g.support());
    if rect.is_empty() {
        return Ok(ZERO);
    }
    let mut xb = f.x_breaks();
    xb.extend(g.x_breaks());
    let mut yb = f.y_breaks();
    yb.extend(g.y_breaks());
    let mut failure = None;
    let r = integrate_2d(
        |x, y| match (f.eval(x, y), g.eval(x, y)) {
            (Ok(a), Ok(b)) => a * b.conj(),
            (Err(e), _) | (_, Err(e)) => {
                failure.get_or_insert(e);
                ZERO
            }
        },
        rect,
        &xb,
        &yb,
        cfg,
    )?;
    if let Some(e) = failure {
        return Err(e);
    }
    Ok(r.strict()?)
}

pub fn norm_squared(f: &PlanarFunction, cfg: &QuadConfig) -> Result<f64> {
    Ok(inner_product(f, f, cfg)?.re)
}

/// `T_{(k,l)} f (x,y) = e^{πi(lx − ky)} f(x − k, y − l)`.
pub fn twisted_translate(f: &PlanarFunction, p: LatticePoint) -> PlanarFunction {
    let (k, l) = (p.k as f64, p.l as f64);
    let inner = f.clone();
    PlanarFunction {
        support: f.support.translate(k, l),
        x_breaks: f.x_breaks.iter().map(|b| b + k).collect(),
        y_breaks: f.y_breaks.iter().map(|b| b + l).collect(),
        evaluator: Arc::new(move |x, y| Ok(cis_pi(l * x - k * y) * inner.eval(x - k, y - l)?)),
    }
}

/// `T_{p₁} T_{p₂} = phase · T_{p₁+p₂}` with `phase = (−1)^{k₁l₂ − l₁k₂}`.
pub fn compose_translations(p1: LatticePoint, p2: LatticePoint) -> (Complex64, LatticePoint) {
    (Complex64::new(parity_sign(p1.cross(p2)), 0.0), p1 + p2)
}

/// The λ-twisted translation by a real vector `(a, b)`,
/// `e^{πiλ(bx − ay)} f(x − a, y − b)`. With `λ = 1` and integer `(a, b)`
/// this is `T_{(a,b)}`.
pub fn lambda_twisted_translate(
    f: &PlanarFunction,
    lambda: f64,
    a: f64,
    b: f64,
) -> Result<PlanarFunction> {
    if lambda == 0.0 || !lambda.is_finite() {
        return Err(Error::InvalidArgument("lambda must be a nonzero real number"));
    }
    let inner = f.clone();
    Ok(PlanarFunction {
        support: f.support.translate(a, b),
        x_breaks: f.x_breaks.iter().map(|t| t + a).collect(),
        y_breaks: f.y_breaks.iter().map(|t| t + b).collect(),
        evaluator: Arc::new(move |x, y| {
            Ok(cis_pi(lambda * (b * x - a * y)) * inner.eval(x - a, y - b)?)
        }),
    })
}

/// `D_a f (x,y) = a f(ax, ay)`.
pub fn dilate(f: &PlanarFunction, a: f64) -> Result<PlanarFunction> {
    if !(a > 0.0) || !a.is_finite() {
        return Err(Error::InvalidArgument("dilation factor must be positive"));
    }
    let inner = f.clone();
    let s = f.support;
    Ok(PlanarFunction {
        support: Rectangle::new(s.x0 / a, s.x1 / a, s.y0 / a, s.y1 / a),
        x_breaks: f.x_breaks.iter().map(|t| t / a).collect(),
        y_breaks: f.y_breaks.iter().map(|t| t / a).collect(),
        evaluator: Arc::new(move |x, y| Ok(inner.eval(a * x, a * y)? * a)),
    })
}

fn minkowski(a: &[f64], b: &[f64]) -> Vec<f64> {
    let mut out = Vec::with_capacity(a.len() * b.len());
    for s in a {
        for t in b {
            out.push(s + t);
        }
    }
    normalized(out)
}

/// `(f × g)(x,y) = ∬ f(x−u, y−v) g(u,v) e^{πi(uy − vx)} du dv`, evaluated
/// lazily by quadrature at each point.
pub fn twisted_convolve(f: &PlanarFunction, g: &PlanarFunction, cfg: QuadConfig) -> Result<PlanarFunction> {
    cfg.validate()?;
    let fs = f.support;
    let gs = g.support;
    let support = Rectangle::new(fs.x0 + gs.x0, fs.x1 + gs.x1, fs.y0 + gs.y0, fs.y1 + gs.y1);
    let x_breaks = minkowski(&f.x_breaks(), &g.x_breaks());
    let y_breaks = minkowski(&f.y_breaks(), &g.y_breaks());
    let (f, g) = (f.clone(), g.clone());
    let evaluator = move |x: f64, y: f64| -> Result<Complex64> {
        let rect = gs.intersect(&Rectangle::new(x - fs.x1, x - fs.x0, y - fs.y1, y - fs.y0));
        if rect.is_empty() {
            return Ok(ZERO);
        }
        let mut ub: Vec<f64> = f.x_breaks().iter().map(|b| x - b).collect();
        ub.extend(g.x_breaks());
        let mut vb: Vec<f64> = f.y_breaks().iter().map(|b| y - b).collect();
        vb.extend(g.y_breaks());
        let mut failure = None;
        let r = integrate_2d(
            |u, v| match (f.eval(x - u, y - v), g.eval(u, v)) {
                (Ok(a), Ok(b)) => a * b * cis_pi(u * y - v * x),
                (Err(e), _) | (_, Err(e)) => {
                    failure.get_or_insert(e);
                    ZERO
                }
            },
            rect,
            &ub,
            &vb,
            &cfg,
        )?;
        if let Some(e) = failure {
            return Err(e);
        }
        Ok(r.strict()?)
    };
    Ok(PlanarFunction {
        evaluator: Arc::new(evaluator),
        support,
        x_breaks,
        y_breaks,
    })
}
