//! Kernels of Weyl transforms, `K_f(ξ,η) = ∫ f(x, η−ξ) e^{πix(ξ+η)} dx`.
//!
//! A kernel vanishes outside a band `a ≤ η−ξ < b`. Hilbert–Schmidt norms are
//! computed in the coordinates `s = ξ+η`, `d = η−ξ` over `|s| ≤ 2R`, with a
//! tail bound from a decay envelope `|K|² ≤ C / (|s| − c)^r`.

use alloc::sync::Arc;
use alloc::vec::Vec;
use core::f64::consts::PI;
use core::fmt;

use num_complex::Complex64;
use num_traits::Float;

use crate::quad::{integer_breaks, integrate_1d, integrate_2d, Interval, QuadConfig, Rectangle};
use crate::specfun::sinc_half;
use crate::splines::cis_pi;
use crate::twistops::{LatticePoint, PlanarFunction};
use crate::{Error, Result};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

type Evaluator = Arc<dyn Fn(f64, f64) -> Result<Complex64> + Send + Sync>;

/// Decay envelope `|K(ξ,η)|² ≤ constant / (|ξ+η| − offset)^rate` for
/// `|ξ+η| > offset`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Envelope {
    pub constant: f64,
    pub offset: f64,
    pub rate: f64,
}

#[derive(Clone)]
pub struct KernelFunction {
    evaluator: Evaluator,
    /// `[a, b)` on the `η − ξ` axis.
    pub band: (f64, f64),
    /// Values of `η − ξ` where the kernel may fail to be smooth.
    pub breaks: Vec<f64>,
    /// Bound on `|K|`.
    pub sup_bound: f64,
    pub envelope: Option<Envelope>,
}

impl fmt::Debug for KernelFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("KernelFunction")
            .field("band", &self.band)
            .field("breaks", &self.breaks)
            .field("sup_bound", &self.sup_bound)
            .field("envelope", &self.envelope)
            .finish_non_exhaustive()
    }
}

impl KernelFunction {
    pub fn new<F>(band: (f64, f64), sup_bound: f64, f: F) -> Self
    where
        F: Fn(f64, f64) -> Result<Complex64> + Send + Sync + 'static,
    {
        Self {
            evaluator: Arc::new(f),
            band,
            breaks: Vec::new(),
            sup_bound,
            envelope: None,
        }
    }

    pub fn with_envelope(mut self, envelope: Envelope) -> Self {
        self.envelope = Some(envelope);
        self
    }

    pub fn with_breaks(mut self, breaks: Vec<f64>) -> Self {
        self.breaks = breaks;
        self
    }

    /// Exponent `r` of the decay envelope, `0` when none is known.
    pub fn decay_rate(&self) -> f64 {
        self.envelope.map_or(0.0, |e| e.rate)
    }

    pub fn zero() -> Self {
        Self::new((0.0, 0.0), 0.0, |_, _| Ok(ZERO)).with_envelope(Envelope {
            constant: 0.0,
            offset: 0.0,
            rate: 2.0,
        })
    }

    pub fn eval(&self, xi: f64, eta: f64) -> Result<Complex64> {
        let d = eta - xi;
        if !(d >= self.band.0 && d < self.band.1) {
            return Ok(ZERO);
        }
        (self.evaluator)(xi, eta)
    }

    fn all_breaks(&self) -> Vec<f64> {
        let mut v = self.breaks.clone();
        v.push(self.band.0);
        v.push(self.band.1);
        v
    }
}

/// `K_φ₁(ξ,η) = e^{πi(ξ+η)/2} sinc((ξ+η)/2) χ_{[0,1)}(η−ξ)`.
pub fn kernel_phi1(xi: f64, eta: f64) -> Complex64 {
    let d = eta - xi;
    if !(0.0..1.0).contains(&d) {
        return ZERO;
    }
    let s = xi + eta;
    cis_pi(0.5 * s) * sinc_half(0.5 * s)
}

/// `K_φₙ(ξ,η) = e^{πiη} ∫₀¹ e^{−πiy/2} sinc((2η−y)/2) K_φₙ₋₁(ξ, η−y) dy`.
pub fn kernel_phi_n(n: u32, xi: f64, eta: f64, cfg: &QuadConfig) -> Result<Complex64> {
    match n {
        0 => return Err(Error::UnsupportedOrder(0)),
        1 => return Ok(kernel_phi1(xi, eta)),
        _ => {}
    }
    let d = eta - xi;
    let nf = n as f64;
    if !(d >= 0.0 && d < nf) {
        return Ok(ZERO);
    }
    // K_φₙ₋₁(ξ, η−y) is supported on y ∈ (d − n + 1, d] and kinks where
    // d − y is an integer.
    let iv = Interval::new((d - nf + 1.0).max(0.0), d.min(1.0));
    let breaks: Vec<f64> = integer_breaks(d - 1.0, d).iter().map(|m| d - m).collect();
    let mut failure = None;
    let r = integrate_1d(
        |y| match kernel_phi_n(n - 1, xi, eta - y, cfg) {
            Ok(k) => k * cis_pi(-0.5 * y) * sinc_half(0.5 * (2.0 * eta - y)),
            Err(e) => {
                failure.get_or_insert(e);
                ZERO
            }
        },
        iv,
        &breaks,
        cfg,
    )?;
    if let Some(e) = failure {
        return Err(e);
    }
    Ok(cis_pi(eta) * r.strict()?)
}

/// `K_φₙ` as a kernel object with band `[0, n)`.
///
/// Its envelope `|K_φₙ|² ≤ 4 / (π² (|ξ+η| − n + 1)²)` follows from the sinc
/// bound on `K_φ₁` and `|K_φₙ| ≤ 1`.
pub fn phi_kernel(n: u32, cfg: QuadConfig) -> Result<KernelFunction> {
    if n == 0 {
        return Err(Error::UnsupportedOrder(0));
    }
    cfg.validate()?;
    let nf = n as f64;
    Ok(KernelFunction::new((0.0, nf), 1.0, move |xi, eta| kernel_phi_n(n, xi, eta, &cfg))
        .with_breaks((1..n).map(|k| k as f64).collect())
        .with_envelope(Envelope {
            constant: 4.0 / (PI * PI),
            offset: nf - 1.0,
            rate: 2.0,
        }))
}

/// The kernel of `W(f)` straight from its defining integral.
///
/// No decay envelope or sup bound is attached; use
/// [`KernelFunction::with_envelope`] when one is known.
pub fn kernel_of(f: &PlanarFunction, cfg: QuadConfig) -> Result<KernelFunction> {
    cfg.validate()?;
    let s = f.support();
    let g = f.clone();
    let xb = f.x_breaks();
    Ok(KernelFunction::new((s.y0, s.y1), f64::INFINITY, move |xi, eta| {
        let d = eta - xi;
        let mut failure = None;
        let r = integrate_1d(
            |x| match g.eval(x, d) {
                Ok(v) => v * cis_pi(x * (xi + eta)),
                Err(e) => {
                    failure.get_or_insert(e);
                    ZERO
                }
            },
            Interval::new(s.x0, s.x1),
            &xb,
            &cfg,
        )?;
        if let Some(e) = failure {
            return Err(e);
        }
        Ok(r.strict()?)
    })
    .with_breaks(f.y_breaks()))
}

fn compose_envelope(k1: &KernelFunction, k2: &KernelFunction) -> Option<Envelope> {
    let w = (k1.band.1 - k1.band.0).min(k2.band.1 - k2.band.0).max(0.0);
    let reach = |k: &KernelFunction| k.band.0.abs().max(k.band.1.abs());
    // bound the second factor by its envelope and integrate the first, or
    // the other way round
    let via_second = k2.envelope.filter(|_| k1.sup_bound.is_finite()).map(|e| Envelope {
        constant: e.constant * (w * k1.sup_bound).powi(2),
        offset: e.offset + reach(k1),
        rate: e.rate,
    });
    let via_first = k1.envelope.filter(|_| k2.sup_bound.is_finite()).map(|e| Envelope {
        constant: e.constant * (w * k2.sup_bound).powi(2),
        offset: e.offset + reach(k2),
        rate: e.rate,
    });
    match (via_first, via_second) {
        (Some(a), Some(b)) => {
            let key = |e: &Envelope| (e.rate, -e.constant, -e.offset);
            Some(if key(&a) >= key(&b) { a } else { b })
        }
        (a, b) => a.or(b),
    }
}

/// The kernel of the product operator, `∫ K₁(ξ,y) K₂(y,η) dy`.
pub fn kernel_compose(k1: &KernelFunction, k2: &KernelFunction, cfg: QuadConfig) -> Result<KernelFunction> {
    cfg.validate()?;
    let band = (k1.band.0 + k2.band.0, k1.band.1 + k2.band.1);
    let w = (k1.band.1 - k1.band.0).min(k2.band.1 - k2.band.0).max(0.0);
    let sup = k1.sup_bound * k2.sup_bound * w;
    let envelope = compose_envelope(k1, k2);
    let mut breaks = Vec::new();
    for a in k1.all_breaks() {
        for b in k2.all_breaks() {
            breaks.push(a + b);
        }
    }
    let (a, b) = (k1.clone(), k2.clone());
    let mut out = KernelFunction::new(band, sup, move |xi, eta| {
        let iv = Interval::new(xi + a.band.0, xi + a.band.1)
            .intersect(&Interval::new(eta - b.band.1, eta - b.band.0));
        if iv.is_empty() {
            return Ok(ZERO);
        }
        let mut yb: Vec<f64> = a.all_breaks().iter().map(|t| xi + t).collect();
        yb.extend(b.all_breaks().iter().map(|t| eta - t));
        let mut failure = None;
        let r = integrate_1d(
            |y| match (a.eval(xi, y), b.eval(y, eta)) {
                (Ok(p), Ok(q)) => p * q,
                (Err(e), _) | (_, Err(e)) => {
                    failure.get_or_insert(e);
                    ZERO
                }
            },
            iv,
            &yb,
            &cfg,
        )?;
        if let Some(e) = failure {
            return Err(e);
        }
        Ok(r.strict()?)
    })
    .with_breaks(breaks);
    out.envelope = envelope;
    Ok(out)
}

/// Truncated Hilbert–Schmidt norm.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HsNorm {
    pub value: f64,
    /// `value²` is the integral of `|K|²` over `|ξ+η| ≤ 2R`.
    pub squared: f64,
    /// Bound on the omitted `∬_{|ξ+η| > 2R} |K|²`.
    pub tail_bound: f64,
    pub radius: f64,
}

fn tail(k: &KernelFunction, radius: f64) -> Result<f64> {
    let e = match k.envelope {
        Some(e) if e.rate >= 1.0 => e,
        _ => return Err(Error::InvalidArgument("kernel needs a decay envelope of rate at least 1")),
    };
    let width = (k.band.1 - k.band.0).max(0.0);
    let edge = 2.0 * radius - e.offset;
    if e.constant == 0.0 || width == 0.0 {
        return Ok(0.0);
    }
    if e.rate == 1.0 || edge <= 0.0 {
        return Ok(f64::INFINITY);
    }
    // ∬ over |s| > 2R: ds dd / 2, both signs of s
    Ok(width * e.constant / ((e.rate - 1.0) * edge.powf(e.rate - 1.0)))
}

fn band_integral<F>(band: (f64, f64), breaks: &[f64], radius: f64, cfg: &QuadConfig, mut f: F) -> Result<Complex64>
where
    F: FnMut(f64, f64) -> Result<Complex64>,
{
    if !(band.1 > band.0) {
        return Ok(ZERO);
    }
    let r2 = 2.0 * radius;
    let sb = integer_breaks(-r2, r2);
    let mut failure = None;
    let r = integrate_2d(
        |s, d| match f(0.5 * (s - d), 0.5 * (s + d)) {
            Ok(v) => v * 0.5,
            Err(e) => {
                failure.get_or_insert(e);
                ZERO
            }
        },
        Rectangle::new(-r2, r2, band.0, band.1),
        &sb,
        breaks,
        cfg,
    )?;
    if let Some(e) = failure {
        return Err(e);
    }
    Ok(r.strict()?)
}

/// `‖K‖_{HS}` truncated to `|ξ+η| ≤ 2R`, with a bound on the omitted mass.
pub fn hs_norm(k: &KernelFunction, radius: f64, cfg: &QuadConfig) -> Result<HsNorm> {
    if !(radius > 0.0) {
        return Err(Error::InvalidArgument("radius must be positive"));
    }
    let tail_bound = tail(k, radius)?;
    let sq = band_integral(k.band, &k.breaks, radius, cfg, |xi, eta| {
        Ok(Complex64::new(k.eval(xi, eta)?.norm_sqr(), 0.0))
    })?
    .re;
    Ok(HsNorm {
        value: sq.sqrt(),
        squared: sq,
        tail_bound,
        radius,
    })
}

/// `∬ K₁ conj(K₂)` over `|ξ+η| ≤ 2R` and the Cauchy–Schwarz bound on the
/// omitted part.
pub fn hs_inner(k1: &KernelFunction, k2: &KernelFunction, radius: f64, cfg: &QuadConfig) -> Result<(Complex64, f64)> {
    if !(radius > 0.0) {
        return Err(Error::InvalidArgument("radius must be positive"));
    }
    let bound = (tail(k1, radius)? * tail(k2, radius)?).sqrt();
    let band = (k1.band.0.max(k2.band.0), k1.band.1.min(k2.band.1));
    let mut breaks = k1.breaks.clone();
    breaks.extend(k2.breaks.iter().copied());
    let v = band_integral(band, &breaks, radius, cfg, |xi, eta| {
        Ok(k1.eval(xi, eta)? * k2.eval(xi, eta)?.conj())
    })?;
    Ok((v, bound))
}

/// The kernel of `π(k,l) W(f)`, equal to the kernel of `W(T_{(k,l)} f)`:
/// `e^{2πi(kξ + kl/2)} K(ξ + l, η)`. The band moves to `[a + l, b + l)`.
pub fn pi_action(k: &KernelFunction, p: LatticePoint) -> KernelFunction {
    let (kk, ll) = (p.k as f64, p.l as f64);
    let inner = k.clone();
    let mut out = KernelFunction::new((k.band.0 + ll, k.band.1 + ll), k.sup_bound, move |xi, eta| {
        Ok(cis_pi(2.0 * kk * xi + kk * ll) * inner.eval(xi + ll, eta)?)
    })
    .with_breaks(k.breaks.iter().map(|b| b + ll).collect());
    out.envelope = k.envelope.map(|e| Envelope {
        offset: e.offset + ll.abs(),
        ..e
    });
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::twistops::{inner_product, norm_squared, twisted_translate};
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    #[test]
    fn phi1_kernel_values() {
        assert!((kernel_phi1(-0.25, 0.25) - Complex64::new(1.0, 0.0)).norm() < 1e-15);
        assert_eq!(kernel_phi1(0.0, 1.5), ZERO);
        let v = kernel_phi1(0.0, 1.0 - 1e-15);
        assert!((v - Complex64::new(0.0, 2.0 / PI)).norm() < 1e-12);
    }

    #[test]
    fn phi2_kernel_band_and_rewritten_form() {
        let cfg = QuadConfig::default();
        assert_eq!(kernel_phi_n(2, 0.0, 2.5, &cfg).unwrap(), ZERO);
        // K_φ₂ directly from φ₂ and the kernel integral
        let direct = kernel_of(&PlanarFunction::phi2(), cfg).unwrap();
        for (xi, eta) in [(0.0, 1.0), (0.3, 0.5), (-1.2, 0.1), (2.0, 3.7)] {
            let a = kernel_phi_n(2, xi, eta, &cfg).unwrap();
            let b = direct.eval(xi, eta).unwrap();
            assert!((a - b).norm() < 1e-10, "{xi} {eta}");
        }
    }

    #[test]
    fn composition_reproduces_phi2_kernel() {
        let cfg = QuadConfig::default();
        let k1 = phi_kernel(1, cfg).unwrap();
        let k2 = phi_kernel(2, cfg).unwrap();
        let c = kernel_compose(&k1, &k1, cfg).unwrap();
        assert_eq!(c.band, (0.0, 2.0));
        for (xi, eta) in [(0.0, 1.0), (0.2, 0.9), (-0.7, 0.6), (1.5, 2.1), (3.0, 4.99)] {
            let d = (c.eval(xi, eta).unwrap() - k2.eval(xi, eta).unwrap()).norm();
            assert!(d < 1e-8);
        }
        let z = kernel_compose(&KernelFunction::zero(), &k1, cfg).unwrap();
        assert_eq!(z.eval(0.1, 0.5).unwrap(), ZERO);
    }

    #[test]
    fn plancherel_phi1() {
        let cfg = QuadConfig::default().with_tolerance(1e-9);
        let h = hs_norm(&phi_kernel(1, cfg).unwrap(), 200.0, &cfg).unwrap();
        assert!((h.squared - 1.0).abs() <= h.tail_bound + 1e-6);
        assert!(h.squared < 1.0);
        let z = hs_norm(&KernelFunction::zero(), 200.0, &cfg).unwrap();
        assert_eq!(z.value, 0.0);
    }

    #[test]
    fn envelope_required() {
        let cfg = QuadConfig::default();
        let k = kernel_of(&PlanarFunction::phi1(), cfg).unwrap();
        assert!(hs_norm(&k, 10.0, &cfg).is_err());
    }

    #[test]
    fn pi_action_matches_translated_kernel() {
        let cfg = QuadConfig::default();
        let k1 = phi_kernel(1, cfg).unwrap();
        for p in [LatticePoint::new(1, 0), LatticePoint::new(-2, 1), LatticePoint::new(1, 1)] {
            let moved = pi_action(&k1, p);
            let direct = kernel_of(&twisted_translate(&PlanarFunction::phi1(), p), cfg).unwrap();
            for (xi, eta) in [(0.1, 0.4), (-0.3, 0.2), (1.0, 1.7), (0.25, 1.9), (-2.0, -0.5)] {
                let d = (moved.eval(xi, eta).unwrap() - direct.eval(xi, eta).unwrap()).norm();
                assert!(d < 1e-10, "{p:?} {xi} {eta}");
            }
        }
        let same = pi_action(&k1, LatticePoint::new(0, 0));
        assert_eq!(same.eval(0.2, 0.7).unwrap(), k1.eval(0.2, 0.7).unwrap());
    }

    #[test]
    fn pi_action_keeps_hs_norm() {
        let cfg = QuadConfig::default().with_tolerance(1e-9);
        let k1 = phi_kernel(1, cfg).unwrap();
        let a = hs_norm(&k1, 50.0, &cfg).unwrap();
        let b = hs_norm(&pi_action(&k1, LatticePoint::new(2, 1)), 50.0, &cfg).unwrap();
        assert!((a.squared - b.squared).abs() <= a.tail_bound + b.tail_bound);
    }

    #[test]
    fn inner_product_transfer() {
        let cfg = QuadConfig::default().with_tolerance(1e-9);
        let f = PlanarFunction::phi2();
        let g = twisted_translate(&f, LatticePoint::new(1, 0));
        let lhs = inner_product(&f, &g, &cfg).unwrap();
        let kf = phi_kernel(2, cfg).unwrap();
        let kg = pi_action(&kf, LatticePoint::new(1, 0));
        let (rhs, bound) = hs_inner(&kf, &kg, 100.0, &cfg).unwrap();
        assert!((lhs - rhs).norm() < 1e-6, "{lhs} {rhs} {bound}");
        let nf = norm_squared(&f, &cfg).unwrap();
        assert_abs_diff_eq!(nf, 15.924_694_960 / PI.powi(4), epsilon = 1e-8);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]
        #[test]
        fn band_is_respected(n in 1u32..4, xi in -5.0f64..5.0, d in -3.0f64..7.0) {
            let cfg = QuadConfig::default();
            prop_assume!(d < 0.0 || d >= n as f64);
            prop_assert_eq!(kernel_phi_n(n, xi, xi + d, &cfg).unwrap(), ZERO);
        }

        #[test]
        fn envelope_holds(n in 1u32..4, s in -60.0f64..60.0, d in 0.0f64..3.0) {
            let cfg = QuadConfig::default();
            let nf = n as f64;
            prop_assume!(d < nf && s.abs() > nf);
            let k = kernel_phi_n(n, 0.5 * (s - d), 0.5 * (s + d), &cfg).unwrap();
            prop_assert!(k.norm_sqr() <= 4.0 / (PI * PI * (s.abs() - nf + 1.0).powi(2)) + 1e-12);
            prop_assert!(k.norm() <= 1.0 + 1e-12);
        }
    }
}
