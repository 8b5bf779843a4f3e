//! Lattice sums of twisted translates: the partition of unity for `φ₁`, the
//! integrals `ℐ(p,q)` whose sum gives `∬ Σ T_{(k,l)} φ₂`, and the constant
//! `C_φ₂`.

use alloc::vec::Vec;
use core::f64::consts::{FRAC_PI_2, PI};

use num_complex::Complex64;
use num_traits::Float;

use crate::quad::{integrate_2d, QuadConfig, Rectangle};
use crate::report::KvBlock;
use crate::specfun::{ci, ei_imag, si, EULER_GAMMA};
use crate::splines::{cis_pi, expm1_over};
use crate::{Error, Result};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Largest growth of the scaled terms from the inner to the outer half of
/// the computed range that still counts as confirmed decay.
pub const ENVELOPE_GROWTH: f64 = 1.25;

/// `Σ_{k,l} T_{(k,l)} φ₁ (x,y) = e^{πi(⌊y⌋x − ⌊x⌋y)}`.
pub fn pointwise_pou_phi1(x: f64, y: f64) -> Complex64 {
    cis_pi(y.floor() * x - x.floor() * y)
}

/// The pieces of `∬ Σ_{|k|,|l| ≤ M} T_{(k,l)} φ₁ = 1 + A + (B + C)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PouTruncation {
    pub m: u64,
    pub a: f64,
    pub b_plus_c: Complex64,
    pub total: Complex64,
}

/// `A = (4/π²) L_M²` with `L_M = 0` for even `M` and `−1/M` for odd `M`;
/// `B + C` vanishes for every `M`.
pub fn pou_phi1_truncated(m: u64) -> Result<PouTruncation> {
    if m == 0 {
        return Err(Error::InvalidArgument("truncation M must be at least 1"));
    }
    let l_m = if m % 2 == 0 { 0.0 } else { -1.0 / m as f64 };
    let a = 4.0 / (PI * PI) * l_m * l_m;
    Ok(PouTruncation {
        m,
        a,
        b_plus_c: ZERO,
        total: Complex64::new(1.0 + a, 0.0),
    })
}

/// The case split of `ℤ²` used for the closed forms of `ℐ(p,q)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CaseTag {
    /// `|p|, |q| ≤ 1`.
    SmallBlock,
    /// `(p, 0)`, `|p| ≥ 2`.
    Row0,
    /// `(p, 1)`, `|p| ≥ 2`.
    RowPlus1,
    /// `(p, −1)`, `|p| ≥ 2`.
    RowMinus1,
    /// `(0, q)`, `|q| ≥ 2`.
    Column0,
    /// `(1, q)`, `|q| ≥ 2`.
    ColumnPlus1,
    /// `(−1, q)`, `|q| ≥ 2`.
    ColumnMinus1,
    /// `p ≥ 2` and `q ≤ −2`.
    MixedSign,
    /// Every other point with `|p|, |q| ≥ 2`.
    BothLarge,
}

impl CaseTag {
    pub fn of(p: i64, q: i64) -> Self {
        match (p.abs() <= 1, q.abs() <= 1) {
            (true, true) => CaseTag::SmallBlock,
            (false, true) => match q {
                0 => CaseTag::Row0,
                1 => CaseTag::RowPlus1,
                _ => CaseTag::RowMinus1,
            },
            (true, false) => match p {
                0 => CaseTag::Column0,
                1 => CaseTag::ColumnPlus1,
                _ => CaseTag::ColumnMinus1,
            },
            (false, false) if p >= 2 && q <= -2 => CaseTag::MixedSign,
            (false, false) => CaseTag::BothLarge,
        }
    }
}

/// `Ei(ix)`; every caller passes a nonzero argument.
fn ei(x: f64) -> Complex64 {
    ei_imag(x).expect("Ei(ix) argument is nonzero in every case")
}

fn ln(x: f64) -> Complex64 {
    Complex64::new(x.ln(), 0.0)
}

fn small_block(p: i64, q: i64) -> Complex64 {
    let c = ci(PI).expect("positive argument");
    let s = si(PI).expect("positive argument");
    let g = EULER_GAMMA + PI.ln();
    let i10 = (ei(-PI) - ei(-2.0 * PI) + ln(2.0)) * Complex64::new(c - g, -s);
    let d = ei(PI) - ei(2.0 * PI);
    let i11 = (d.conj() + ln(2.0)) * (d + ln(2.0));
    let i1m1 = (ei(-PI) - 2.0 * ei(-2.0 * PI) + ei(-4.0 * PI)) * Complex64::new(c - g, s);
    match (p, q) {
        (0, 0) => Complex64::new((g - c).powi(2) + s * s, 0.0),
        (1, 0) | (0, -1) => i10,
        (0, 1) | (-1, 0) => i10.conj(),
        (1, 1) | (-1, -1) => i11,
        (1, -1) => i1m1,
        _ => i1m1.conj(),
    }
}

fn row0(p: f64) -> Complex64 {
    (ei(-PI * (p - 1.0)) - ei(-PI * p) + ln(p / (p - 1.0)))
        * (-ei(-PI * p) + ei(-PI * (p + 1.0)) + ln(p / (p + 1.0)))
}

fn row_plus1(p: f64) -> Complex64 {
    (-ei(-PI * (p - 1.0)) + ei(-2.0 * PI * (p - 1.0)) + ei(-PI * p) - ei(-2.0 * PI * p))
        * (ei(PI * p) - ei(PI * (p + 1.0)) + ln((p + 1.0) / p))
}

fn row_minus1(p: f64) -> Complex64 {
    (ei(-PI * p) - ei(-2.0 * PI * p) - ei(-PI * (p + 1.0)) + ei(-2.0 * PI * (p + 1.0)))
        * (-ei(PI * (p - 1.0)) + ei(PI * p) + ln((p - 1.0) / p))
}

/// `F₁(p,q) = Ei(iπp(q−1)) − Ei(iπpq) + Ei(iπ(p+1)q) − Ei(iπ(p+1)(q−1))`.
pub fn f1(p: i64, q: i64) -> Complex64 {
    let (p, q) = (p as f64, q as f64);
    ei(PI * p * (q - 1.0)) - ei(PI * p * q) + ei(PI * (p + 1.0) * q) - ei(PI * (p + 1.0) * (q - 1.0))
}

/// `ℐ(p,q) = ∫₀¹∫₀¹ e^{πi(uq − vp)} (e^{πi(u−p)} − 1)(e^{−πi(v−q)} − 1) / ((u−p)(v−q)) du dv`
/// from its closed forms.
pub fn cal_i(p: i64, q: i64) -> Complex64 {
    match CaseTag::of(p, q) {
        CaseTag::SmallBlock => small_block(p, q),
        CaseTag::Row0 => row0(p as f64),
        CaseTag::RowPlus1 => row_plus1(p as f64),
        CaseTag::RowMinus1 => row_minus1(p as f64),
        CaseTag::Column0 => row0(q as f64).conj(),
        CaseTag::ColumnPlus1 => row_plus1(q as f64).conj(),
        CaseTag::ColumnMinus1 => row_minus1(q as f64).conj(),
        CaseTag::MixedSign | CaseTag::BothLarge => f1(p, q) * f1(q, p).conj(),
    }
}

/// `ℐ(p,q)` by direct quadrature of its defining double integral.
pub fn cal_i_quadrature(p: i64, q: i64, cfg: &QuadConfig) -> Result<Complex64> {
    let (pf, qf) = (p as f64, q as f64);
    let r = integrate_2d(
        |u, v| {
            cis_pi(u * qf - v * pf) * expm1_over(PI * (u - pf)) * expm1_over(-PI * (v - qf)) * (-PI * PI)
        },
        Rectangle::square(0.0, 1.0),
        &[],
        &[],
        cfg,
    )?;
    Ok(r.strict()?)
}

/// Which real part `re_cal_i` evaluates.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReCase {
    Axis0,
    AxisPlus1,
    AxisMinus1,
    Generic(i64),
}

/// `Re ℐ` together with the decay scale it is compared against.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReCalI {
    pub p: i64,
    pub case: ReCase,
    pub value: f64,
    /// `(p−1)^{−2}`, or `(p−1)^{−2}(|q|−1)^{−2}` in the generic case.
    pub scale: f64,
}

impl ReCalI {
    pub fn scaled(&self) -> f64 {
        self.value.abs() / self.scale
    }
}

fn ci_pos(x: f64) -> f64 {
    ci(x).expect("positive argument")
}

fn si_pos(x: f64) -> f64 {
    si(x).expect("positive argument")
}

/// `u(p,q) + i v(p,q) = F₁(p,q)` for positive arguments, written with
/// `Ci` and `Si`.
fn uv(p: f64, q: f64) -> (f64, f64) {
    let args = [PI * p * (q - 1.0), PI * p * q, PI * (p + 1.0) * q, PI * (p + 1.0) * (q - 1.0)];
    let signs = [1.0, -1.0, 1.0, -1.0];
    let mut u = 0.0;
    let mut v = 0.0;
    for (a, s) in args.iter().zip(signs) {
        u += s * ci_pos(*a);
        // the −π/2 parts cancel because the signs sum to zero
        v += s * (si_pos(*a) - FRAC_PI_2);
    }
    (u, v)
}

/// `Re ℐ(p, ·)` for `p ≥ 2` written with `Ci`, `Si` and logarithms.
pub fn re_cal_i(p: i64, case: ReCase) -> Result<ReCalI> {
    if p < 2 {
        return Err(Error::InvalidArgument("p must be at least 2"));
    }
    let pf = p as f64;
    let d = (pf - 1.0).powi(2);
    let (value, scale) = match case {
        ReCase::Axis0 => {
            let re = (ci_pos(PI * (pf - 1.0)) - ci_pos(PI * pf) + (pf / (pf - 1.0)).ln())
                * (ci_pos(PI * (pf + 1.0)) - ci_pos(PI * pf) + (pf / (pf + 1.0)).ln())
                - (si_pos(PI * pf) - si_pos(PI * (pf - 1.0))) * (si_pos(PI * pf) - si_pos(PI * (pf + 1.0)));
            (re, 1.0 / d)
        }
        ReCase::AxisPlus1 => (row_plus1(pf).re, 1.0 / d),
        ReCase::AxisMinus1 => (row_minus1(pf).re, 1.0 / d),
        ReCase::Generic(q) => {
            if q.abs() < 2 {
                return Err(Error::InvalidArgument("generic case needs |q| ≥ 2"));
            }
            let scale = 1.0 / (d * ((q.abs() - 1) as f64).powi(2));
            let value = if q >= 2 {
                let (u1, v1) = uv(pf, q as f64);
                let (u2, v2) = uv(q as f64, pf);
                u1 * u2 + v1 * v2
            } else {
                cal_i(p, q).re
            };
            (value, scale)
        }
    };
    Ok(ReCalI { p, case, value, scale })
}

/// `log(p/(p−1)) ≤ 1/(p−1) ≤ 2/p`, `|log(p/(p+1))| ≤ 1/(p−1)` and
/// `log(p/(p−1)) |log(p/(p+1))| ≤ (p−1)^{−2}`.
pub fn log_bounds_hold(p: i64) -> bool {
    if p < 2 {
        return false;
    }
    let p = p as f64;
    let a = (p / (p - 1.0)).ln();
    let b = (p / (p + 1.0)).ln().abs();
    a <= 1.0 / (p - 1.0) && 1.0 / (p - 1.0) <= 2.0 / p && b <= 1.0 / (p - 1.0) && a * b <= 1.0 / (p - 1.0).powi(2)
}

/// Fit of `|term| ≈ c · scale` over a computed range.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnvelopeFit {
    /// Least-squares constant.
    pub c_fit: f64,
    /// Largest observed `|term| / scale`.
    pub c_max: f64,
    /// Constant used for tail bounds, `ENVELOPE_GROWTH · c_max`.
    pub c_envelope: f64,
    /// The scaled terms of the outer half grow by at most `ENVELOPE_GROWTH`
    /// over the inner half.
    pub validated: bool,
}

impl EnvelopeFit {
    /// `samples` are `(|term|, scale, outer)`.
    pub fn fit(samples: &[(f64, f64, bool)]) -> Self {
        let num: f64 = samples.iter().map(|(a, b, _)| a * b).sum();
        let den: f64 = samples.iter().map(|(_, b, _)| b * b).sum();
        let c_fit = if den > 0.0 { num / den } else { 0.0 };
        let ratio = |outer: bool| {
            samples
                .iter()
                .filter(|s| s.2 == outer)
                .map(|(a, b, _)| a / b)
                .fold(f64::NEG_INFINITY, f64::max)
        };
        let (inner, outer) = (ratio(false), ratio(true));
        let c_max = inner.max(outer).max(0.0);
        let validated = inner.is_finite() && outer.is_finite() && outer <= ENVELOPE_GROWTH * inner;
        Self {
            c_fit,
            c_max,
            c_envelope: ENVELOPE_GROWTH * c_max,
            validated,
        }
    }
}

/// Truncated `Σ_{|p|,|q| ≤ R} ℐ(p,q)` with a tail estimate.
#[derive(Debug, Clone, PartialEq)]
pub struct SumReport {
    pub truncation_radius: i64,
    pub partial_sum: Complex64,
    pub tail_bound: f64,
    /// Least-squares constant of the `(p−1)^{−2}(q−1)^{−2}` envelope.
    pub constant_c_fit: f64,
    pub axis_envelope: EnvelopeFit,
    pub quadrant_envelope: EnvelopeFit,
    pub small_block: Complex64,
    pub rows: Complex64,
    pub quadrants: Complex64,
}

impl SumReport {
    pub fn envelope_validated(&self) -> bool {
        self.axis_envelope.validated && self.quadrant_envelope.validated
    }

    /// `C_φ₂ ≈ partial_sum / π²`.
    pub fn constant(&self) -> f64 {
        self.partial_sum.re / (PI * PI)
    }

    pub fn to_kv(&self) -> KvBlock {
        let mut kv = KvBlock::new();
        kv.text("radius", self.truncation_radius)
            .complex("partial_sum", self.partial_sum)
            .real("c_phi2", self.constant())
            .real("tail_bound", self.tail_bound)
            .real("constant_c_fit", self.constant_c_fit)
            .real("axis_envelope", self.axis_envelope.c_envelope)
            .real("quadrant_envelope", self.quadrant_envelope.c_envelope)
            .flag("envelope_validated", self.envelope_validated());
        kv
    }
}

fn inverse_square_tail(from: i64) -> f64 {
    let head: f64 = (1..from).map(|m| 1.0 / (m as f64).powi(2)).sum();
    PI * PI / 6.0 - head
}

/// `Σ_{|p|,|q| ≤ R} ℐ(p,q)`, summed as the small block, the six rows and
/// columns through `p ≥ 2`, and the four quadrants through `p, q ≥ 2`.
pub fn c_phi2(radius: i64) -> Result<SumReport> {
    if radius < 2 {
        return Err(Error::InvalidArgument("radius must be at least 2"));
    }
    let mut small = ZERO;
    for p in -1..=1 {
        for q in -1..=1 {
            small += cal_i(p, q);
        }
    }
    let half = radius / 2 + 1;
    let mut rows = 0.0;
    let mut axis = Vec::new();
    for p in 2..=radius {
        for case in [ReCase::Axis0, ReCase::AxisPlus1, ReCase::AxisMinus1] {
            let r = re_cal_i(p, case)?;
            rows += 4.0 * r.value;
            axis.push((r.value.abs(), r.scale, p > half));
        }
    }
    let mut quadrants = 0.0;
    let mut quad = Vec::new();
    for p in 2..=radius {
        for q in 2..=radius {
            for qq in [-q, q] {
                let r = re_cal_i(p, ReCase::Generic(qq))?;
                quadrants += 2.0 * r.value;
                quad.push((r.value.abs(), r.scale, p.max(q) > half));
            }
        }
    }
    let axis_envelope = EnvelopeFit::fit(&axis);
    let quadrant_envelope = EnvelopeFit::fit(&quad);
    let single = inverse_square_tail(radius);
    let zeta2 = PI * PI / 6.0;
    let double = zeta2 * zeta2 - (zeta2 - single).powi(2);
    let tail_bound = 12.0 * axis_envelope.c_envelope * single + 4.0 * quadrant_envelope.c_envelope * double;
    Ok(SumReport {
        truncation_radius: radius,
        partial_sum: small + Complex64::new(rows + quadrants, 0.0),
        tail_bound,
        constant_c_fit: quadrant_envelope.c_fit,
        axis_envelope,
        quadrant_envelope,
        small_block: small,
        rows: Complex64::new(rows, 0.0),
        quadrants: Complex64::new(quadrants, 0.0),
    })
}

/// Real parts of the square partial sums `Σ_{|p|,|q| ≤ R} ℐ(p,q)` for
/// `R = 1, …, max_radius`, built shell by shell.
pub fn partial_sums(max_radius: i64) -> Vec<f64> {
    let mut out = Vec::new();
    let mut acc = 0.0;
    for r in 1..=max_radius.max(0) {
        if r == 1 {
            for p in -1..=1 {
                for q in -1..=1 {
                    acc += cal_i(p, q).re;
                }
            }
        } else {
            for t in -r..=r {
                acc += cal_i(r, t).re + cal_i(-r, t).re;
            }
            for t in -(r - 1)..=(r - 1) {
                acc += cal_i(t, r).re + cal_i(t, -r).re;
            }
        }
        out.push(acc);
    }
    out
}

/// Smallest square radius `R ≤ max_radius` whose partial sum lies within
/// `tolerance` of `target`.
pub fn radius_reaching(target: f64, tolerance: f64, max_radius: i64) -> Option<i64> {
    partial_sums(max_radius)
        .iter()
        .position(|s| (s - target).abs() <= tolerance)
        .map(|i| i as i64 + 1)
}

/// The `L` family of the translated sums,
/// `Lₙ(u,v) = ∬ e^{πi(uy − vx)} Σ_{k,l} T_{(k,l)} φₙ(x−u, y−v) dx dy`, with the
/// lattice sum truncated to `|p|, |q| ≤ radius`.
pub fn pou_l_function(n: u32, radius: i64, u: f64, v: f64, cfg: &QuadConfig) -> Result<Complex64> {
    match n {
        0 => Err(Error::UnsupportedOrder(0)),
        1 => {
            let mut a = ZERO;
            let mut b = ZERO;
            for p in -radius..=radius {
                let pf = p as f64;
                a += cis_pi(-v * pf) * expm1_over(PI * (u - pf));
                b += cis_pi(u * pf) * expm1_over(-PI * (v - pf));
            }
            // the factors π and −π of the two sums cancel the 1/π²
            Ok(-a * b)
        }
        _ => {
            let mut failure = None;
            let r = integrate_2d(
                |s, t| match pou_l_function(n - 1, radius, u + s, v + t, cfg) {
                    Ok(val) => cis_pi(u * t - v * s) * val,
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

/// `∬_Q Lₙ = ∬ Σ T_{(k,l)} φₙ₊₁` with the lattice sum truncated to
/// `|p|, |q| ≤ radius`.
pub fn moment_pou_recursion(n: u32, radius: i64, cfg: &QuadConfig) -> Result<Complex64> {
    if n == 0 {
        return Err(Error::UnsupportedOrder(0));
    }
    let mut failure = None;
    let r = integrate_2d(
        |u, v| match pou_l_function(n, radius, u, v, cfg) {
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

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quad::GaussRule;
    use crate::twistops::{twisted_translate, LatticePoint, PlanarFunction};
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    #[test]
    fn pou_examples() {
        assert_eq!(pointwise_pou_phi1(0.3, 0.8), Complex64::new(1.0, 0.0));
        assert!((pointwise_pou_phi1(1.5, 0.5) - Complex64::new(0.0, -1.0)).norm() < 1e-15);
        let t = pou_phi1_truncated(4).unwrap();
        assert_eq!((t.a, t.total.re), (0.0, 1.0));
        let t = pou_phi1_truncated(5).unwrap();
        assert_eq!(t.total.re, 1.0 + 4.0 / (25.0 * PI * PI));
        assert!(pou_phi1_truncated(0).is_err());
        assert!((pou_phi1_truncated(100_001).unwrap().total.re - 1.0).abs() < 1e-10);
    }

    #[test]
    fn truncated_pou_matches_direct_sums() {
        for m in 1..=12i64 {
            // A, B and C summed term by term
            let mut a = ZERO;
            let mut bc = ZERO;
            for k in -m..m {
                for l in -m..m {
                    if (k, l) == (0, 0) {
                        continue;
                    }
                    let cell = |t: i64| {
                        if t == 0 {
                            Complex64::new(1.0, 0.0)
                        } else {
                            (cis_pi(t as f64) - 1.0) / Complex64::new(0.0, PI * t as f64)
                        }
                    };
                    // ∫_k^{k+1} e^{πilx} dx ∫_l^{l+1} e^{−πiky} dy
                    let term = cis_pi((l * k) as f64) * cell(l) * cis_pi(-(k * l) as f64) * cell(-k);
                    if k != 0 && l != 0 {
                        a += term;
                    } else {
                        bc += term;
                    }
                }
            }
            let t = pou_phi1_truncated(m as u64).unwrap();
            assert!((a.re - t.a).abs() < 1e-12 && a.im.abs() < 1e-12, "{m}");
            assert!(bc.norm() < 1e-12);
        }
    }

    #[test]
    fn pou_pointwise_from_translates() {
        let f = PlanarFunction::phi1();
        let translates: Vec<_> = (-3..=3)
            .flat_map(|k| (-3..=3).map(move |l| LatticePoint::new(k, l)))
            .map(|p| twisted_translate(&f, p))
            .collect();
        let mut state = 17u64;
        for _ in 0..20 {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            let x = (state >> 11) as f64 / (1u64 << 53) as f64 * 6.0 - 3.0;
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            let y = (state >> 11) as f64 / (1u64 << 53) as f64 * 6.0 - 3.0;
            let sum: Complex64 = translates.iter().map(|t| t.eval(x, y).unwrap()).sum();
            assert!((sum - pointwise_pou_phi1(x, y)).norm() < 1e-14);
        }
    }

    #[test]
    fn case_tags_partition() {
        assert_eq!(CaseTag::of(0, 0), CaseTag::SmallBlock);
        assert_eq!(CaseTag::of(-5, 1), CaseTag::RowPlus1);
        assert_eq!(CaseTag::of(1, 7), CaseTag::ColumnPlus1);
        assert_eq!(CaseTag::of(3, -2), CaseTag::MixedSign);
        assert_eq!(CaseTag::of(-3, 2), CaseTag::BothLarge);
    }

    #[test]
    fn closed_forms_match_quadrature() {
        let cfg = QuadConfig::default();
        for p in -6..=6 {
            for q in -6..=6 {
                let a = cal_i(p, q);
                let b = cal_i_quadrature(p, q, &cfg).unwrap();
                assert!((a - b).norm() < 1e-7, "({p},{q}) {a} {b}");
            }
        }
    }

    #[test]
    fn small_block_values() {
        let c = ci(PI).unwrap();
        let s = si(PI).unwrap();
        let i00 = (EULER_GAMMA - c + PI.ln()).powi(2) + s * s;
        assert_abs_diff_eq!(cal_i(0, 0).re, i00, epsilon = 1e-15);
        assert_eq!(cal_i(0, 1), cal_i(1, 0).conj());
        assert_eq!(cal_i(-1, -1), cal_i(1, 1));
        let block: Complex64 = (-1..=1).flat_map(|p| (-1..=1).map(move |q| cal_i(p, q))).sum();
        assert_eq!(c_phi2(2).unwrap().small_block, block);
        assert!(block.im.abs() < 1e-14);
    }

    #[test]
    fn real_parts_agree_with_complex_forms() {
        for p in 2..30 {
            assert_abs_diff_eq!(re_cal_i(p, ReCase::Axis0).unwrap().value, cal_i(p, 0).re, epsilon = 1e-12);
            assert_abs_diff_eq!(re_cal_i(p, ReCase::AxisPlus1).unwrap().value, cal_i(p, 1).re, epsilon = 1e-12);
            for q in [2, 5, -3, -7] {
                let r = re_cal_i(p, ReCase::Generic(q)).unwrap();
                assert_abs_diff_eq!(r.value, cal_i(p, q).re, epsilon = 1e-12);
            }
        }
        assert!(re_cal_i(1, ReCase::Axis0).is_err());
        assert!(re_cal_i(3, ReCase::Generic(1)).is_err());
    }

    #[test]
    fn envelopes() {
        assert!((2..=50).all(log_bounds_hold));
        let axis: Vec<f64> = (2..=60).map(|p| re_cal_i(p, ReCase::Axis0).unwrap().scaled()).collect();
        assert!(axis.iter().all(|r| *r < 1.5));
        let mut worst: f64 = 0.0;
        for p in 2..=20 {
            for q in 2..=20 {
                for qq in [q, -q] {
                    worst = worst.max(re_cal_i(p, ReCase::Generic(qq)).unwrap().scaled());
                }
            }
        }
        assert!(worst < 0.5, "{worst}");
    }

    #[test]
    fn partial_sums_decomposition_and_stabilization() {
        let sums = partial_sums(50);
        for r in [5i64, 10, 25] {
            let rep = c_phi2(r).unwrap();
            assert_abs_diff_eq!(rep.partial_sum.re, sums[r as usize - 1], epsilon = 1e-12);
            assert!(rep.partial_sum.im.abs() < 1e-12);
            assert!(rep.tail_bound > 0.0);
            let twice = sums[2 * r as usize - 1];
            assert!((twice - rep.partial_sum.re).abs() <= rep.tail_bound);
        }
        assert!(c_phi2(20).unwrap().envelope_validated());
        assert!(c_phi2(1).is_err());
    }

    #[test]
    fn partial_sum_at_radius_one_hundred() {
        // the square partial sums decay like R^{-2}; the reference value is
        // the partial sum at R = 100
        let sums = partial_sums(100);
        assert_abs_diff_eq!(sums[99], 0.000_160_507, epsilon = 5e-9);
        assert!(sums[49] > 5e-4);
        assert_eq!(radius_reaching(0.000_160_507, 5e-7, 50), None);
        assert_eq!(radius_reaching(0.000_160_507, 5e-7, 120), Some(100));
    }

    #[test]
    fn pou_moment_matches_lattice_sum() {
        let cfg = QuadConfig::default();
        for r in [1i64, 3, 6] {
            let m = moment_pou_recursion(1, r, &cfg).unwrap();
            let s = partial_sums(r)[r as usize - 1];
            assert!((m.re - s / (PI * PI)).abs() < 1e-9, "{r}");
            assert!(m.im.abs() < 1e-10);
        }
    }

    #[test]
    fn pou_recursion_step_matches_tensor_rule() {
        let cfg = QuadConfig::default();
        let (u, v, r) = (0.5, 0.5, 2);
        let got = pou_l_function(2, r, u, v, &cfg).unwrap();
        let rule = GaussRule::new(24);
        let mut oracle = ZERO;
        for (s, ws) in rule.mapped(0.0, 1.0) {
            for (t, wt) in rule.mapped(0.0, 1.0) {
                let mut a = ZERO;
                for p in -r..=r {
                    for q in -r..=r {
                        let (pf, qf) = (p as f64, q as f64);
                        let (x, y) = (u + s, v + t);
                        let num = cis_pi(x * qf - y * pf)
                            * (cis_pi(x - pf) - 1.0)
                            * (cis_pi(-(y - qf)) - 1.0);
                        a += num / ((x - pf) * (y - qf) * PI * PI);
                    }
                }
                oracle += a * cis_pi(u * t - v * s) * (ws * wt);
            }
        }
        assert!((got - oracle).norm() < 1e-9, "{got} {oracle}");
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]
        #[test]
        fn symmetry_identities(p in -10i64..=10, q in -10i64..=10) {
            prop_assert!((cal_i(-p, -q) - cal_i(p, q).conj()).norm() < 1e-9);
            prop_assert!((cal_i(-p, q) - cal_i(q, -p).conj()).norm() < 1e-9);
            prop_assert!((cal_i(p, -q) - cal_i(-q, p).conj()).norm() < 1e-9);
        }

        #[test]
        fn pou_has_unit_modulus(x in -50.0f64..50.0, y in -50.0f64..50.0) {
            prop_assert!((pointwise_pou_phi1(x, y).norm() - 1.0).abs() < 1e-14);
        }

        #[test]
        fn odd_truncation_error(k in 0u64..500) {
            let m = 2 * k + 1;
            let t = pou_phi1_truncated(m).unwrap();
            let expect = 4.0 / (PI * PI * (m * m) as f64);
            prop_assert!((t.a - expect).abs() <= 1e-15 * expect);
            prop_assert_eq!(t.total.re, 1.0 + t.a);
        }
    }
}
