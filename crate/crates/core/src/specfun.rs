//! Sine and cosine integrals, the exponential integral on the imaginary axis
//! and the two sinc conventions.
//!
//! `Si` and `Ci` follow the usual conventions
//! `Si(x) = ∫₀ˣ sin t / t dt` and `Ci(x) = γ + ln x + ∫₀ˣ (cos t − 1) / t dt`.
//! Small arguments use the Taylor series, moderate ones the continued fraction
//! for `E₁(ix)`, and large ones the asymptotic `P`/`Q` expansion.

use core::f64::consts::{FRAC_PI_2, PI};

use num_complex::Complex64;
use num_traits::Float;
use thiserror::Error;

pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// Upper end of the Taylor regime.
pub const SERIES_LIMIT: f64 = 4.0;
/// Lower end of the asymptotic regime.
pub const ASYMPTOTIC_LIMIT: f64 = 40.0;

#[derive(Debug, Clone, Copy, PartialEq, Error)]
pub enum DomainError {
    #[error("Si is evaluated on [0, inf) only, got {0}")]
    Si(f64),
    #[error("Ci needs a positive finite argument, got {0}")]
    Ci(f64),
    #[error("Ei(ix) is singular at x = 0")]
    EiAtZero,
    #[error("non-finite argument {0}")]
    NonFinite(f64),
}

/// Euler's constant and π, bundled for reports.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Constants {
    pub euler_gamma: f64,
    pub pi: f64,
}

pub const CONSTANTS: Constants = Constants {
    euler_gamma: EULER_GAMMA,
    pi: PI,
};

/// `Ci` and `Si` evaluated at the same positive argument.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrigIntegralPair {
    pub ci: f64,
    pub si: f64,
    pub argument: f64,
}

impl TrigIntegralPair {
    pub fn new(x: f64) -> Result<Self, DomainError> {
        if !x.is_finite() {
            return Err(DomainError::NonFinite(x));
        }
        if x <= 0.0 {
            return Err(DomainError::Ci(x));
        }
        let (si, ci) = si_ci_positive(x);
        Ok(Self { ci, si, argument: x })
    }
}

/// Truncated auxiliary series `P` and `Q` of the large-argument expansion
/// `Ci(x) = sin x / x · P − cos x / x · Q`, `π/2 − Si(x) = cos x / x · P + sin x / x · Q`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AsymptoticPQ {
    pub p_value: f64,
    pub q_value: f64,
    pub order_n: u32,
    pub argument: f64,
}

impl AsymptoticPQ {
    /// Partial sums up to and including `k = order_n`.
    pub fn new(x: f64, order_n: u32) -> Self {
        let inv = 1.0 / x;
        let inv2 = inv * inv;
        let mut p = 0.0;
        let mut q = 0.0;
        // (2k)!/x^{2k} and (2k+1)!/x^{2k+1}
        let mut tp = 1.0;
        let mut tq = inv;
        for k in 0..=order_n {
            let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
            p += sign * tp;
            q += sign * tq;
            let kf = k as f64;
            tp *= (2.0 * kf + 1.0) * (2.0 * kf + 2.0) * inv2;
            tq *= (2.0 * kf + 2.0) * (2.0 * kf + 3.0) * inv2;
        }
        Self {
            p_value: p,
            q_value: q,
            order_n,
            argument: x,
        }
    }

    /// Largest order whose next term is still decreasing, capped at `max_order`.
    pub fn optimal(x: f64, max_order: u32) -> Self {
        let mut n = 0;
        let inv2 = 1.0 / (x * x);
        let mut term = 1.0;
        while n < max_order {
            let k = n as f64;
            let next = term * (2.0 * k + 1.0) * (2.0 * k + 2.0) * inv2;
            if next >= term || next < 1e-18 {
                break;
            }
            term = next;
            n += 1;
        }
        Self::new(x, n)
    }

    pub fn ci(&self) -> f64 {
        let x = self.argument;
        (x.sin() * self.p_value - x.cos() * self.q_value) / x
    }

    pub fn si(&self) -> f64 {
        let x = self.argument;
        FRAC_PI_2 - (x.cos() * self.p_value + x.sin() * self.q_value) / x
    }
}

/// Taylor series for `Si`; accurate to roughly machine precision for `x ≤ 4`.
pub fn si_series(x: f64) -> f64 {
    let x2 = x * x;
    let mut term = x;
    let mut sum = x;
    let mut k = 0.0;
    loop {
        // term_k = (-1)^k x^{2k+1}/(2k+1)!
        term *= -x2 / ((2.0 * k + 2.0) * (2.0 * k + 3.0));
        k += 1.0;
        let add = term / (2.0 * k + 1.0);
        sum += add;
        if add.abs() <= 1e-17 * sum.abs() || k > 200.0 {
            return sum;
        }
    }
}

/// Taylor series for `Ci`.
pub fn ci_series(x: f64) -> f64 {
    EULER_GAMMA + x.ln() - cin(x)
}

/// `Cin(x) = ∫₀ˣ (1 − cos t)/t dt`, an even entire function.
pub fn cin(x: f64) -> f64 {
    let x = x.abs();
    if x > SERIES_LIMIT {
        let (_, ci) = si_ci_positive(x);
        return EULER_GAMMA + x.ln() - ci;
    }
    let x2 = x * x;
    let mut term = 1.0;
    let mut sum = 0.0;
    let mut k = 0.0;
    loop {
        // term = (-1)^{k} x^{2k}/(2k)! with k advanced first
        term *= -x2 / ((2.0 * k + 1.0) * (2.0 * k + 2.0));
        k += 1.0;
        let add = -term / (2.0 * k);
        sum += add;
        if add.abs() <= 1e-17 * sum.abs() || k > 200.0 {
            return sum;
        }
    }
}

/// `(Si(x), Ci(x))` from the continued fraction of `E₁(ix)`.
pub fn si_ci_continued_fraction(x: f64) -> (f64, f64) {
    const TINY: f64 = 1e-300;
    let mut b = Complex64::new(1.0, x);
    let mut c = Complex64::new(1.0 / TINY, 0.0);
    let mut d = b.inv();
    let mut h = d;
    let mut i = 2u32;
    loop {
        let a = -(((i - 1) * (i - 1)) as f64);
        b += 2.0;
        d = (d * a + b).inv();
        c = b + c.inv() * a;
        let del = c * d;
        h *= del;
        if (del - 1.0).norm_sqr() < 1e-32 || i > 100_000 {
            break;
        }
        i += 1;
    }
    // h = e^{ix} E₁(ix)
    let e1 = h * Complex64::new(x.cos(), -x.sin());
    (FRAC_PI_2 + e1.im, -e1.re)
}

fn si_ci_positive(x: f64) -> (f64, f64) {
    if x <= SERIES_LIMIT {
        (si_series(x), ci_series(x))
    } else if x < ASYMPTOTIC_LIMIT {
        si_ci_continued_fraction(x)
    } else {
        let pq = AsymptoticPQ::optimal(x, 60);
        (pq.si(), pq.ci())
    }
}

pub fn si(x: f64) -> Result<f64, DomainError> {
    if !x.is_finite() {
        return Err(DomainError::NonFinite(x));
    }
    if x < 0.0 {
        return Err(DomainError::Si(x));
    }
    if x == 0.0 {
        return Ok(0.0);
    }
    Ok(si_ci_positive(x).0)
}

pub fn ci(x: f64) -> Result<f64, DomainError> {
    if !x.is_finite() {
        return Err(DomainError::NonFinite(x));
    }
    if x <= 0.0 {
        return Err(DomainError::Ci(x));
    }
    Ok(si_ci_positive(x).1)
}

/// `Si` extended to the whole line as an odd function.
pub fn si_odd(x: f64) -> f64 {
    if x == 0.0 {
        return 0.0;
    }
    let s = si_ci_positive(x.abs()).0;
    if x < 0.0 {
        -s
    } else {
        s
    }
}

/// `Ei(ix) = Ci(x) + i(Si(x) − π/2)` for `x > 0`, conjugated for `x < 0`.
pub fn ei_imag(x: f64) -> Result<Complex64, DomainError> {
    if !x.is_finite() {
        return Err(DomainError::NonFinite(x));
    }
    if x == 0.0 {
        return Err(DomainError::EiAtZero);
    }
    let (si, ci) = si_ci_positive(x.abs());
    let z = Complex64::new(ci, si - FRAC_PI_2);
    Ok(if x > 0.0 { z } else { z.conj() })
}

/// `G(x) = ∫₀ˣ (e^{it} − 1)/t dt = −Cin(x) + i Si(x)`, entire in `x`.
pub fn expm1_integral(x: f64) -> Complex64 {
    Complex64::new(-cin(x), si_odd(x))
}

/// Normalized sinc, `sin(πt)/(πt)`.
pub fn sinc_half(t: f64) -> f64 {
    sinc(PI * t)
}

/// Unnormalized sinc, `sin(u)/u`.
pub fn sinc(u: f64) -> f64 {
    if u.abs() < 1e-4 {
        let u2 = u * u;
        1.0 - u2 / 6.0 * (1.0 - u2 / 20.0)
    } else {
        u.sin() / u
    }
}
