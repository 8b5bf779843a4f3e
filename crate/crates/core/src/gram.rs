//! Gram matrices of twisted-translate systems `{T_{(k,l)} f}`.
//!
//! For integer shifts the Gram entries depend on `p − q` up to a sign,
//! `⟨T_p f, T_q f⟩ = (−1)^{q.k p.l − q.l p.k} ⟨T_{p−q} f, f⟩`, so one table of
//! base integrals per shift difference is enough.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;
use num_traits::Float;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::quad::{integrate_2d, GaussRule, QuadConfig};
use crate::report::KvBlock;
use crate::splines::cis_pi;
use crate::twistops::{parity_sign, LatticePoint, PlanarFunction};
use crate::{Error, Result};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// A finitely supported coefficient sequence on `ℤ²`.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct CoefficientSeq {
    coeffs: BTreeMap<LatticePoint, Complex64>,
}

impl CoefficientSeq {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn delta(p: LatticePoint) -> Self {
        let mut c = Self::new();
        c.insert(p, Complex64::new(1.0, 0.0));
        c
    }

    pub fn insert(&mut self, p: LatticePoint, value: Complex64) {
        if value == ZERO {
            self.coeffs.remove(&p);
        } else {
            self.coeffs.insert(p, value);
        }
    }

    pub fn get(&self, p: LatticePoint) -> Complex64 {
        self.coeffs.get(&p).copied().unwrap_or(ZERO)
    }

    pub fn iter(&self) -> impl Iterator<Item = (LatticePoint, Complex64)> + '_ {
        self.coeffs.iter().map(|(p, c)| (*p, *c))
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn norm_squared(&self) -> f64 {
        self.coeffs.values().map(|c| c.norm_sqr()).sum()
    }

    /// Random coefficients on `[−radius, radius]²`, scaled to unit norm.
    pub fn random_unit<R: Rng>(rng: &mut R, radius: i64) -> Self {
        let mut c = Self::new();
        for k in -radius..=radius {
            for l in -radius..=radius {
                let re: f64 = rng.random_range(-1.0..1.0);
                let im: f64 = rng.random_range(-1.0..1.0);
                c.insert(LatticePoint::new(k, l), Complex64::new(re, im));
            }
        }
        let n = c.norm_squared().sqrt();
        for v in c.coeffs.values_mut() {
            *v /= n;
        }
        c
    }
}

/// `⟨T_p f, T_q f⟩` by quadrature over the overlap of the two supports.
pub fn twisted_inner(f: &PlanarFunction, p: LatticePoint, q: LatticePoint, cfg: &QuadConfig) -> Result<Complex64> {
    let d = p - q;
    let (dk, dl) = (d.k as f64, d.l as f64);
    let s = f.support();
    let rect = s.intersect(&s.translate(dk, dl));
    let sign = parity_sign(q.k * p.l - q.l * p.k);
    if rect.is_empty() {
        return Ok(ZERO);
    }
    let mut xb = f.x_breaks();
    xb.extend(f.x_breaks().iter().map(|b| b + dk));
    let mut yb = f.y_breaks();
    yb.extend(f.y_breaks().iter().map(|b| b + dl));
    let mut failure = None;
    let r = integrate_2d(
        |x, y| match (f.eval(x - dk, y - dl), f.eval(x, y)) {
            (Ok(a), Ok(b)) => cis_pi(x * dl - y * dk) * a * b.conj(),
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
    Ok(r.strict()? * sign)
}

/// Base integrals `⟨T_Δ f, f⟩` for every shift `Δ` with overlapping supports.
///
/// `f` is sampled once on tensor Gauss nodes of a grid aligned with the
/// integer lattice; every base integral reuses the same samples. The grid is
/// refined until the embedded lower-order rule agrees to the tolerance.
#[derive(Debug, Clone, PartialEq)]
pub struct ShiftTable {
    base: BTreeMap<LatticePoint, Complex64>,
    pub error_estimate: f64,
    pub cells_per_unit: usize,
}

struct Samples {
    nx: usize,
    ny: usize,
    m: usize,
    values: Vec<Complex64>,
    weights: Vec<f64>,
    offsets: Vec<f64>,
}

impl Samples {
    fn take(f: &PlanarFunction, rule: &GaussRule, x0: f64, y0: f64, nx: usize, ny: usize, h: f64) -> Result<Self> {
        let m = rule.len();
        let pts: Vec<(f64, f64)> = rule.mapped(0.0, h).collect();
        let mut values = Vec::with_capacity(nx * ny * m * m);
        for j in 0..ny {
            for i in 0..nx {
                let cx = x0 + i as f64 * h;
                let cy = y0 + j as f64 * h;
                for (ty, _) in &pts {
                    for (tx, _) in &pts {
                        values.push(f.eval(cx + tx, cy + ty)?);
                    }
                }
            }
        }
        Ok(Self {
            nx,
            ny,
            m,
            values,
            weights: pts.iter().map(|p| p.1).collect(),
            offsets: pts.iter().map(|p| p.0).collect(),
        })
    }

    fn at(&self, i: usize, j: usize, a: usize, b: usize) -> Complex64 {
        self.values[((j * self.nx + i) * self.m + b) * self.m + a]
    }

    fn base(&self, x0: f64, y0: f64, h: f64, s: usize, d: LatticePoint) -> Complex64 {
        let (sk, sl) = (d.k * s as i64, d.l * s as i64);
        let (dk, dl) = (d.k as f64, d.l as f64);
        let mut acc = ZERO;
        for j in 0..self.ny as i64 {
            let js = j - sl;
            if js < 0 || js >= self.ny as i64 {
                continue;
            }
            for i in 0..self.nx as i64 {
                let is = i - sk;
                if is < 0 || is >= self.nx as i64 {
                    continue;
                }
                let cx = x0 + i as f64 * h;
                let cy = y0 + j as f64 * h;
                for b in 0..self.m {
                    let y = cy + self.offsets[b];
                    let mut row = ZERO;
                    for a in 0..self.m {
                        let x = cx + self.offsets[a];
                        let w = self.weights[a];
                        row += cis_pi(x * dl - y * dk)
                            * self.at(is as usize, js as usize, a, b)
                            * self.at(i as usize, j as usize, a, b).conj()
                            * w;
                    }
                    acc += row * self.weights[b];
                }
            }
        }
        acc
    }
}

impl ShiftTable {
    /// Requires a support whose corners lie on the integer lattice and a
    /// function that is smooth inside each unit cell.
    pub fn build(f: &PlanarFunction, cfg: &QuadConfig) -> Result<Self> {
        cfg.validate()?;
        let s = f.support();
        let integral = [s.x0, s.x1, s.y0, s.y1].iter().all(|v| v.fract() == 0.0 && v.is_finite());
        if !integral || s.is_empty() {
            return Err(Error::InvalidArgument("support must be a nonempty lattice-aligned rectangle"));
        }
        let wx = (s.x1 - s.x0) as i64;
        let wy = (s.y1 - s.y0) as i64;
        let fine_rule = GaussRule::new(cfg.node_count);
        let coarse_rule = GaussRule::new(cfg.node_count / 2);
        let mut per_unit = 1usize;
        loop {
            let h = 1.0 / per_unit as f64;
            let nx = wx as usize * per_unit;
            let ny = wy as usize * per_unit;
            let fine = Samples::take(f, &fine_rule, s.x0, s.y0, nx, ny, h)?;
            let coarse = Samples::take(f, &coarse_rule, s.x0, s.y0, nx, ny, h)?;
            let mut base = BTreeMap::new();
            let mut err: f64 = 0.0;
            for dk in -(wx - 1)..wx {
                for dl in -(wy - 1)..wy {
                    let d = LatticePoint::new(dk, dl);
                    let v = fine.base(s.x0, s.y0, h, per_unit, d);
                    let w = coarse.base(s.x0, s.y0, h, per_unit, d);
                    err = err.max((v - w).norm());
                    base.insert(d, v);
                }
            }
            if err <= cfg.tolerance || per_unit >= 8 {
                return Ok(Self {
                    base,
                    error_estimate: err,
                    cells_per_unit: per_unit,
                });
            }
            per_unit *= 2;
        }
    }

    /// `⟨T_Δ f, f⟩`, zero when the supports do not overlap.
    pub fn base(&self, d: LatticePoint) -> Complex64 {
        self.base.get(&d).copied().unwrap_or(ZERO)
    }

    pub fn inner(&self, p: LatticePoint, q: LatticePoint) -> Complex64 {
        self.base(p - q) * parity_sign(q.k * p.l - q.l * p.k)
    }

    pub fn shifts(&self) -> impl Iterator<Item = LatticePoint> + '_ {
        self.base.keys().copied()
    }

    /// `‖Σ c_p T_p f‖²`.
    pub fn quadratic_form(&self, c: &CoefficientSeq) -> f64 {
        let mut acc = ZERO;
        for (p, cp) in c.iter() {
            for d in self.shifts() {
                let q = p - d;
                let cq = c.get(q);
                if cq != ZERO {
                    acc += cp * cq.conj() * self.inner(p, q);
                }
            }
        }
        acc.re
    }

    /// The quadratic form split by shift class `p − q`, in the order
    /// `(−1,−1), (1,1), (−1,0), (1,0), (0,−1), (0,1), (−1,1), (1,−1), (0,0)`.
    pub fn s_terms(&self, c: &CoefficientSeq) -> [Complex64; 9] {
        const CLASSES: [(i64, i64); 9] = [(-1, -1), (1, 1), (-1, 0), (1, 0), (0, -1), (0, 1), (-1, 1), (1, -1), (0, 0)];
        let mut out = [ZERO; 9];
        for (slot, (dk, dl)) in CLASSES.iter().enumerate() {
            let d = LatticePoint::new(*dk, *dl);
            for (p, cp) in c.iter() {
                let q = p - d;
                out[slot] += cp * c.get(q).conj() * self.inner(p, q);
            }
        }
        out
    }
}

/// `‖Σ c_p T_p f‖²` through [`ShiftTable`].
pub fn quadratic_form(f: &PlanarFunction, c: &CoefficientSeq, cfg: &QuadConfig) -> Result<f64> {
    if c.is_empty() {
        return Ok(0.0);
    }
    Ok(ShiftTable::build(f, cfg)?.quadratic_form(c))
}

/// The overlap integrals of `φ₂` (scaled by `π⁴`) and the Riesz bounds they
/// imply.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GramianReport {
    pub order: u32,
    pub i1: Complex64,
    pub i3: Complex64,
    pub i5: Complex64,
    pub i7: Complex64,
    pub i9: Complex64,
    pub lower_bound: f64,
    pub upper_bound: f64,
    pub tolerance: f64,
}

impl GramianReport {
    pub fn off_diagonal_mass(&self) -> f64 {
        2.0 * self.i1.norm() + 4.0 * self.i3.norm() + 2.0 * self.i7.norm()
    }

    pub fn certifies_riesz(&self) -> bool {
        self.lower_bound > 0.0
    }

    pub fn to_kv(&self) -> KvBlock {
        let mut kv = KvBlock::new();
        kv.text("order", self.order)
            .complex("i1", self.i1)
            .complex("i3", self.i3)
            .complex("i5", self.i5)
            .complex("i7", self.i7)
            .complex("i9", self.i9)
            .real("lower", self.lower_bound)
            .real("upper", self.upper_bound)
            .real("tolerance", self.tolerance);
        kv
    }
}

/// `I₁, I₃, I₅, I₇, I₉` for `φ₂`: `π⁴ ⟨T_Δ φ₂, φ₂⟩` for
/// `Δ = (−1,−1), (−1,0), (0,−1), (−1,1), (0,0)`.
pub fn gramian_phi2_integrals(cfg: &QuadConfig) -> Result<GramianReport> {
    let f = PlanarFunction::phi2();
    let pi4 = PI.powi(4);
    let o = LatticePoint::new(0, 0);
    let at = |k, l| -> Result<Complex64> { Ok(twisted_inner(&f, LatticePoint::new(k, l), o, cfg)? * pi4) };
    let i1 = at(-1, -1)?;
    let i3 = at(-1, 0)?;
    let i5 = at(0, -1)?;
    let i7 = at(-1, 1)?;
    let i9 = at(0, 0)?;
    let mass = 2.0 * i1.norm() + 4.0 * i3.norm() + 2.0 * i7.norm();
    Ok(GramianReport {
        order: 2,
        i1,
        i3,
        i5,
        i7,
        i9,
        lower_bound: (i9.re - mass) / pi4,
        upper_bound: (i9.re + mass) / pi4,
        tolerance: cfg.tolerance,
    })
}

/// Extremes of `‖Σ c_p T_p φₙ‖² / ‖c‖²` over seeded random sequences.
#[derive(Debug, Clone, PartialEq)]
pub struct RatioSample {
    pub order: u32,
    pub trials: usize,
    pub seed: u64,
    pub radius: i64,
    pub min_ratio: f64,
    pub max_ratio: f64,
}

pub fn sample_ratios(f: &PlanarFunction, order: u32, trials: usize, seed: u64, radius: i64, cfg: &QuadConfig) -> Result<RatioSample> {
    let table = ShiftTable::build(f, cfg)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut min_ratio = f64::INFINITY;
    let mut max_ratio: f64 = 0.0;
    for _ in 0..trials {
        let c = CoefficientSeq::random_unit(&mut rng, radius);
        let r = table.quadratic_form(&c) / c.norm_squared();
        min_ratio = min_ratio.min(r);
        max_ratio = max_ratio.max(r);
    }
    Ok(RatioSample {
        order,
        trials,
        seed,
        radius,
        min_ratio,
        max_ratio,
    })
}

/// Random-sequence check that the `φ₂` quadratic form stays inside the
/// bounds of `report`.
#[derive(Debug, Clone, PartialEq)]
pub struct RieszCertificate {
    pub sample: RatioSample,
    pub lower_bound: f64,
    pub upper_bound: f64,
    pub within: bool,
}

impl RieszCertificate {
    pub fn to_kv(&self) -> KvBlock {
        let mut kv = KvBlock::new();
        kv.text("trials", self.sample.trials)
            .text("seed", self.sample.seed)
            .text("radius", self.sample.radius)
            .real("min_ratio", self.sample.min_ratio)
            .real("max_ratio", self.sample.max_ratio)
            .real("lower", self.lower_bound)
            .real("upper", self.upper_bound)
            .flag("within_bounds", self.within);
        kv
    }
}

pub fn certify_riesz_phi2(report: &GramianReport, trials: usize, seed: u64, cfg: &QuadConfig) -> Result<RieszCertificate> {
    let sample = sample_ratios(&PlanarFunction::phi2(), 2, trials, seed, 3, cfg)?;
    let slack = 1e-9;
    let within = sample.min_ratio >= report.lower_bound - slack && sample.max_ratio <= report.upper_bound + slack;
    Ok(RieszCertificate {
        sample,
        lower_bound: report.lower_bound,
        upper_bound: report.upper_bound,
        within,
    })
}

/// Largest sampled Bessel ratio for `φₙ` against the bound `B₂ ‖φ₁‖² = B₂`
/// carried up from order two.
#[derive(Debug, Clone, PartialEq)]
pub struct BesselReport {
    pub sample: RatioSample,
    pub chain_bound: f64,
    pub within: bool,
}

impl BesselReport {
    pub fn to_kv(&self) -> KvBlock {
        let mut kv = KvBlock::new();
        kv.text("order", self.sample.order)
            .text("trials", self.sample.trials)
            .text("seed", self.sample.seed)
            .real("max_ratio", self.sample.max_ratio)
            .real("chain_bound", self.chain_bound)
            .flag("bessel_bound", self.within);
        kv
    }
}

pub fn bessel_upper_bound(n: u32, trials: usize, seed: u64, chain_bound: f64, cfg: &QuadConfig) -> Result<BesselReport> {
    if n < 2 {
        return Err(Error::UnsupportedOrder(n));
    }
    let f = if n == 2 {
        PlanarFunction::phi2()
    } else {
        PlanarFunction::phi(n, *cfg)?
    };
    let sample = sample_ratios(&f, n, trials, seed, 2, cfg)?;
    let within = sample.max_ratio <= chain_bound + cfg.tolerance.max(1e-9);
    Ok(BesselReport {
        sample,
        chain_bound,
        within,
    })
}
