//! Twisted multiresolution analysis: the Haar-type wavelet construction, the
//! `V₀ ⊄ V₁` diagnostic and the nonstationary levels built from
//! `N_j = 2^j φ₁(2^j ·, 2^j ·)`.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;
use num_traits::Float;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::gram::CoefficientSeq;
use crate::quad::{QuadConfig, Rectangle};
use crate::report::KvBlock;
use crate::splines::cis_pi;
use crate::twistops::{
    dilate, inner_product, lambda_twisted_translate, norm_squared, parity_sign, twisted_translate, LatticePoint,
    PlanarFunction,
};
use crate::{Error, Result};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Levels are limited to `|j| ≤ MAX_LEVEL`.
pub const MAX_LEVEL: i32 = 8;

fn check_level(j: i32) -> Result<()> {
    if j.abs() > MAX_LEVEL {
        Err(Error::LevelOutOfRange(j))
    } else {
        Ok(())
    }
}

fn pow2(j: i32) -> f64 {
    2f64.powi(j)
}

/// `N_j = 2^j φ₁(2^j x, 2^j y)`.
pub fn n_j(j: i32) -> Result<PlanarFunction> {
    check_level(j)?;
    dilate(&PlanarFunction::phi1(), pow2(j))
}

/// Level `j` of the nonstationary MRA.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MraLevel {
    pub j: i32,
}

impl MraLevel {
    pub fn new(j: i32) -> Result<Self> {
        check_level(j)?;
        Ok(Self { j })
    }

    /// `Φ_j = N_{2j}`.
    pub fn generator(&self) -> Result<PlanarFunction> {
        n_j(2 * self.j)
    }

    pub fn dilation(&self) -> f64 {
        pow2(-self.j)
    }

    pub fn lambda(&self) -> f64 {
        pow2(2 * self.j)
    }

    pub fn shift_scale(&self) -> f64 {
        pow2(-self.j)
    }

    /// Side length `2^{−j}` of the support squares.
    pub fn side(&self) -> f64 {
        pow2(-self.j)
    }
}

/// `D_{2^{−j}} (T_{(2^{−j}k, 2^{−j}l)})^{2^{2j}} Φ_j`.
pub fn basis_fn(j: i32, k: i64, l: i64) -> Result<PlanarFunction> {
    let level = MraLevel::new(j)?;
    let s = level.shift_scale();
    let shifted = lambda_twisted_translate(&level.generator()?, level.lambda(), s * k as f64, s * l as f64)?;
    dilate(&shifted, level.dilation())
}

/// `2^j e^{πi(lx − ky)} χ_{[k, k+2^{−j}) × [l, l+2^{−j})}(x, y)`.
pub fn basis_fn_closed(j: i32, k: i64, l: i64, x: f64, y: f64) -> Complex64 {
    let h = pow2(-j);
    let (kf, lf) = (k as f64, l as f64);
    if x >= kf && x < kf + h && y >= lf && y < lf + h {
        cis_pi(lf * x - kf * y) * pow2(j)
    } else {
        ZERO
    }
}

/// `⟨T_{(r,s)} N_j, N_j⟩` in closed form.
pub fn inner_nj(r: i64, s: i64, j: i32) -> Result<Complex64> {
    check_level(j)?;
    if (r, s) == (0, 0) {
        return Ok(Complex64::new(1.0, 0.0));
    }
    if j >= 0 {
        return Ok(ZERO);
    }
    let h = 1i64 << (-j);
    if r.abs() >= h || s.abs() >= h || r == 0 || s == 0 || r % 2 == 0 || s % 2 == 0 {
        return Ok(ZERO);
    }
    // both odd, so 1 − cos(πrs) = 2
    let rs = (r * s) as f64;
    Ok(Complex64::new(pow2(2 * j + 1) * 2.0 / (PI * PI * rs.abs()), 0.0))
}

/// `A_j`: nonzero `(r, s)` with `|r|, |s| ≤ 2^{−j} − 1`.
pub fn index_set_a(j: i32) -> Result<Vec<LatticePoint>> {
    check_level(j)?;
    if j >= 0 {
        return Ok(Vec::new());
    }
    let m = (1i64 << (-j)) - 1;
    let mut out = Vec::new();
    for r in -m..=m {
        for s in -m..=m {
            if (r, s) != (0, 0) {
                out.push(LatticePoint::new(r, s));
            }
        }
    }
    Ok(out)
}

/// `A_j^{(1)}`: `(0, s)` with `s > 0` together with every `(r, s)` with `r > 0`.
pub fn index_set_a1(j: i32) -> Result<Vec<LatticePoint>> {
    Ok(index_set_a(j)?
        .into_iter()
        .filter(|p| p.k > 0 || (p.k == 0 && p.l > 0))
        .collect())
}

/// `B_j^{(1)}`: the points of `A_j^{(1)}` where `⟨T_{(r,s)} N_j, N_j⟩ ≠ 0`.
pub fn index_set_b1(j: i32) -> Result<Vec<LatticePoint>> {
    let mut out = Vec::new();
    for p in index_set_a1(j)? {
        if inner_nj(p.k, p.l, j)? != ZERO {
            out.push(p);
        }
    }
    Ok(out)
}

/// `S = ‖Σ α_{k,l} T_{(k,l)} N_j‖² = ‖α‖² + R`, with `R` assembled from the
/// closed-form inner products over `A_j`.
pub fn quadratic_form_s(alpha: &CoefficientSeq, j: i32) -> Result<f64> {
    let a = index_set_a(j)?;
    let mut r = ZERO;
    for (p, cp) in alpha.iter() {
        for d in &a {
            let q = p - *d;
            let cq = alpha.get(q);
            if cq != ZERO {
                r += cp * cq.conj() * inner_nj(d.k, d.l, j)? * parity_sign(q.k * p.l - q.l * p.k);
            }
        }
    }
    Ok(alpha.norm_squared() + r.re)
}

/// Random-sequence check of `(1 − 2/π)‖α‖² ≤ S ≤ (1 + 2/π)‖α‖²`.
#[derive(Debug, Clone, PartialEq)]
pub struct MraRieszReport {
    pub j: i32,
    pub trials: usize,
    pub seed: u64,
    pub observed_min: f64,
    pub observed_max: f64,
    pub riesz_lower: f64,
    pub riesz_upper: f64,
    pub a_count: usize,
    pub b1_count: usize,
}

impl MraRieszReport {
    pub fn within(&self) -> bool {
        self.observed_min >= self.riesz_lower && self.observed_max <= self.riesz_upper
    }

    pub fn to_kv(&self) -> KvBlock {
        let mut kv = KvBlock::new();
        kv.text("j", self.j)
            .text("trials", self.trials)
            .text("seed", self.seed)
            .real("riesz_lower", self.riesz_lower)
            .real("riesz_upper", self.riesz_upper)
            .real("observed_min", self.observed_min)
            .real("observed_max", self.observed_max)
            .text("a_count", self.a_count)
            .text("b1_count", self.b1_count)
            .flag("riesz", self.within());
        kv
    }
}

pub fn certify_mra_riesz(j: i32, trials: usize, seed: u64) -> Result<MraRieszReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for _ in 0..trials {
        let alpha = CoefficientSeq::random_unit(&mut rng, 3);
        let s = quadratic_form_s(&alpha, j)?;
        lo = lo.min(s);
        hi = hi.max(s);
    }
    Ok(MraRieszReport {
        j,
        trials,
        seed,
        observed_min: lo,
        observed_max: hi,
        riesz_lower: 1.0 - 2.0 / PI,
        riesz_upper: 1.0 + 2.0 / PI,
        a_count: index_set_a(j)?.len(),
        b1_count: index_set_b1(j)?.len(),
    })
}

/// `c_{k,l} = ⟨D_{1/2} φ, T_{(k,l)} φ⟩` for `k, l ∈ {0, 1}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HaarCoefficients {
    /// Indexed `[k][l]`.
    pub table: [[Complex64; 2]; 2],
}

impl HaarCoefficients {
    pub fn get(&self, k: i64, l: i64) -> Complex64 {
        if (0..2).contains(&k) && (0..2).contains(&l) {
            self.table[k as usize][l as usize]
        } else {
            ZERO
        }
    }

    /// Indices whose coefficient exceeds `threshold` in modulus.
    pub fn support(&self, threshold: f64) -> Vec<LatticePoint> {
        let mut out = Vec::new();
        for k in 0..2 {
            for l in 0..2 {
                if self.get(k, l).norm() > threshold {
                    out.push(LatticePoint::new(k, l));
                }
            }
        }
        out
    }

    /// `Σ (−1)^{k+l} c_{k,l} c_{−k+1,l}`.
    pub fn cancellation_sum(&self) -> Complex64 {
        let mut acc = ZERO;
        for k in 0..2 {
            for l in 0..2 {
                acc += self.get(k, l) * self.get(1 - k, l) * parity_sign(k + l);
            }
        }
        acc
    }

    pub fn norm_squared(&self) -> f64 {
        self.table.iter().flatten().map(|c| c.norm_sqr()).sum()
    }
}

fn supported_in_unit_square(phi: &PlanarFunction) -> bool {
    let s = phi.support();
    s.x0 >= 0.0 && s.y0 >= 0.0 && s.x1 <= 1.0 && s.y1 <= 1.0
}

/// `D₂ T_{(k,l)} φ`.
fn refined(phi: &PlanarFunction, k: i64, l: i64) -> Result<PlanarFunction> {
    dilate(&twisted_translate(phi, LatticePoint::new(k, l)), 2.0)
}

/// `c_{k,l} = ⟨φ, D₂ T_{(k,l)} φ⟩`, the only possibly nonzero ones being
/// `k, l ∈ {0, 1}`.
pub fn haar_coefficients(phi: &PlanarFunction, cfg: &QuadConfig) -> Result<HaarCoefficients> {
    if !supported_in_unit_square(phi) {
        return Err(Error::InvalidArgument("scaling function must be supported in [0,1]²"));
    }
    let mut table = [[ZERO; 2]; 2];
    for (k, row) in table.iter_mut().enumerate() {
        for (l, c) in row.iter_mut().enumerate() {
            *c = inner_product(phi, &refined(phi, k as i64, l as i64)?, cfg)?;
        }
    }
    Ok(HaarCoefficients { table })
}

/// `ψ = Σ (−1)^{k+l} conj(c_{k,l}) D₂ T_{(−k+1,l)} φ` and the hypothesis it
/// relies on.
#[derive(Debug, Clone)]
pub struct WaveletCandidate {
    pub coefficients: HaarCoefficients,
    pub psi: PlanarFunction,
    /// `‖D_{1/2}φ‖² − Σ |c_{k,l}|²`, the distance² of `D_{1/2}φ` from the span
    /// of the translates when those are orthonormal.
    pub hypothesis_residual: f64,
    pub support_in_unit_square: bool,
}

impl WaveletCandidate {
    pub fn hypothesis_holds(&self) -> bool {
        self.hypothesis_residual.abs() < 1e-9
    }
}

pub fn build_psi(c: &HaarCoefficients, phi: &PlanarFunction, cfg: &QuadConfig) -> Result<WaveletCandidate> {
    let mut terms = Vec::new();
    for k in 0..2i64 {
        for l in 0..2i64 {
            let w = c.get(k, l).conj() * parity_sign(k + l);
            if w != ZERO {
                terms.push((w, refined(phi, 1 - k, l)?));
            }
        }
    }
    let mut support = Rectangle::new(f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
    let mut xb = vec![];
    let mut yb = vec![];
    for (_, t) in &terms {
        let s = t.support();
        support = Rectangle::new(support.x0.min(s.x0), support.x1.max(s.x1), support.y0.min(s.y0), support.y1.max(s.y1));
        xb.extend(t.x_breaks());
        yb.extend(t.y_breaks());
    }
    if terms.is_empty() {
        support = Rectangle::square(0.0, 0.0);
    }
    let support_in_unit_square = support.x0 >= 0.0 && support.y0 >= 0.0 && support.x1 <= 1.0 && support.y1 <= 1.0;
    let psi = PlanarFunction::new(support, move |x, y| {
        let mut acc = ZERO;
        for (w, t) in &terms {
            acc += *w * t.eval(x, y)?;
        }
        Ok(acc)
    })
    .with_breaks(xb, yb);
    let half = dilate(phi, 0.5)?;
    let hypothesis_residual = norm_squared(&half, cfg)? - c.norm_squared();
    Ok(WaveletCandidate {
        coefficients: *c,
        psi,
        hypothesis_residual,
        support_in_unit_square,
    })
}

/// `‖g‖² − Σ |⟨g, b⟩|²` over an orthonormal family `b`.
fn projection_residual<I>(g: &PlanarFunction, family: I, cfg: &QuadConfig) -> Result<f64>
where
    I: IntoIterator<Item = Result<PlanarFunction>>,
{
    let mut captured = 0.0;
    for b in family {
        let b = b?;
        if g.support().intersect(&b.support()).is_empty() {
            continue;
        }
        captured += inner_product(g, &b, cfg)?.norm_sqr();
    }
    Ok(norm_squared(g, cfg)? - captured)
}

/// Distance² of `e^{−πiy} χ_{[1,2]×[0,1]} = T_{(1,0)} φ₁` from the span of
/// `{D₂ T_{(k,l)} φ₁ : |k|, |l| ≤ truncation}`.
pub fn v0_not_in_v1_residual(truncation: i64, cfg: &QuadConfig) -> Result<f64> {
    if truncation < 2 {
        return Err(Error::InvalidArgument("truncation must be at least 2"));
    }
    let phi = PlanarFunction::phi1();
    let g = twisted_translate(&phi, LatticePoint::new(1, 0));
    projection_residual(&g, lattice(truncation).map(|p| refined(&phi, p.k, p.l)), cfg)
}

/// The same residual for `φ₁` itself.
pub fn phi1_v1_residual(truncation: i64, cfg: &QuadConfig) -> Result<f64> {
    let phi = PlanarFunction::phi1();
    projection_residual(&phi, lattice(truncation).map(|p| refined(&phi, p.k, p.l)), cfg)
}

fn lattice(radius: i64) -> impl Iterator<Item = LatticePoint> {
    (-radius..=radius).flat_map(move |k| (-radius..=radius).map(move |l| LatticePoint::new(k, l)))
}

/// Distance² of `basis_fn(j,k,l)` from the span of the level `j+1` system
/// `{basis_fn(j+1, k', l') : |k'|, |l'| ≤ truncation}`. The level `j+1`
/// system must be orthonormal, so `j ≥ −1`.
pub fn nesting_residual(j: i32, k: i64, l: i64, truncation: i64, cfg: &QuadConfig) -> Result<f64> {
    if j < -1 {
        return Err(Error::LevelOutOfRange(j));
    }
    check_level(j + 1)?;
    let g = basis_fn(j, k, l)?;
    projection_residual(&g, lattice(truncation).map(|p| basis_fn(j + 1, p.k, p.l)), cfg)
}

/// Generators per unit cell at consecutive levels.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DimensionCount {
    pub j: i32,
    pub generators_j: u64,
    pub generators_next: u64,
}

impl DimensionCount {
    /// Generators per unit cell left for a complement of `V_j` in `V_{j+1}`.
    pub fn complement(&self) -> i64 {
        self.generators_next as i64 - self.generators_j as i64
    }
}

/// Every level is indexed by `ℤ²` with one generator per unit cell.
pub fn dimension_count(j: i32) -> Result<DimensionCount> {
    check_level(j)?;
    check_level(j + 1)?;
    Ok(DimensionCount {
        j,
        generators_j: 1,
        generators_next: 1,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gram::ShiftTable;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    #[test]
    fn basis_examples() {
        let b = basis_fn(0, 0, 0).unwrap();
        assert_eq!(b.eval(0.3, 0.7).unwrap(), Complex64::new(1.0, 0.0));
        let b = basis_fn(1, 1, 2).unwrap();
        let v = b.eval(1.2, 2.3).unwrap();
        let expect = cis_pi(2.0 * 1.2 - 2.3) * 2.0;
        assert!((v - expect).norm() < 1e-12);
        assert_eq!(b.eval(1.6, 2.3).unwrap(), ZERO);
        assert!(basis_fn(9, 0, 0).is_err());
    }

    #[test]
    fn inner_products_against_quadrature() {
        let cfg = QuadConfig::default();
        assert_abs_diff_eq!(inner_nj(1, 1, -1).unwrap().re, 1.0 / (PI * PI), epsilon = 1e-15);
        assert_eq!(inner_nj(2, 1, -3).unwrap(), ZERO);
        assert_eq!(inner_nj(1, 1, 2).unwrap(), ZERO);
        for j in [-1, -2] {
            let n = n_j(j).unwrap();
            let m = (1i64 << (-j)) - 1;
            for r in -m..=m {
                for s in -m..=m {
                    let t = twisted_translate(&n, LatticePoint::new(r, s));
                    let q = inner_product(&t, &n, &cfg).unwrap();
                    let c = inner_nj(r, s, j).unwrap();
                    assert!((q - c).norm() < 1e-9, "{j} {r} {s} {q} {c}");
                    if (r, s) != (0, 0) {
                        assert!(c.norm() <= pow2(2 * j + 1) / PI);
                    }
                }
            }
        }
    }

    #[test]
    fn cardinalities() {
        for j in [-1, -2, -3] {
            let h = 1usize << (-j);
            assert_eq!(index_set_a(j).unwrap().len(), 4 * h * (h - 1));
            assert_eq!(index_set_a1(j).unwrap().len(), 2 * h * (h - 1));
            assert_eq!(index_set_b1(j).unwrap().len(), h * h / 2);
        }
    }

    #[test]
    fn s_matches_direct_norm() {
        let cfg = QuadConfig::default();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for j in [-1, -2] {
            let table = ShiftTable::build(&n_j(j).unwrap(), &cfg).unwrap();
            for _ in 0..5 {
                let alpha = CoefficientSeq::random_unit(&mut rng, 2);
                let s = quadratic_form_s(&alpha, j).unwrap();
                assert_abs_diff_eq!(s, table.quadratic_form(&alpha), epsilon = 1e-10);
            }
        }
        let alpha = CoefficientSeq::random_unit(&mut rng, 2);
        assert_abs_diff_eq!(quadratic_form_s(&alpha, 1).unwrap(), 1.0, epsilon = 1e-14);
    }

    #[test]
    fn riesz_sandwich() {
        for j in [-1, -2, -3] {
            let r = certify_mra_riesz(j, 500, 2024).unwrap();
            assert!(r.within(), "{r:?}");
        }
    }

    #[test]
    fn haar_wavelet_for_phi1() {
        let cfg = QuadConfig::default();
        let phi = PlanarFunction::phi1();
        let c = haar_coefficients(&phi, &cfg).unwrap();
        assert_abs_diff_eq!(c.get(0, 0).re, 0.5, epsilon = 1e-12);
        assert!((c.get(1, 0) - Complex64::new(0.0, 1.0 / PI)).norm() < 1e-12);
        assert!((c.get(1, 1) - Complex64::new(2.0 / (PI * PI), 0.0)).norm() < 1e-12);
        assert_eq!(c.support(1e-12).len(), 4);
        assert!(c.cancellation_sum().norm() < 1e-12);
        let w = build_psi(&c, &phi, &cfg).unwrap();
        assert!(w.support_in_unit_square);
        assert!(inner_product(&phi, &w.psi, &cfg).unwrap().norm() < 1e-9);
        assert_abs_diff_eq!(norm_squared(&w.psi, &cfg).unwrap(), c.norm_squared(), epsilon = 1e-10);
        for (k, l) in [(1, 0), (0, 1), (-1, -1), (2, 3)] {
            let t = twisted_translate(&phi, LatticePoint::new(k, l));
            assert!(inner_product(&w.psi, &t, &cfg).unwrap().norm() < 1e-9);
        }
        // D_{1/2}φ₁ is not in V₀
        let expect = 1.0 - (0.25 + 2.0 / (PI * PI) + 4.0 / PI.powi(4));
        assert_abs_diff_eq!(w.hypothesis_residual, expect, epsilon = 1e-10);
        assert!(!w.hypothesis_holds());
        let wide = dilate(&phi, 0.5).unwrap();
        assert!(haar_coefficients(&wide, &cfg).is_err());
    }

    #[test]
    fn v0_is_not_in_v1() {
        let cfg = QuadConfig::default();
        let r4 = v0_not_in_v1_residual(4, &cfg).unwrap();
        assert!(r4 > 0.01);
        assert_abs_diff_eq!(r4, v0_not_in_v1_residual(6, &cfg).unwrap(), epsilon = 1e-12);
        let g = twisted_translate(&PlanarFunction::phi1(), LatticePoint::new(1, 0));
        assert_abs_diff_eq!(norm_squared(&g, &cfg).unwrap(), 1.0, epsilon = 1e-14);
        let r = phi1_v1_residual(4, &cfg).unwrap();
        assert!(r > 0.0 && r < 1.0);
        assert!(v0_not_in_v1_residual(1, &cfg).is_err());
    }

    #[test]
    fn levels_are_not_nested() {
        // the level j+1 squares cover a quarter of each unit cell only
        let cfg = QuadConfig::default();
        assert_abs_diff_eq!(nesting_residual(0, 0, 0, 3, &cfg).unwrap(), 0.75, epsilon = 1e-12);
        assert_abs_diff_eq!(nesting_residual(1, 0, 0, 3, &cfg).unwrap(), 0.75, epsilon = 1e-12);
        let expect = 1.0 - (0.25 + 2.0 / (PI * PI) + 4.0 / PI.powi(4));
        assert_abs_diff_eq!(nesting_residual(-1, 0, 0, 3, &cfg).unwrap(), expect, epsilon = 1e-10);
        assert!(nesting_residual(-2, 0, 0, 3, &cfg).is_err());
        assert_eq!(dimension_count(0).unwrap().complement(), 0);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]
        #[test]
        fn compositional_matches_closed_form(j in -3i32..=3, k in -4i64..=4, l in -4i64..=4,
                                             sx in 0.0f64..1.0, sy in 0.0f64..1.0) {
            let h = pow2(-j);
            let (x, y) = (k as f64 + sx * h, l as f64 + sy * h);
            let b = basis_fn(j, k, l).unwrap();
            let v = b.eval(x, y).unwrap();
            prop_assert!((v - basis_fn_closed(j, k, l, x, y)).norm() < 1e-12);
            // also a point just outside
            let out = b.eval(x + h, y).unwrap();
            prop_assert!((out - basis_fn_closed(j, k, l, x + h, y)).norm() < 1e-12);
        }

        #[test]
        fn basis_has_unit_norm(j in -3i32..=3, k in -3i64..=3, l in -3i64..=3) {
            let cfg = QuadConfig::default();
            let n = norm_squared(&basis_fn(j, k, l).unwrap(), &cfg).unwrap();
            prop_assert!((n - 1.0).abs() < 1e-12);
        }

        #[test]
        fn cancellation_is_symbolic(re in prop::array::uniform8(-2.0f64..2.0)) {
            let mut table = [[ZERO; 2]; 2];
            for (i, c) in table.iter_mut().flatten().enumerate() {
                *c = Complex64::new(re[2 * i], re[2 * i + 1]);
            }
            let c = HaarCoefficients { table };
            prop_assert!(c.cancellation_sum().norm() < 1e-14);
        }
    }
}
