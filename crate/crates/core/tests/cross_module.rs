//! Checks that tie several modules together through the public API.

use std::f64::consts::PI;

use approx::assert_abs_diff_eq;
use proptest::prelude::*;
use twisted_bspline::gram::{gramian_phi2_integrals, quadratic_form, CoefficientSeq, ShiftTable};
use twisted_bspline::latticesums::{moment_pou_recursion, partial_sums};
use twisted_bspline::mra::{basis_fn, n_j, quadratic_form_s};
use twisted_bspline::quad::QuadConfig;
use twisted_bspline::splines::moment;
use twisted_bspline::twistops::{compose_translations, twisted_translate, LatticePoint, PlanarFunction};
use twisted_bspline::weyl::{hs_inner, phi_kernel, pi_action};
use twisted_bspline::Complex64;

#[test]
fn level_zero_basis_is_the_translate_system() {
    let phi = PlanarFunction::phi1();
    for (k, l) in [(0, 0), (2, -1), (-3, 4)] {
        let b = basis_fn(0, k, l).unwrap();
        let t = twisted_translate(&phi, LatticePoint::new(k, l));
        for (x, y) in [(0.25, 0.75), (0.5, 0.5), (0.9, 0.1)] {
            let (x, y) = (x + k as f64, y + l as f64);
            assert!((b.eval(x, y).unwrap() - t.eval(x, y).unwrap()).norm() < 1e-14);
        }
    }
}

#[test]
fn shift_table_agrees_with_direct_quadratic_form() {
    let cfg = QuadConfig::default();
    let mut c = CoefficientSeq::new();
    c.insert(LatticePoint::new(0, 0), Complex64::new(0.6, 0.1));
    c.insert(LatticePoint::new(1, -1), Complex64::new(-0.2, 0.5));
    c.insert(LatticePoint::new(-1, 0), Complex64::new(0.3, -0.4));
    let f = PlanarFunction::phi2();
    let direct = quadratic_form(&f, &c, &cfg).unwrap();
    let table = ShiftTable::build(&f, &cfg).unwrap().quadratic_form(&c);
    assert_abs_diff_eq!(direct, table, epsilon = 1e-10);
    let n = n_j(-2).unwrap();
    let table = ShiftTable::build(&n, &cfg).unwrap().quadratic_form(&c);
    assert_abs_diff_eq!(quadratic_form_s(&c, -2).unwrap(), table, epsilon = 1e-10);
}

#[test]
fn first_lattice_moment_matches_partial_sums() {
    let cfg = QuadConfig::default();
    let sums = partial_sums(4);
    for r in 1..=4 {
        let m = moment_pou_recursion(1, r, &cfg).unwrap();
        assert_abs_diff_eq!(m.re, sums[r as usize - 1] / (PI * PI), epsilon = 1e-9);
        assert_abs_diff_eq!(m.im, 0.0, epsilon = 1e-10);
    }
}

#[test]
fn second_lattice_moment_is_real() {
    let cfg = QuadConfig::default().with_tolerance(1e-8);
    let m = moment_pou_recursion(2, 2, &cfg).unwrap();
    assert!(m.im.abs() < 1e-8, "{m}");
    assert!(m.re.is_finite());
}

#[test]
fn gramian_diagonal_is_plancherel_norm() {
    let cfg = QuadConfig::default();
    let r = gramian_phi2_integrals(&cfg).unwrap();
    // ‖φ₂‖² = I₉/π⁴ through the Weyl transform
    let k = phi_kernel(2, cfg).unwrap();
    let (v, bound) = hs_inner(&k, &k, 100.0, &cfg).unwrap();
    assert!((v.re - r.i9.re / PI.powi(4)).abs() <= bound + 1e-4);
    assert_abs_diff_eq!(moment(1, &cfg).unwrap().re, 1.0);
}

#[test]
fn lattice_action_on_kernels_matches_gramian_entries() {
    // ⟨T_p φ₂, φ₂⟩ equals ⟨π(p) K, K⟩ in the Hilbert–Schmidt sense
    let cfg = QuadConfig::default();
    let r = gramian_phi2_integrals(&cfg).unwrap();
    let k = phi_kernel(2, cfg).unwrap();
    let shifted = pi_action(&k, LatticePoint::new(-1, 0));
    let (v, bound) = hs_inner(&shifted, &k, 100.0, &cfg).unwrap();
    let expect = r.i3 / PI.powi(4);
    assert!((v - expect).norm() <= bound + 1e-4, "{v} {expect}");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn translation_composes_with_sign(k1 in -3i64..=3, l1 in -3i64..=3, k2 in -3i64..=3, l2 in -3i64..=3,
                                      x in -4.0f64..6.0, y in -4.0f64..6.0) {
        let f = PlanarFunction::phi2();
        let (p1, p2) = (LatticePoint::new(k1, l1), LatticePoint::new(k2, l2));
        let nested = twisted_translate(&twisted_translate(&f, p2), p1).eval(x, y).unwrap();
        let (phase, sum) = compose_translations(p1, p2);
        let direct = twisted_translate(&f, sum).eval(x, y).unwrap() * phase;
        prop_assert!((nested - direct).norm() < 1e-12);
    }
}
