use std::f64::consts::PI;
use std::io::Write;

use clap::Subcommand;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use twisted_bspline::gram::{certify_riesz_phi2, gramian_phi2_integrals};
use twisted_bspline::latticesums::{
    c_phi2, moment_pou_recursion, pointwise_pou_phi1, pou_phi1_truncated, radius_reaching,
};
use twisted_bspline::mra::{
    build_psi, certify_mra_riesz, haar_coefficients, inner_nj, nesting_residual, v0_not_in_v1_residual,
};
use twisted_bspline::quad::QuadConfig;
use twisted_bspline::report::KvBlock;
use twisted_bspline::splines::moment;
use twisted_bspline::twistops::{twisted_translate, LatticePoint, PlanarFunction};
use twisted_bspline::Complex64;

use crate::error::CliError;
use crate::output::{destination, io_error, open};
use crate::RunConfig;

/// Reference values the reports are compared against.
pub mod reference {
    pub const I1: (f64, f64) = (0.531003, -0.467628);
    pub const I3: (f64, f64) = (-1.97877, 0.56791);
    pub const I7: (f64, f64) = (0.906616, -0.390131);
    pub const I9: f64 = 14.3661;
    /// Scaled by `π⁴`.
    pub const LOWER: f64 = 2.7424;
    pub const UPPER: f64 = 25.9898;
    pub const I_TOLERANCE: f64 = 1e-3;
    pub const C_PHI2: f64 = 0.000160507;
    pub const C_PHI2_TOLERANCE: f64 = 5e-7;
}

const CPHI2_RADIUS: i64 = 50;
const POU_RADIUS: i64 = 25;
const MRA_TRUNCATION: i64 = 4;

#[derive(Debug, Clone, Subcommand)]
pub enum ReportKind {
    /// Overlap integrals of φ₂ and the Riesz bounds they give.
    Gramian,
    /// Random-sequence check of the φ₂ Riesz bounds.
    Riesz,
    /// Truncated lattice sum for the φ₂ moment constant.
    Cphi2,
    /// Truncated partition of unity for φ₁.
    Pou,
    /// Riesz bounds and diagnostics of MRA level j.
    #[command(allow_negative_numbers = true)]
    Mra { j: i32 },
    /// The moment ∬ φₙ.
    Moments { n: u32 },
}

impl ReportKind {
    fn label(&self) -> String {
        match self {
            ReportKind::Gramian => "gramian".into(),
            ReportKind::Riesz => "riesz".into(),
            ReportKind::Cphi2 => "cphi2".into(),
            ReportKind::Pou => "pou".into(),
            ReportKind::Mra { j } => format!("mra_{j}"),
            ReportKind::Moments { n } => format!("moments_{n}"),
        }
    }
}

fn matches(kv: &mut KvBlock, key: &str, ok: bool) {
    kv.text(key, if ok { "MATCH" } else { "MISMATCH" });
}

fn close(z: Complex64, target: (f64, f64), tol: f64) -> bool {
    (z.re - target.0).abs() <= tol && (z.im - target.1).abs() <= tol
}

fn gramian(cfg: &QuadConfig) -> Result<KvBlock, CliError> {
    use reference::*;
    let r = gramian_phi2_integrals(cfg)?;
    let pi4 = PI.powi(4);
    let mut kv = r.to_kv();
    kv.real("lower_scaled", r.lower_bound * pi4)
        .real("upper_scaled", r.upper_bound * pi4)
        .real("reference_tolerance", I_TOLERANCE);
    for (key, value, target) in [("i1", r.i1, I1), ("i3", r.i3, I3), ("i7", r.i7, I7), ("i9", r.i9, (I9, 0.0))] {
        kv.real(&format!("{key}_reference_re"), target.0)
            .real(&format!("{key}_reference_im"), target.1);
        matches(&mut kv, &format!("{key}_reference"), close(value, target, I_TOLERANCE));
    }
    kv.real("lower_scaled_reference", LOWER).real("upper_scaled_reference", UPPER);
    matches(&mut kv, "lower_reference", (r.lower_bound * pi4 - LOWER).abs() <= I_TOLERANCE);
    matches(&mut kv, "upper_reference", (r.upper_bound * pi4 - UPPER).abs() <= I_TOLERANCE);
    kv.flag("riesz_certified", r.certifies_riesz());
    Ok(kv)
}

fn riesz(run: &RunConfig, cfg: &QuadConfig) -> Result<KvBlock, CliError> {
    let r = gramian_phi2_integrals(cfg)?;
    let cert = certify_riesz_phi2(&r, run.trials, run.seed, cfg)?;
    let mut kv = cert.to_kv();
    kv.flag("lower_positive", r.certifies_riesz());
    Ok(kv)
}

fn cphi2(run: &RunConfig) -> Result<KvBlock, CliError> {
    use reference::*;
    let radius = run.radius.unwrap_or(CPHI2_RADIUS);
    if radius < 2 {
        return Err(CliError::Usage("radius must be at least 2".into()));
    }
    let s = c_phi2(radius)?;
    let mut kv = s.to_kv();
    let reached = radius_reaching(C_PHI2, C_PHI2_TOLERANCE, radius);
    kv.real("reference", C_PHI2)
        .real("reference_tolerance", C_PHI2_TOLERANCE)
        .text("reference_radius", reached.map_or("none".into(), |r| r.to_string()));
    matches(&mut kv, "reference_match", reached.is_some());
    Ok(kv)
}

fn pou(run: &RunConfig, cfg: &QuadConfig) -> Result<KvBlock, CliError> {
    let m = run.radius.unwrap_or(POU_RADIUS);
    if m < 1 {
        return Err(CliError::Usage("radius must be at least 1".into()));
    }
    let t = pou_phi1_truncated(m as u64)?;
    let expect = if m % 2 == 1 { 1.0 + 4.0 / (PI * PI * (m * m) as f64) } else { 1.0 };
    let lattice = moment_pou_recursion(1, m, cfg)?;
    let phi = PlanarFunction::phi1();
    let mut rng = ChaCha8Rng::seed_from_u64(run.seed);
    let mut worst = 0.0f64;
    for _ in 0..run.trials {
        let (x, y): (f64, f64) = (rng.random_range(-6.0..6.0), rng.random_range(-6.0..6.0));
        let mut sum = Complex64::new(0.0, 0.0);
        for k in (x.floor() as i64 - 1)..=(x.floor() as i64 + 1) {
            for l in (y.floor() as i64 - 1)..=(y.floor() as i64 + 1) {
                sum += twisted_translate(&phi, LatticePoint::new(k, l)).eval(x, y)?;
            }
        }
        worst = worst.max((sum - pointwise_pou_phi1(x, y)).norm());
    }
    let mut kv = KvBlock::new();
    kv.text("m", m)
        .real("a", t.a)
        .complex("b_plus_c", t.b_plus_c)
        .complex("total", t.total)
        .real("expected_total", expect)
        .flag("closed_form", t.total.re == expect && t.total.im == 0.0)
        .complex("lattice_moment_phi2", lattice)
        .text("pointwise_samples", run.trials)
        .real("pointwise_max_error", worst)
        .flag("pointwise", worst <= 1e-12);
    Ok(kv)
}

fn mra(j: i32, run: &RunConfig, cfg: &QuadConfig) -> Result<KvBlock, CliError> {
    let r = certify_mra_riesz(j, run.trials, run.seed)?;
    let mut kv = r.to_kv();
    kv.complex("inner_1_1", inner_nj(1, 1, j)?);
    let truncation = run.radius.unwrap_or(MRA_TRUNCATION);
    if j >= -1 {
        kv.real("nesting_residual", nesting_residual(j, 0, 0, truncation.max(1), cfg)?);
    } else {
        kv.text("nesting_residual", "n/a");
    }
    let phi = PlanarFunction::phi1();
    let c = haar_coefficients(&phi, cfg)?;
    let w = build_psi(&c, &phi, cfg)?;
    kv.real("wavelet_hypothesis_residual", w.hypothesis_residual)
        .text("wavelet_hypothesis", if w.hypothesis_holds() { "HOLDS" } else { "FAILS" });
    let v0 = v0_not_in_v1_residual(truncation.max(2), cfg)?;
    kv.text("v0_truncation", truncation.max(2))
        .real("v0_not_in_v1_residual", v0)
        .flag("v0_not_in_v1", v0 > 0.01);
    Ok(kv)
}

fn moments(n: u32, cfg: &QuadConfig) -> Result<KvBlock, CliError> {
    if n == 0 {
        return Err(CliError::Usage("order must be at least 1".into()));
    }
    let mut kv = KvBlock::new();
    kv.text("order", n).complex("moment", moment(n, cfg)?);
    Ok(kv)
}

pub fn build(which: &ReportKind, run: &RunConfig) -> Result<KvBlock, CliError> {
    let cfg = run.quad()?;
    let radius = match which {
        ReportKind::Cphi2 => Some(run.radius.unwrap_or(CPHI2_RADIUS)),
        ReportKind::Pou => Some(run.radius.unwrap_or(POU_RADIUS)),
        ReportKind::Mra { .. } => Some(run.radius.unwrap_or(MRA_TRUNCATION)),
        _ => None,
    };
    let body = match *which {
        ReportKind::Gramian => gramian(&cfg)?,
        ReportKind::Riesz => riesz(run, &cfg)?,
        ReportKind::Cphi2 => cphi2(run)?,
        ReportKind::Pou => pou(run, &cfg)?,
        ReportKind::Mra { j } => mra(j, run, &cfg)?,
        ReportKind::Moments { n } => moments(n, &cfg)?,
    };
    let mut kv = KvBlock::new();
    kv.text("report", which.label());
    for (k, v) in run.header(radius) {
        kv.text(&format!("config_{k}"), v);
    }
    kv.extend(&body);
    Ok(kv)
}

pub fn run(which: &ReportKind, run: &RunConfig) -> Result<(), CliError> {
    let kv = build(which, run)?;
    let dest = destination(run, &format!("report_{}.txt", which.label()));
    let dest = dest.as_deref();
    let mut w = open(dest)?;
    w.write_all(kv.render().as_bytes()).map_err(|e| io_error(dest, e))?;
    w.flush().map_err(|e| io_error(dest, e))?;
    if kv.all_pass() {
        Ok(())
    } else {
        let failed: Vec<&str> = kv.entries().iter().filter(|(_, v)| v == "FAIL").map(|(k, _)| k.as_str()).collect();
        Err(CliError::Certification(failed.join(", ")))
    }
}
