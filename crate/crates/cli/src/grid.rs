use std::io::Write;

use clap::{Args, Subcommand};
use twisted_bspline::mra::basis_fn;
use twisted_bspline::report::sci;
use twisted_bspline::splines::{tensor_bspline, TwistedSpline};
use twisted_bspline::Complex64;

use crate::error::CliError;
use crate::output::{destination, io_error, open};
use crate::RunConfig;

#[derive(Debug, Clone, Subcommand)]
pub enum GridTarget {
    /// The twisted B-spline φₙ.
    PhiN { n: u32 },
    /// The tensor product B-spline 𝔹ₙ(x)𝔹ₙ(y).
    TensorBspline { n: u32 },
    /// The MRA basis function of level j at (k, l); adds a modulus column.
    #[command(allow_negative_numbers = true)]
    BasisFn { j: i32, k: i64, l: i64 },
}

impl GridTarget {
    fn label(&self) -> String {
        match self {
            GridTarget::PhiN { n } => format!("phi_n_{n}"),
            GridTarget::TensorBspline { n } => format!("tensor_bspline_{n}"),
            GridTarget::BasisFn { j, k, l } => format!("basis_fn_{j}_{k}_{l}"),
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct GridSpec {
    /// Range of x as "lo,hi".
    #[arg(long, global = true, value_parser = parse_range, default_value = "0,2", allow_hyphen_values = true)]
    pub x_range: (f64, f64),
    /// Range of y as "lo,hi".
    #[arg(long, global = true, value_parser = parse_range, default_value = "0,2", allow_hyphen_values = true)]
    pub y_range: (f64, f64),
    /// Samples per axis, at least 2.
    #[arg(long, global = true, default_value_t = 65, value_parser = clap::value_parser!(u32).range(2..))]
    pub samples: u32,
}

pub fn parse_range(s: &str) -> Result<(f64, f64), String> {
    let (a, b) = s.split_once(',').ok_or_else(|| format!("expected lo,hi but got {s:?}"))?;
    let lo: f64 = a.trim().parse().map_err(|_| format!("bad number {a:?}"))?;
    let hi: f64 = b.trim().parse().map_err(|_| format!("bad number {b:?}"))?;
    if !(lo < hi) || !lo.is_finite() || !hi.is_finite() {
        return Err(format!("range {s:?} is empty"));
    }
    Ok((lo, hi))
}

pub fn axis(range: (f64, f64), samples: u32) -> Vec<f64> {
    let step = (range.1 - range.0) / (samples - 1) as f64;
    (0..samples)
        .map(|i| if i + 1 == samples { range.1 } else { range.0 + i as f64 * step })
        .collect()
}

enum Evaluator {
    Spline(TwistedSpline),
    Tensor(u32),
    Basis(twisted_bspline::twistops::PlanarFunction),
}

impl Evaluator {
    fn eval(&self, x: f64, y: f64) -> Result<Complex64, CliError> {
        Ok(match self {
            Evaluator::Spline(s) => s.eval(x, y)?,
            Evaluator::Tensor(n) => Complex64::new(tensor_bspline(*n, x, y), 0.0),
            Evaluator::Basis(f) => f.eval(x, y)?,
        })
    }
}

pub fn run(target: &GridTarget, spec: &GridSpec, run: &RunConfig) -> Result<(), CliError> {
    let cfg = run.quad()?;
    let (eval, with_modulus) = match *target {
        GridTarget::PhiN { n } => {
            if n == 0 {
                return Err(CliError::Usage("order must be at least 1".into()));
            }
            (Evaluator::Spline(TwistedSpline::new(n, cfg)?), false)
        }
        GridTarget::TensorBspline { n } => {
            if n == 0 {
                return Err(CliError::Usage("order must be at least 1".into()));
            }
            (Evaluator::Tensor(n), false)
        }
        GridTarget::BasisFn { j, k, l } => (Evaluator::Basis(basis_fn(j, k, l)?), true),
    };
    let label = target.label();
    let dest = destination(run, &format!("{label}.csv"));
    let dest = dest.as_deref();
    let mut w = open(dest)?;
    let mut header = vec![("target".to_string(), label.clone())];
    header.extend(run.header(None));
    header.push(("x_range".into(), format!("{},{}", sci(spec.x_range.0), sci(spec.x_range.1))));
    header.push(("y_range".into(), format!("{},{}", sci(spec.y_range.0), sci(spec.y_range.1))));
    header.push(("samples".into(), spec.samples.to_string()));
    for (k, v) in &header {
        writeln!(w, "# {k}={v}").map_err(|e| io_error(dest, e))?;
    }
    let mut csv = csv::Writer::from_writer(w);
    let columns: &[&str] = if with_modulus { &["x", "y", "modulus", "re", "im"] } else { &["x", "y", "re", "im"] };
    csv.write_record(columns).map_err(|e| io_error(dest, e.into()))?;
    let ys = axis(spec.y_range, spec.samples);
    for x in axis(spec.x_range, spec.samples) {
        for &y in &ys {
            let v = eval.eval(x, y)?;
            let mut row = vec![sci(x), sci(y)];
            if with_modulus {
                row.push(sci(v.norm()));
            }
            row.push(sci(v.re));
            row.push(sci(v.im));
            csv.write_record(&row).map_err(|e| io_error(dest, e.into()))?;
        }
    }
    csv.flush().map_err(|e| io_error(dest, e))?;
    Ok(())
}
