//! Command-line front end: point evaluation, CSV grids and flat key=value
//! reports.

mod error;
mod grid;
mod output;
mod reports;

use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use twisted_bspline::quad::QuadConfig;

use crate::error::CliError;
use crate::grid::{GridSpec, GridTarget};
use crate::reports::ReportKind;

/// Environment variable naming the directory used when `--out` is absent.
pub const OUT_DIR_VAR: &str = "TWISTED_BSPLINE_OUT_DIR";

#[derive(Debug, Parser)]
#[command(name = "twisted-bspline", version, about = "Twisted B-splines on the plane")]
struct Cli {
    #[command(flatten)]
    run: RunConfig,
    #[command(subcommand)]
    command: Command,
}

/// Settings shared by every subcommand; all of them are echoed in outputs.
#[derive(Debug, Clone, Args)]
pub struct RunConfig {
    /// Quadrature tolerance.
    #[arg(long, global = true, default_value_t = 1e-10)]
    pub tol: f64,
    /// Gauss–Legendre nodes per panel (even, 2..=128).
    #[arg(long, global = true, default_value_t = 16)]
    pub nodes: usize,
    /// Truncation radius; the default depends on the report.
    #[arg(long, global = true)]
    pub radius: Option<i64>,
    /// Seed for the random coefficient sequences.
    #[arg(long, global = true, default_value_t = 7)]
    pub seed: u64,
    /// Number of random sequences in sampled checks.
    #[arg(long, global = true, default_value_t = 100)]
    pub trials: usize,
    /// Output file; stdout when absent and no output directory is set.
    #[arg(long, global = true)]
    pub out: Option<String>,
}

impl RunConfig {
    pub fn quad(&self) -> Result<QuadConfig, CliError> {
        let cfg = QuadConfig::default().with_tolerance(self.tol).with_nodes(self.nodes);
        cfg.validate()
            .map_err(|e| CliError::Usage(e.to_string()))?;
        Ok(cfg)
    }

    /// `key=value` pairs describing this configuration, with the radius the
    /// command actually used (`none` when it takes no radius).
    pub fn header(&self, radius: Option<i64>) -> Vec<(String, String)> {
        vec![
            ("tol".into(), format!("{:e}", self.tol)),
            ("nodes".into(), self.nodes.to_string()),
            ("radius".into(), radius.map_or("none".into(), |r| r.to_string())),
            ("seed".into(), self.seed.to_string()),
            ("trials".into(), self.trials.to_string()),
        ]
    }
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Print φₙ(x, y) as "re im".
    #[command(allow_negative_numbers = true)]
    Eval { n: u32, x: f64, y: f64 },
    /// Write a CSV grid of values.
    Grid {
        #[command(subcommand)]
        target: GridTarget,
        #[command(flatten)]
        spec: GridSpec,
    },
    /// Print a key=value report.
    Report {
        #[command(subcommand)]
        which: ReportKind,
    },
}

fn run(cli: Cli) -> Result<(), CliError> {
    let run = cli.run;
    match cli.command {
        Command::Eval { n, x, y } => {
            let cfg = run.quad()?;
            if n == 0 {
                return Err(CliError::Usage("order must be at least 1".into()));
            }
            let v = twisted_bspline::splines::phi_n(n, x, y, &cfg)?;
            println!("{} {}", output::fixed12(v.re), output::fixed12(v.im));
            Ok(())
        }
        Command::Grid { target, spec } => grid::run(&target, &spec, &run),
        Command::Report { which } => reports::run(&which, &run),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
