use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use crate::error::CliError;
use crate::{RunConfig, OUT_DIR_VAR};

/// Fixed point with 12 decimals, trailing zeros trimmed to one decimal.
pub fn fixed12(x: f64) -> String {
    let s = format!("{:.12}", x);
    let s = s.trim_end_matches('0');
    let s = if s.ends_with('.') { format!("{s}0") } else { s.to_string() };
    if s == "-0.0" {
        "0.0".into()
    } else {
        s
    }
}

/// Where output goes: `--out`, else `$OUT_DIR/<default_name>`, else stdout.
pub fn destination(run: &RunConfig, default_name: &str) -> Option<PathBuf> {
    if let Some(p) = &run.out {
        return Some(PathBuf::from(p));
    }
    std::env::var_os(OUT_DIR_VAR)
        .filter(|d| !d.is_empty())
        .map(|d| Path::new(&d).join(default_name))
}

pub fn open(dest: Option<&Path>) -> Result<Box<dyn Write>, CliError> {
    match dest {
        None => Ok(Box::new(BufWriter::new(io::stdout().lock()))),
        Some(p) => {
            let f = File::create(p).map_err(|source| CliError::Output {
                path: p.display().to_string(),
                source,
            })?;
            Ok(Box::new(BufWriter::new(f)))
        }
    }
}

pub fn io_error(dest: Option<&Path>, source: io::Error) -> CliError {
    CliError::Output {
        path: dest.map_or("stdout".into(), |p| p.display().to_string()),
        source,
    }
}
