use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Library(#[from] twisted_bspline::Error),
    #[error("cannot write {path}: {source}")]
    Output { path: String, source: std::io::Error },
    #[error("certification failed: {0}")]
    Certification(String),
}

impl CliError {
    /// 2 for bad input, 3 for numerical failures.
    pub fn exit_code(&self) -> u8 {
        use twisted_bspline::quad::QuadError;
        use twisted_bspline::Error;
        match self {
            CliError::Usage(_) | CliError::Output { .. } => 2,
            CliError::Certification(_) => 3,
            CliError::Library(e) => match e {
                Error::Quadrature(QuadError::ToleranceNotReached { .. } | QuadError::NonFinite { .. }) => 3,
                Error::Domain(_) => 3,
                _ => 2,
            },
        }
    }
}
