use thiserror::Error;

use crate::quad::QuadError;
use crate::specfun::DomainError;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error(transparent)]
    Domain(#[from] DomainError),
    #[error(transparent)]
    Quadrature(#[from] QuadError),
    #[error("invalid argument: {0}")]
    InvalidArgument(&'static str),
    #[error("level {0} is outside the supported range |j| <= 8")]
    LevelOutOfRange(i32),
    #[error("spline order {0} is not supported here")]
    UnsupportedOrder(u32),
}
