use thiserror::Error;

use crate::interpolant::Channel;

/// Errors produced by the library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension must be at least 1")]
    ZeroDimension,

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("Laguerre parameter must exceed -1, got {0}")]
    LaguerreParameter(f64),

    #[error("invalid polynomial: {0}")]
    InvalidPolynomial(String),

    #[error("table entry for the zero multi-index must be nonzero")]
    ZeroFourierValue,

    #[error("matrix is not symmetric positive definite")]
    NotPositiveDefinite,

    #[error("matrix is singular")]
    SingularMatrix,

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("missing sample channel {0}")]
    MissingChannel(Channel),

    #[error("channel {channel} has {got} values, window holds {expected}")]
    ChannelShape {
        channel: Channel,
        expected: usize,
        got: usize,
    },

    #[error("lattice window does not cover the truncation ball around the evaluation point (axis {axis})")]
    WindowTooSmall { axis: usize },

    #[error("derivative order {0} exceeds the supported maximum of 3")]
    DerivativeOrder(u32),

    #[error("operation not supported for anisotropic generators: {0}")]
    Anisotropic(&'static str),

    #[error("quadrature did not converge: estimated error {estimate:e} above tolerance {tol:e}")]
    QuadratureNotConverged { estimate: f64, tol: f64 },

    #[error("record format error: {0}")]
    Format(String),
}

pub type Result<T> = std::result::Result<T, Error>;
