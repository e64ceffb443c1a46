//! Approximate Hermite quasi-interpolation on uniform grids.
//!
//! The coefficient pipeline ([`moments`]) is generic over [`Scalar`] and runs
//! exactly over [`Rational`]; evaluation is generic over [`Real`].

pub mod derivatives;
pub mod error;
pub mod interpolant;
pub mod linalg;
pub mod moments;
pub mod quadrature;
pub mod saturation;
pub mod scalar;
pub mod special_fn;
pub mod sum;
pub mod testfn;

pub use error::{Error, Result};
pub use interpolant::{Channel, HermiteData, QIConfig, QuasiInterpolant, Window};
pub use moments::{GeneratingFunction, QPolynomial};
pub use scalar::{DoubleDouble, Rational, Real, Scalar};
pub use special_fn::MultiIndex;

/// Double-precision generator.
pub type Generator = GeneratingFunction<f64>;
/// Generator with exact rational coefficients.
pub type ExactGenerator = GeneratingFunction<Rational>;
/// Polynomial `Q` with double-precision coefficients.
pub type QPoly = QPolynomial<f64>;
/// Polynomial `Q` with exact rational coefficients.
pub type ExactQ = QPolynomial<Rational>;
/// Double-precision sample record.
pub type Samples = HermiteData<f64>;
