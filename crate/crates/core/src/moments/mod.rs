//! Moment matrix, target moments and Hermite-Gaussian generating functions.

mod generator;
mod matrix;
mod qpoly;
mod verify;

pub use generator::{
    build_general_generator, build_hermite_generator, gaussian_reciprocal_table, Anisotropy,
    DerivativeExpansion, GeneratingFunction,
};
pub(crate) use generator::{gaussian_normalization, HermiteKernel};
pub use matrix::{build_moment_matrix, target_moments, MomentMatrix};
pub use qpoly::QPolynomial;
pub use verify::{
    gaussian_moment, generator_moments, hermite_gaussian_moment, verify_moment_conditions,
    MomentReport,
};
