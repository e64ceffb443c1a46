//! Quasi-interpolants over sampled lattice data.

mod config;
mod data;
mod eval;
mod report;

pub use config::QIConfig;
pub use data::{sample_on_window, Channel, HermiteData, Window};
pub use eval::{
    evaluate_anisotropic_qi, evaluate_harmonic_qi, evaluate_laplacian_qi, evaluate_qi,
    laplacian_weights, Evaluation, QuasiInterpolant,
};
pub use report::{fit_slopes, ErrorReport};
