//! Multi-index algebra and the special-function kernel.

mod hermite;
mod laguerre;
mod multi_index;

pub use hermite::{
    hermite_1d, hermite_1d_at_zero, hermite_at_zero, hermite_eval, hermite_monomial_coefficients,
    hermite_table,
};
pub(crate) use hermite::hermite_table_into;
pub use laguerre::{laguerre_coefficients, laguerre_eval};
pub use multi_index::{enumerate_indices, IndexSet, MultiIndex};
