use crate::scalar::Scalar;
use crate::special_fn::{enumerate_indices, IndexSet, MultiIndex};

use super::qpoly::{factorial_scalar, QPolynomial};

/// Unit upper-triangular matrix `𝒜_{αβ} = a_{β−α}` (zero unless `α ≤ β`)
/// over the graded-lex index set `|α| ≤ N − 1`, with its inverse.
#[derive(Debug, Clone)]
pub struct MomentMatrix<T> {
    indices: IndexSet,
    entries: Vec<T>,
    inverse: Vec<T>,
}

impl<T: Scalar> MomentMatrix<T> {
    pub fn indices(&self) -> &IndexSet {
        &self.indices
    }

    pub fn size(&self) -> usize {
        self.indices.len()
    }

    /// Entry by position in the index set.
    pub fn entry_at(&self, i: usize, j: usize) -> &T {
        &self.entries[i * self.size() + j]
    }

    pub fn inverse_at(&self, i: usize, j: usize) -> &T {
        &self.inverse[i * self.size() + j]
    }

    pub fn entry(&self, alpha: &MultiIndex, beta: &MultiIndex) -> Option<&T> {
        Some(self.entry_at(self.indices.position(alpha)?, self.indices.position(beta)?))
    }

    pub fn inverse_entry(&self, alpha: &MultiIndex, beta: &MultiIndex) -> Option<&T> {
        Some(self.inverse_at(self.indices.position(alpha)?, self.indices.position(beta)?))
    }

    /// `𝒜^{(−1)}_{0α}` for every α in index order.
    pub fn inverse_first_row(&self) -> &[T] {
        &self.inverse[..self.size()]
    }

    /// Dense copies of `A` and `A^{-1}` as row vectors.
    pub fn dense(&self) -> (Vec<Vec<T>>, Vec<Vec<T>>) {
        let k = self.size();
        (
            self.entries.chunks(k).map(|r| r.to_vec()).collect(),
            self.inverse.chunks(k).map(|r| r.to_vec()).collect(),
        )
    }
}

/// Builds `𝒜` from `Q` and inverts it by back-substitution.
pub fn build_moment_matrix<T: Scalar>(q: &QPolynomial<T>) -> MomentMatrix<T> {
    let indices = enumerate_indices(q.dim(), q.order() - 1)
        .expect("QPolynomial guarantees a positive dimension");
    let k = indices.len();
    let mut entries = vec![T::zero(); k * k];
    // Nonzero strictly-upper entries per row.
    let mut upper: Vec<Vec<(usize, T)>> = vec![Vec::new(); k];
    for (i, alpha) in indices.iter().enumerate() {
        for (gamma, a) in q.coefficients() {
            let beta = alpha.add(gamma);
            if let Some(j) = indices.position(&beta) {
                entries[i * k + j] = a.clone();
                if j != i {
                    upper[i].push((j, a.clone()));
                }
            }
        }
    }

    // X = A^{-1} is unit upper triangular; row i satisfies
    // X_i = e_i − Σ_{j>i} A_ij X_j.
    let mut inverse = vec![T::zero(); k * k];
    for i in (0..k).rev() {
        let mut row = vec![T::zero(); k];
        row[i] = T::one();
        for (j, a) in &upper[i] {
            for c in *j..k {
                let x = &inverse[j * k + c];
                if !x.is_zero() {
                    row[c] = row[c].clone() - a.clone() * x.clone();
                }
            }
        }
        inverse[i * k..(i + 1) * k].clone_from_slice(&row);
    }

    MomentMatrix {
        indices,
        entries,
        inverse,
    }
}

/// Target moments `∫ x^α ℋ = α! 𝒜^{(−1)}_{0α}` for `|α| ≤ N − 1`.
pub fn target_moments<T: Scalar>(q: &QPolynomial<T>) -> Vec<(MultiIndex, T)> {
    let m = build_moment_matrix(q);
    m.indices()
        .iter()
        .zip(m.inverse_first_row())
        .map(|(alpha, x)| (alpha.clone(), factorial_scalar::<T>(alpha) * x.clone()))
        .collect()
}
