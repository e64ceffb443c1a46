//! Small dense square matrices for the anisotropic kernels.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Row-major `n x n` matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SquareMatrix<R> {
    n: usize,
    data: Vec<R>,
}

impl<R> SquareMatrix<R> {
    pub(crate) fn data_at(&self, i: usize, j: usize) -> &R {
        &self.data[i * self.n + j]
    }

    pub(crate) fn map_entries<S, F: Fn(&R) -> S>(&self, f: F) -> SquareMatrix<S> {
        SquareMatrix {
            n: self.n,
            data: self.data.iter().map(f).collect(),
        }
    }
}

impl<R: Real> SquareMatrix<R> {
    pub fn identity(n: usize) -> Self {
        let mut data = vec![R::zero(); n * n];
        for i in 0..n {
            data[i * n + i] = R::one();
        }
        Self { n, data }
    }

    pub fn from_rows(rows: &[Vec<R>]) -> Result<Self> {
        let n = rows.len();
        if n == 0 {
            return Err(Error::ZeroDimension);
        }
        let mut data = Vec::with_capacity(n * n);
        for row in rows {
            if row.len() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    got: row.len(),
                });
            }
            data.extend_from_slice(row);
        }
        Ok(Self { n, data })
    }

    pub fn scaled_identity(n: usize, c: R) -> Self {
        let mut m = Self::identity(n);
        m.data.iter_mut().for_each(|v| *v = *v * c);
        m
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> R {
        self.data[i * self.n + j]
    }

    fn set(&mut self, i: usize, j: usize, v: R) {
        self.data[i * self.n + j] = v;
    }

    pub fn rows(&self) -> Vec<Vec<R>> {
        self.data.chunks(self.n).map(|r| r.to_vec()).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut t = self.clone();
        for i in 0..self.n {
            for j in 0..self.n {
                t.set(i, j, self.get(j, i));
            }
        }
        t
    }

    pub fn mul(&self, other: &Self) -> Self {
        let n = self.n;
        let mut out = Self::identity(n);
        for i in 0..n {
            for j in 0..n {
                let mut acc = R::zero();
                for k in 0..n {
                    acc = acc + self.get(i, k) * other.get(k, j);
                }
                out.set(i, j, acc);
            }
        }
        out
    }

    /// Writes `self * v` into `out`.
    #[inline]
    pub fn mul_vec_into(&self, v: &[R], out: &mut [R]) {
        for (i, o) in out.iter_mut().enumerate().take(self.n) {
            let row = &self.data[i * self.n..(i + 1) * self.n];
            *o = row
                .iter()
                .zip(v)
                .fold(R::zero(), |acc, (&a, &b)| acc + a * b);
        }
    }

    pub fn mul_vec(&self, v: &[R]) -> Vec<R> {
        let mut out = vec![R::zero(); self.n];
        self.mul_vec_into(v, &mut out);
        out
    }

    pub fn is_symmetric(&self, tol: R) -> bool {
        (0..self.n).all(|i| (0..i).all(|j| (self.get(i, j) - self.get(j, i)).abs() <= tol))
    }

    /// Lower-triangular `L` with `L Lᵀ = self`.
    pub fn cholesky_lower(&self) -> Result<Self> {
        let n = self.n;
        let scale = self.data.iter().fold(R::zero(), |m, v| m.max(v.abs()));
        if !self.is_symmetric(scale * <R as Real>::from_f64(1e-12)) {
            return Err(Error::NotPositiveDefinite);
        }
        let mut l = Self::scaled_identity(n, R::zero());
        for j in 0..n {
            let mut d = self.get(j, j);
            for k in 0..j {
                d = d - l.get(j, k) * l.get(j, k);
            }
            if !(d > R::zero()) {
                return Err(Error::NotPositiveDefinite);
            }
            let djj = d.sqrt();
            l.set(j, j, djj);
            for i in (j + 1)..n {
                let mut s = self.get(i, j);
                for k in 0..j {
                    s = s - l.get(i, k) * l.get(j, k);
                }
                l.set(i, j, s / djj);
            }
        }
        Ok(l)
    }

    /// Gauss-Jordan inverse with partial pivoting.
    pub fn inverse(&self) -> Result<Self> {
        let n = self.n;
        let mut a = self.clone();
        let mut inv = Self::identity(n);
        for col in 0..n {
            let pivot = (col..n)
                .max_by(|&i, &j| {
                    a.get(i, col)
                        .abs()
                        .partial_cmp(&a.get(j, col).abs())
                        .unwrap_or(std::cmp::Ordering::Equal)
                })
                .unwrap_or(col);
            if a.get(pivot, col) == R::zero() || !a.get(pivot, col).is_finite() {
                return Err(Error::SingularMatrix);
            }
            if pivot != col {
                for k in 0..n {
                    let (x, y) = (a.get(col, k), a.get(pivot, k));
                    a.set(col, k, y);
                    a.set(pivot, k, x);
                    let (x, y) = (inv.get(col, k), inv.get(pivot, k));
                    inv.set(col, k, y);
                    inv.set(pivot, k, x);
                }
            }
            let p = a.get(col, col);
            for k in 0..n {
                a.set(col, k, a.get(col, k) / p);
                inv.set(col, k, inv.get(col, k) / p);
            }
            for r in 0..n {
                if r == col {
                    continue;
                }
                let f = a.get(r, col);
                if f == R::zero() {
                    continue;
                }
                for k in 0..n {
                    a.set(r, k, a.get(r, k) - f * a.get(col, k));
                    inv.set(r, k, inv.get(r, k) - f * inv.get(col, k));
                }
            }
        }
        Ok(inv)
    }

    /// Determinant by elimination with partial pivoting.
    pub fn determinant(&self) -> R {
        let n = self.n;
        let mut a = self.clone();
        let mut det = R::one();
        for col in 0..n {
            let pivot = (col..n)
                .max_by(|&i, &j| {
                    a.get(i, col)
                        .abs()
                        .partial_cmp(&a.get(j, col).abs())
                        .unwrap_or(std::cmp::Ordering::Equal)
                })
                .unwrap_or(col);
            let p = a.get(pivot, col);
            if p == R::zero() {
                return R::zero();
            }
            if pivot != col {
                for k in 0..n {
                    let (x, y) = (a.get(col, k), a.get(pivot, k));
                    a.set(col, k, y);
                    a.set(pivot, k, x);
                }
                det = -det;
            }
            det = det * p;
            for r in (col + 1)..n {
                let f = a.get(r, col) / p;
                for k in col..n {
                    a.set(r, k, a.get(r, k) - f * a.get(col, k));
                }
            }
        }
        det
    }

    /// Spectral norm upper bound (Frobenius norm).
    pub fn frobenius_norm(&self) -> R {
        self.data.iter().fold(R::zero(), |acc, v| acc + *v * *v).sqrt()
    }

    pub fn cast<S: Real>(&self) -> SquareMatrix<S> {
        SquareMatrix {
            n: self.n,
            data: self.data.iter().map(|v| <S as Real>::from_f64(v.as_f64())).collect(),
        }
    }

    pub fn max_abs_diff(&self, other: &Self) -> R {
        self.data
            .iter()
            .zip(&other.data)
            .fold(R::zero(), |m, (a, b)| m.max((*a - *b).abs()))
    }
}
