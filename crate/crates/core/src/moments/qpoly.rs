use std::collections::BTreeMap;


use crate::error::{Error, Result};
use crate::scalar::{pow2_q, Rational, Scalar};
use crate::special_fn::{enumerate_indices, MultiIndex};

/// Derivative polynomial `Q(t) = Σ_{|γ| ≤ N−1} a_γ t^γ` with `a_0 = 1`.
///
/// `order` is the approximation order `N`; stored exponents satisfy
/// `|γ| ≤ N − 1`. Zero coefficients are not stored.
#[derive(Debug, Clone, PartialEq)]
pub struct QPolynomial<T> {
    dim: usize,
    order: u32,
    coeffs: BTreeMap<MultiIndex, T>,
}

impl<T: Scalar> QPolynomial<T> {
    /// Builds `Q` from its coefficients. `a_0` defaults to one when omitted
    /// and must equal one when given.
    pub fn new<I>(dim: usize, order: u32, coeffs: I) -> Result<Self>
    where
        I: IntoIterator<Item = (MultiIndex, T)>,
    {
        if dim == 0 {
            return Err(Error::ZeroDimension);
        }
        if order == 0 {
            return Err(Error::InvalidPolynomial("order N must be at least 1".into()));
        }
        let mut map = BTreeMap::new();
        map.insert(MultiIndex::zeros(dim), T::one());
        for (gamma, a) in coeffs {
            if gamma.dim() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    got: gamma.dim(),
                });
            }
            if gamma.order() >= order {
                return Err(Error::InvalidPolynomial(format!(
                    "coefficient {gamma} exceeds degree bound N-1 = {}",
                    order - 1
                )));
            }
            if gamma.is_zero() {
                if a != T::one() {
                    return Err(Error::InvalidPolynomial("a_0 must equal 1".into()));
                }
                continue;
            }
            if a.is_zero() {
                map.remove(&gamma);
            } else {
                map.insert(gamma, a);
            }
        }
        Ok(Self {
            dim,
            order,
            coeffs: map,
        })
    }

    /// `Q ≡ 1`: the plain moment conditions.
    pub fn identity(dim: usize, order: u32) -> Result<Self> {
        Self::new(dim, order, std::iter::empty())
    }

    /// One-dimensional `Q(t) = 1 + a_1 t + a_2 t² + …`.
    pub fn one_dim(order: u32, tail: &[T]) -> Result<Self> {
        Self::new(
            1,
            order,
            tail.iter()
                .enumerate()
                .map(|(k, a)| (MultiIndex::from([k as u32 + 1]), a.clone())),
        )
    }

    /// Coefficients of the Laplacian-power formula of order `N = 2M`:
    /// `a_{2γ} = (−1)^{|γ|}/(γ! 4^{|γ|})` for `|γ| ≤ M − 1`, zero otherwise.
    pub fn laplacian(dim: usize, half_order: u32) -> Result<Self> {
        if half_order == 0 {
            return Err(Error::InvalidPolynomial("M must be at least 1".into()));
        }
        let gammas = enumerate_indices(dim, half_order - 1)?;
        let coeffs = gammas.iter().map(|g| {
            let k = g.order();
            let mut a = pow2_q(-2 * k as i32) / Rational::from_integer(g.factorial());
            if k % 2 == 1 {
                a = -a;
            }
            (g.scale(2), T::from_rational(&a))
        });
        Self::new(dim, 2 * half_order, coeffs.collect::<Vec<_>>())
    }

    /// Radial fourth-order choice: `a_{2e_j} = a` for every axis.
    pub fn radial_fourth_order(dim: usize, a: T) -> Result<Self> {
        Self::new(
            dim,
            4,
            (0..dim).map(|j| (MultiIndex::axis(dim, j, 2), a.clone())),
        )
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Approximation order `N`.
    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn coefficient(&self, gamma: &MultiIndex) -> T {
        self.coeffs.get(gamma).cloned().unwrap_or_else(T::zero)
    }

    /// Nonzero coefficients in graded-lex order (including `a_0`).
    pub fn coefficients(&self) -> impl Iterator<Item = (&MultiIndex, &T)> {
        self.coeffs.iter()
    }

    /// True when only even multi-indices carry coefficients.
    pub fn is_even(&self) -> bool {
        self.coeffs.keys().all(MultiIndex::all_even)
    }

    /// Applies `f` to every stored coefficient.
    pub fn map<S: Scalar, F: Fn(&T) -> S>(&self, f: F) -> QPolynomial<S> {
        QPolynomial {
            dim: self.dim,
            order: self.order,
            coeffs: self.coeffs.iter().map(|(k, v)| (k.clone(), f(v))).collect(),
        }
    }
}

impl QPolynomial<Rational> {
    pub fn to_scalar<S: Scalar>(&self) -> QPolynomial<S> {
        self.map(S::from_rational)
    }
}

/// `γ!` as a scalar.
pub(crate) fn factorial_scalar<T: Scalar>(gamma: &MultiIndex) -> T {
    T::from_rational(&Rational::from_integer(gamma.factorial()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::ratio;

    #[test]
    fn defaults_a0_and_validates() {
        let q = QPolynomial::<f64>::identity(2, 3).unwrap();
        assert_eq!(q.coefficient(&MultiIndex::zeros(2)), 1.0);
        assert_eq!(q.coefficients().count(), 1);
        assert!(QPolynomial::new(1, 2, [(MultiIndex::from([0]), 2.0)]).is_err());
        assert!(QPolynomial::new(1, 2, [(MultiIndex::from([2]), 1.0)]).is_err());
        assert!(QPolynomial::new(2, 2, [(MultiIndex::from([1]), 1.0)]).is_err());
        assert!(QPolynomial::<f64>::identity(0, 2).is_err());
    }

    #[test]
    fn laplacian_coefficients() {
        let q = QPolynomial::<Rational>::laplacian(2, 3).unwrap();
        assert_eq!(q.order(), 6);
        assert_eq!(q.coefficient(&MultiIndex::from([2, 0])), ratio(-1, 4));
        assert_eq!(q.coefficient(&MultiIndex::from([2, 2])), ratio(1, 16));
        assert_eq!(q.coefficient(&MultiIndex::from([4, 0])), ratio(1, 32));
        assert_eq!(q.coefficient(&MultiIndex::from([1, 0])), ratio(0, 1));
        assert!(q.is_even());
    }
}
