use std::collections::BTreeMap;

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::linalg::SquareMatrix;
use crate::scalar::{pow2_q, Rational, Real, Scalar};
use crate::special_fn::{hermite_at_zero, hermite_monomial_coefficients, MultiIndex};

use super::matrix::build_moment_matrix;
use super::qpoly::{factorial_scalar, QPolynomial};

/// Symmetric positive definite `B` together with a factor `C` such that
/// `B⁻¹ = CᵀC`. Only `⟨B⁻¹·,·⟩ = |C·|²` and `det C = (det B)^{−1/2}` enter
/// the kernels, so any such factor works; the upper-triangular one is used.
#[derive(Debug, Clone, PartialEq)]
pub struct Anisotropy<R> {
    matrix: SquareMatrix<R>,
    factor: SquareMatrix<R>,
    det_factor: R,
}

impl<R: Real> Anisotropy<R> {
    pub fn new(matrix: SquareMatrix<R>) -> Result<Self> {
        matrix.cholesky_lower()?;
        let inv = matrix.inverse()?;
        let l = inv.cholesky_lower()?;
        let det_factor = (0..l.dim()).fold(R::one(), |acc, i| acc * l.get(i, i));
        Ok(Self {
            matrix,
            factor: l.transpose(),
            det_factor,
        })
    }

    pub fn matrix(&self) -> &SquareMatrix<R> {
        &self.matrix
    }

    /// `C` with `CᵀC = B⁻¹`.
    pub fn factor(&self) -> &SquareMatrix<R> {
        &self.factor
    }

    /// `det C = (det B)^{−1/2}`.
    pub fn det_factor(&self) -> R {
        self.det_factor
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }
}

/// `ℋ(x) = π^{−n/2} Σ_β c_β H_β(x) e^{−|x|²}`, optionally composed with an
/// anisotropy: `ℋ_B(x) = det C · ℋ(Cx)`.
#[derive(Debug, Clone, PartialEq)]
pub struct GeneratingFunction<T> {
    dim: usize,
    order: u32,
    coeffs: BTreeMap<MultiIndex, T>,
    anisotropy: Option<Anisotropy<T>>,
}

impl<T: Scalar> GeneratingFunction<T> {
    /// Expansion from raw coefficients; zeros are dropped.
    pub fn from_coefficients<I>(dim: usize, order: u32, coeffs: I) -> Result<Self>
    where
        I: IntoIterator<Item = (MultiIndex, T)>,
    {
        if dim == 0 {
            return Err(Error::ZeroDimension);
        }
        let mut map = BTreeMap::new();
        for (beta, c) in coeffs {
            if beta.dim() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    got: beta.dim(),
                });
            }
            if !c.is_zero() {
                map.insert(beta, c);
            }
        }
        Ok(Self {
            dim,
            order,
            coeffs: map,
            anisotropy: None,
        })
    }

    /// `π^{−n/2} e^{−|x|²}`, which satisfies the plain moment conditions to
    /// order two.
    pub fn gaussian(dim: usize) -> Self {
        Self::from_coefficients(dim, 2, [(MultiIndex::zeros(dim), T::one())])
            .expect("positive dimension required")
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Order `N` the expansion was built for.
    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn with_order(mut self, order: u32) -> Self {
        self.order = order;
        self
    }

    /// Largest `|β|` with a nonzero coefficient.
    pub fn degree(&self) -> u32 {
        self.coeffs.keys().map(MultiIndex::order).max().unwrap_or(0)
    }

    pub fn coefficient(&self, beta: &MultiIndex) -> T {
        self.coeffs.get(beta).cloned().unwrap_or_else(T::zero)
    }

    /// Nonzero `c_β` in graded-lex order.
    pub fn coefficients(&self) -> impl Iterator<Item = (&MultiIndex, &T)> {
        self.coeffs.iter()
    }

    pub fn anisotropy(&self) -> Option<&Anisotropy<T>> {
        self.anisotropy.as_ref()
    }

    pub fn is_anisotropic(&self) -> bool {
        self.anisotropy.is_some()
    }

    /// Polynomial `P` with `ℋ(x) = π^{−n/2} P(x) e^{−|x|²}` (isotropic part).
    pub fn monomial_coefficients(&self) -> BTreeMap<MultiIndex, T> {
        let mut out: BTreeMap<MultiIndex, Rational> = BTreeMap::new();
        for (beta, c) in &self.coeffs {
            // product over axes of the Hermite monomial expansions
            let mut terms: Vec<(Vec<u32>, Rational)> = vec![(Vec::new(), Rational::one())];
            for &k in beta.exponents() {
                let h = hermite_monomial_coefficients(k);
                let mut next = Vec::new();
                for (exps, v) in &terms {
                    for (p, hc) in h.iter().enumerate() {
                        if hc.is_zero() {
                            continue;
                        }
                        let mut e = exps.clone();
                        e.push(p as u32);
                        next.push((e, v * Rational::from_integer(hc.clone())));
                    }
                }
                terms = next;
            }
            let c_q = c.to_rational();
            for (exps, v) in terms {
                let entry = out.entry(MultiIndex::new(exps)).or_insert_with(Rational::zero);
                *entry += v * &c_q;
            }
        }
        out.into_iter()
            .filter(|(_, v)| !v.is_zero())
            .map(|(k, v)| (k, T::from_rational(&v)))
            .collect()
    }

    /// Converts coefficients into a floating point type.
    pub fn to_real<R: Real>(&self) -> GeneratingFunction<R> {
        GeneratingFunction {
            dim: self.dim,
            order: self.order,
            coeffs: self
                .coeffs
                .iter()
                .map(|(k, v)| (k.clone(), <R as Real>::from_f64(v.as_f64())))
                .collect(),
            anisotropy: self.anisotropy.as_ref().map(|a| Anisotropy {
                matrix: a.matrix.map_entries(|v| <R as Real>::from_f64(v.as_f64())),
                factor: a.factor.map_entries(|v| <R as Real>::from_f64(v.as_f64())),
                det_factor: <R as Real>::from_f64(a.det_factor.as_f64()),
            }),
        }
    }

    /// Structured record `{n, N, coefficients, B}` with coefficients in
    /// graded-lex order. Exact scalars also carry their rational form.
    pub fn to_record(&self) -> serde_json::Value {
        let coeffs: Vec<serde_json::Value> = self
            .coeffs
            .iter()
            .map(|(b, c)| {
                let mut e = serde_json::json!({ "beta": b.to_string(), "c": c.as_f64() });
                if T::is_exact() {
                    e["exact"] = c.to_rational().to_string().into();
                }
                e
            })
            .collect();
        let mut rec = serde_json::json!({ "n": self.dim, "N": self.order, "coefficients": coeffs });
        if let Some(a) = &self.anisotropy {
            let rows: Vec<Vec<f64>> = (0..self.dim)
                .map(|i| (0..self.dim).map(|j| a.matrix.data_at(i, j).as_f64()).collect())
                .collect();
            rec["B"] = rows.into();
        }
        rec
    }

    pub(crate) fn with_coefficients(&self, coeffs: BTreeMap<MultiIndex, T>, order: u32) -> Self {
        Self {
            dim: self.dim,
            order,
            coeffs,
            anisotropy: self.anisotropy.clone(),
        }
    }
}

impl<R: Real> GeneratingFunction<R> {
    /// Composes with the anisotropy `B`: `ℋ_B(x) = (det B)^{−1/2} ℋ(Cx)`.
    pub fn with_anisotropy(mut self, b: SquareMatrix<R>) -> Result<Self> {
        if b.dim() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: b.dim(),
            });
        }
        self.anisotropy = Some(Anisotropy::new(b)?);
        Ok(self)
    }

    /// Point value `ℋ(x)`.
    pub fn eval(&self, x: &[R]) -> Result<R> {
        if x.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: x.len(),
            });
        }
        let mut kernel = HermiteKernel::new(self);
        let (y, scale) = match &self.anisotropy {
            Some(a) => (a.factor.mul_vec(x), a.det_factor),
            None => (x.to_vec(), R::one()),
        };
        let r2 = y.iter().fold(R::zero(), |acc, v| acc + *v * *v);
        Ok(scale * gaussian_normalization::<R>(self.dim) * (-r2).exp_accurate() * kernel.polynomial(&y))
    }
}

/// `π^{−n/2}`.
pub(crate) fn gaussian_normalization<R: Real>(dim: usize) -> R {
    R::PI().sqrt().reciprocal().powi(dim as i32)
}

/// Evaluates `Σ_β c_β H_β(y)` with per-axis Hermite tables.
pub(crate) struct HermiteKernel<R> {
    terms: Vec<(Vec<u32>, R)>,
    max_degree: Vec<u32>,
    tables: Vec<Vec<R>>,
}

impl<R: Real> HermiteKernel<R> {
    pub(crate) fn new(g: &GeneratingFunction<R>) -> Self {
        let dim = g.dim;
        let mut max_degree = vec![0u32; dim];
        let terms: Vec<(Vec<u32>, R)> = g
            .coeffs
            .iter()
            .map(|(b, c)| {
                for (m, &e) in max_degree.iter_mut().zip(b.exponents()) {
                    *m = (*m).max(e);
                }
                (b.exponents().to_vec(), *c)
            })
            .collect();
        Self {
            terms,
            max_degree,
            tables: vec![Vec::new(); dim],
        }
    }

    pub(crate) fn polynomial(&mut self, y: &[R]) -> R {
        if self.terms.len() == 1 && self.terms[0].0.iter().all(|&e| e == 0) {
            return self.terms[0].1;
        }
        for (axis, table) in self.tables.iter_mut().enumerate() {
            crate::special_fn::hermite_table_into(self.max_degree[axis], y[axis], table);
        }
        let mut acc = R::zero();
        for (exps, c) in &self.terms {
            let mut p = *c;
            for (axis, &e) in exps.iter().enumerate() {
                p = p * self.tables[axis][e as usize];
            }
            acc = acc + p;
        }
        acc
    }
}

/// Builds the Hermite-Gaussian generator satisfying the moment conditions
/// for `Q`:
/// `c_β = Σ_{2γ ≤ β} (−1)^{|γ|} / (γ! 4^{|γ|}) · 𝒜^{(−1)}_{0, β−2γ}`.
pub fn build_hermite_generator<T: Scalar>(q: &QPolynomial<T>) -> GeneratingFunction<T> {
    let m = build_moment_matrix(q);
    let row = m.inverse_first_row();
    let indices = m.indices();
    let mut coeffs = BTreeMap::new();
    for beta in indices {
        let floor_half = MultiIndex::new(beta.exponents().iter().map(|b| b / 2).collect());
        let mut c = T::zero();
        for gamma in floor_half.lower_set() {
            let rest = beta
                .checked_sub(&gamma.scale(2))
                .expect("2γ ≤ β by construction");
            let x = &row[indices.position(&rest).expect("β − 2γ is in the index set")];
            if x.is_zero() {
                continue;
            }
            let k = gamma.order();
            let mut w = pow2_q(-2 * k as i32) / Rational::from_integer(gamma.factorial());
            if k % 2 == 1 {
                w = -w;
            }
            c = c + T::from_rational(&w) * x.clone();
        }
        if !c.is_zero() {
            coeffs.insert(beta.clone(), c);
        }
    }
    GeneratingFunction {
        dim: q.dim(),
        order: q.order(),
        coeffs,
        anisotropy: None,
    }
}

/// Coefficients `e_β` of `ℋ = Σ_β e_β ∂^β η` for a general kernel `η`.
#[derive(Debug, Clone, PartialEq)]
pub struct DerivativeExpansion<T> {
    dim: usize,
    order: u32,
    coeffs: BTreeMap<MultiIndex, T>,
}

impl<T: Scalar> DerivativeExpansion<T> {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn coefficient(&self, beta: &MultiIndex) -> T {
        self.coeffs.get(beta).cloned().unwrap_or_else(T::zero)
    }

    pub fn coefficients(&self) -> impl Iterator<Item = (&MultiIndex, &T)> {
        self.coeffs.iter()
    }

    /// For `η = π^{−n/2} e^{−|x|²}` we have `∂^β η = (−1)^{|β|} π^{−n/2} H_β e^{−|x|²}`,
    /// so the Hermite coefficients are `c_β = (−1)^{|β|} e_β`.
    pub fn to_gaussian_generator(&self) -> GeneratingFunction<T> {
        let coeffs = self.coeffs.iter().map(|(b, e)| {
            let c = if b.order() % 2 == 1 { -e.clone() } else { e.clone() };
            (b.clone(), c)
        });
        GeneratingFunction::from_coefficients(self.dim, self.order, coeffs.collect::<Vec<_>>())
            .expect("dimension already validated")
    }
}

impl<R: Real> DerivativeExpansion<R> {
    /// `Σ_β e_β ∂^β η(x)` given the derivatives of `η`.
    pub fn eval_with<F: Fn(&MultiIndex, &[R]) -> R>(&self, x: &[R], eta_derivative: F) -> R {
        self.coeffs
            .iter()
            .fold(R::zero(), |acc, (b, e)| acc + *e * eta_derivative(b, x))
    }
}

/// Builds `ℋ = Σ_{|β| ≤ N−1} e_β ∂^β η` with
/// `e_β = Σ_{α ≤ β} 𝒜^{(−1)}_{0α} (−1)^{|α|} s_{β−α} / (β−α)!`.
///
/// The table holds the normalized reciprocal derivatives
/// `s_δ = ∂^δ(ℱη)^{−1}(0) / (2πi)^{|δ|}`, which are real for real kernels.
/// Missing entries count as zero; `s_0` must be nonzero.
pub fn build_general_generator<T: Scalar>(
    q: &QPolynomial<T>,
    table: &BTreeMap<MultiIndex, T>,
) -> Result<DerivativeExpansion<T>> {
    let zero = MultiIndex::zeros(q.dim());
    if table.get(&zero).map_or(true, |v| v.is_zero()) {
        return Err(Error::ZeroFourierValue);
    }
    for delta in table.keys() {
        if delta.dim() != q.dim() {
            return Err(Error::DimensionMismatch {
                expected: q.dim(),
                got: delta.dim(),
            });
        }
    }
    let m = build_moment_matrix(q);
    let row = m.inverse_first_row();
    let indices = m.indices();
    let mut coeffs = BTreeMap::new();
    for beta in indices {
        let mut e = T::zero();
        for alpha in beta.lower_set() {
            let x = &row[indices.position(&alpha).expect("α ≤ β stays in the index set")];
            let delta = beta.checked_sub(&alpha).expect("α ≤ β");
            let Some(s) = table.get(&delta) else { continue };
            if x.is_zero() || s.is_zero() {
                continue;
            }
            let mut term = x.clone() * s.clone() / factorial_scalar::<T>(&delta);
            if alpha.order() % 2 == 1 {
                term = -term;
            }
            e = e + term;
        }
        if !e.is_zero() {
            coeffs.insert(beta.clone(), e);
        }
    }
    Ok(DerivativeExpansion {
        dim: q.dim(),
        order: q.order(),
        coeffs,
    })
}

/// Table `s_δ = H_δ(0) / 2^{|δ|}` for `η = π^{−n/2} e^{−|x|²}`, where
/// `(ℱη)^{−1}(λ) = e^{π²|λ|²}`.
pub fn gaussian_reciprocal_table<T: Scalar>(dim: usize, max_degree: u32) -> Result<BTreeMap<MultiIndex, T>> {
    let set = crate::special_fn::enumerate_indices(dim, max_degree)?;
    Ok(set
        .iter()
        .filter(|d| d.all_even())
        .map(|d| {
            let v = Rational::from_integer(hermite_at_zero(d)) * pow2_q(-(d.order() as i32));
            (d.clone(), T::from_rational(&v))
        })
        .collect())
}
