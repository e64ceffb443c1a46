//! Closed-form test functions with derivatives and analytic extensions.

use std::collections::BTreeMap;
use std::f64::consts::FRAC_PI_2;

use num_complex::Complex64;

use crate::linalg::SquareMatrix;
use crate::scalar::{DoubleDouble, Real};
use crate::special_fn::MultiIndex;

/// Smooth function on `ℝⁿ` with closed-form partial derivatives.
pub trait TestFunction: Send + Sync {
    fn dim(&self) -> usize;

    fn value(&self, x: &[f64]) -> f64 {
        self.partial(&MultiIndex::zeros(self.dim()), x)
    }

    fn partial(&self, beta: &MultiIndex, x: &[f64]) -> f64;

    /// `ũ(z)` for complex arguments, when an entire extension is known.
    fn complex_value(&self, _z: &[Complex64]) -> Option<Complex64> {
        None
    }

    /// `u(x)` in double-double, for experiments that resolve errors below
    /// `f64` rounding.
    fn value_dd(&self, _x: &[DoubleDouble]) -> Option<DoubleDouble> {
        None
    }

    /// `𝔅^s u(x)` with `𝔅 = Σ b_ik ∂_i ∂_k`, expanded into partials.
    fn operator_power(&self, b: &SquareMatrix<f64>, s: u32, x: &[f64]) -> f64 {
        operator_expansion(b, s)
            .iter()
            .map(|(beta, c)| c * self.partial(beta, x))
            .sum()
    }

    /// `Δ^s u(x)`.
    fn laplacian_power(&self, s: u32, x: &[f64]) -> f64 {
        self.operator_power(&SquareMatrix::identity(self.dim()), s, x)
    }

    /// Bound on `sup |∂^β u|` over the region of interest.
    fn sup_partial(&self, _beta: &MultiIndex) -> f64 {
        1.0
    }
}

/// `(Σ b_ik ∂_i ∂_k)^s` as a map `β ↦ coefficient of ∂^β`.
pub fn operator_expansion(b: &SquareMatrix<f64>, s: u32) -> BTreeMap<MultiIndex, f64> {
    let n = b.dim();
    let mut base = BTreeMap::new();
    for i in 0..n {
        for k in 0..n {
            let mut e = vec![0u32; n];
            e[i] += 1;
            e[k] += 1;
            *base.entry(MultiIndex::new(e)).or_insert(0.0) += b.get(i, k);
        }
    }
    let mut acc = BTreeMap::from([(MultiIndex::zeros(n), 1.0)]);
    for _ in 0..s {
        acc = multiply(&acc, &base);
    }
    acc.retain(|_, v| *v != 0.0);
    acc
}

fn multiply(
    a: &BTreeMap<MultiIndex, f64>,
    b: &BTreeMap<MultiIndex, f64>,
) -> BTreeMap<MultiIndex, f64> {
    let mut out = BTreeMap::new();
    for (ka, va) in a {
        for (kb, vb) in b {
            *out.entry(ka.add(kb)).or_insert(0.0) += va * vb;
        }
    }
    out
}

fn only_axes(beta: &MultiIndex, axes: usize) -> bool {
    beta.exponents().iter().skip(axes).all(|&e| e == 0)
}

/// `cos(x₁)` on `ℝⁿ`.
#[derive(Debug, Clone, Copy)]
pub struct Cosine {
    pub dim: usize,
}

impl TestFunction for Cosine {
    fn dim(&self) -> usize {
        self.dim
    }
    fn partial(&self, beta: &MultiIndex, x: &[f64]) -> f64 {
        if !only_axes(beta, 1) {
            return 0.0;
        }
        (x[0] + f64::from(beta.exponents()[0]) * FRAC_PI_2).cos()
    }
    fn complex_value(&self, z: &[Complex64]) -> Option<Complex64> {
        Some(z[0].cos())
    }
    fn value_dd(&self, x: &[DoubleDouble]) -> Option<DoubleDouble> {
        Some(x[0].cos())
    }
}

/// `sin(x₁)` on `ℝⁿ`.
#[derive(Debug, Clone, Copy)]
pub struct Sine {
    pub dim: usize,
}

impl TestFunction for Sine {
    fn dim(&self) -> usize {
        self.dim
    }
    fn partial(&self, beta: &MultiIndex, x: &[f64]) -> f64 {
        if !only_axes(beta, 1) {
            return 0.0;
        }
        (x[0] + f64::from(beta.exponents()[0]) * FRAC_PI_2).sin()
    }
    fn complex_value(&self, z: &[Complex64]) -> Option<Complex64> {
        Some(z[0].sin())
    }
    fn value_dd(&self, x: &[DoubleDouble]) -> Option<DoubleDouble> {
        Some(x[0].sin())
    }
}

/// `e^{x₁} cos x₂`, harmonic in the plane.
#[derive(Debug, Clone, Copy)]
pub struct ExpCos;

impl TestFunction for ExpCos {
    fn dim(&self) -> usize {
        2
    }
    fn partial(&self, beta: &MultiIndex, x: &[f64]) -> f64 {
        let k = f64::from(beta.exponents()[1]);
        x[0].exp() * (x[1] + k * FRAC_PI_2).cos()
    }
    fn complex_value(&self, z: &[Complex64]) -> Option<Complex64> {
        Some(z[0].exp() * z[1].cos())
    }
    fn value_dd(&self, x: &[DoubleDouble]) -> Option<DoubleDouble> {
        Some(x[0].exp_accurate() * x[1].cos())
    }
    fn sup_partial(&self, _beta: &MultiIndex) -> f64 {
        1f64.exp()
    }
}

/// `c · x₁^k` on `ℝⁿ`.
#[derive(Debug, Clone, Copy)]
pub struct Monomial {
    pub dim: usize,
    pub degree: u32,
    pub scale: f64,
}

impl TestFunction for Monomial {
    fn dim(&self) -> usize {
        self.dim
    }
    fn partial(&self, beta: &MultiIndex, x: &[f64]) -> f64 {
        let b = beta.exponents()[0];
        if !only_axes(beta, 1) || b > self.degree {
            return 0.0;
        }
        let falling: f64 = (self.degree - b + 1..=self.degree).map(f64::from).product();
        self.scale * falling * x[0].powi((self.degree - b) as i32)
    }
    fn complex_value(&self, z: &[Complex64]) -> Option<Complex64> {
        Some(z[0].powu(self.degree) * self.scale)
    }
    fn value_dd(&self, x: &[DoubleDouble]) -> Option<DoubleDouble> {
        Some(x[0].powi(self.degree as i32) * <DoubleDouble as Real>::from_f64(self.scale))
    }
    fn sup_partial(&self, beta: &MultiIndex) -> f64 {
        // on the unit box
        self.partial(beta, &vec![1.0; self.dim]).abs()
    }
}

/// Quadratic `Σ_{ik} p_ik x_i x_k` (symmetric `P`).
#[derive(Debug, Clone)]
pub struct Quadratic {
    pub p: SquareMatrix<f64>,
}

impl Quadratic {
    /// `b₂₂x₁² − b₁₁x₂²`, annihilated by `𝔅` for a 2×2 matrix `B`.
    pub fn b_harmonic(b: &SquareMatrix<f64>) -> Self {
        let p = SquareMatrix::from_rows(&[vec![b.get(1, 1), 0.0], vec![0.0, -b.get(0, 0)]])
            .expect("2x2");
        Self { p }
    }
}

impl TestFunction for Quadratic {
    fn dim(&self) -> usize {
        self.p.dim()
    }
    fn partial(&self, beta: &MultiIndex, x: &[f64]) -> f64 {
        let n = self.p.dim();
        let e = beta.exponents();
        match beta.order() {
            0 => (0..n)
                .flat_map(|i| (0..n).map(move |k| (i, k)))
                .map(|(i, k)| self.p.get(i, k) * x[i] * x[k])
                .sum(),
            1 => {
                let j = e.iter().position(|&v| v == 1).expect("order one");
                2.0 * (0..n).map(|k| self.p.get(j, k) * x[k]).sum::<f64>()
            }
            2 => {
                let idx: Vec<usize> = (0..n).flat_map(|j| std::iter::repeat(j).take(e[j] as usize)).collect();
                2.0 * self.p.get(idx[0], idx[1])
            }
            _ => 0.0,
        }
    }
    fn complex_value(&self, z: &[Complex64]) -> Option<Complex64> {
        let n = self.p.dim();
        let mut acc = Complex64::new(0.0, 0.0);
        for i in 0..n {
            for k in 0..n {
                acc += z[i] * z[k] * self.p.get(i, k);
            }
        }
        Some(acc)
    }
}

/// `u(x) = U(Cx)` for a linear map `C`.
pub struct Transformed<F> {
    pub inner: F,
    pub c: SquareMatrix<f64>,
}

impl<F: TestFunction> TestFunction for Transformed<F> {
    fn dim(&self) -> usize {
        self.c.dim()
    }
    fn partial(&self, beta: &MultiIndex, x: &[f64]) -> f64 {
        // ∂_j u = Σ_i C_ij (∂_i U)(Cx)
        let n = self.c.dim();
        let mut poly = BTreeMap::from([(MultiIndex::zeros(n), 1.0)]);
        for (j, &k) in beta.exponents().iter().enumerate() {
            let column: BTreeMap<MultiIndex, f64> = (0..n)
                .filter(|&i| self.c.get(i, j) != 0.0)
                .map(|i| (MultiIndex::axis(n, i, 1), self.c.get(i, j)))
                .collect();
            for _ in 0..k {
                poly = multiply(&poly, &column);
            }
        }
        let xi = self.c.mul_vec(x);
        poly.iter()
            .map(|(delta, coef)| coef * self.inner.partial(delta, &xi))
            .sum()
    }
    fn complex_value(&self, z: &[Complex64]) -> Option<Complex64> {
        let n = self.c.dim();
        let w: Vec<Complex64> = (0..n)
            .map(|i| (0..n).map(|j| z[j] * self.c.get(i, j)).sum())
            .collect();
        self.inner.complex_value(&w)
    }
    fn sup_partial(&self, beta: &MultiIndex) -> f64 {
        let norm = self.c.frobenius_norm();
        norm.powi(beta.order() as i32) * self.inner.sup_partial(beta)
    }
}
