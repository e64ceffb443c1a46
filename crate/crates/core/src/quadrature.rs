//! Composite Gauss-Legendre quadrature.
//!
//! Only used as an independent route (convolution oracle, moment
//! cross-checks, Fourier transform validation); production paths never
//! integrate numerically.

use crate::scalar::Real;
use crate::sum::CompensatedSum;

/// Nodes and weights of the `order`-point Gauss-Legendre rule on `[-1, 1]`.
pub fn gauss_legendre<R: Real>(order: usize) -> (Vec<R>, Vec<R>) {
    assert!(order >= 1, "quadrature order must be positive");
    let n = order;
    let mut nodes = vec![R::zero(); n];
    let mut weights = vec![R::zero(); n];
    let nf = n as f64;
    for i in 0..n.div_ceil(2) {
        // Tricomi initial guess, then Newton on P_n.
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                let (_, d) = legendre_with_derivative(n, x);
                dp = d;
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = <R as Real>::from_f64(-x);
        nodes[n - 1 - i] = <R as Real>::from_f64(x);
        weights[i] = <R as Real>::from_f64(w);
        weights[n - 1 - i] = <R as Real>::from_f64(w);
    }
    (nodes, weights)
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Composite rule: `panels` equal panels on `[a, b]`, `order` points each.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CompositeRule {
    pub lower: f64,
    pub upper: f64,
    pub panels: usize,
    pub order: usize,
}

impl CompositeRule {
    pub fn new(lower: f64, upper: f64, panels: usize, order: usize) -> Self {
        Self {
            lower,
            upper,
            panels,
            order,
        }
    }

    /// Flattened nodes and weights.
    pub fn points<R: Real>(&self) -> (Vec<R>, Vec<R>) {
        let (gx, gw) = gauss_legendre::<R>(self.order);
        let width = <R as Real>::from_f64((self.upper - self.lower) / self.panels as f64);
        let half = width / <R as Real>::from_f64(2.0);
        let mut xs = Vec::with_capacity(self.panels * self.order);
        let mut ws = Vec::with_capacity(self.panels * self.order);
        for p in 0..self.panels {
            let mid = <R as Real>::from_f64(self.lower) + width * <R as Real>::from_usize(p) + half;
            for (x, w) in gx.iter().zip(&gw) {
                xs.push(mid + half * *x);
                ws.push(half * *w);
            }
        }
        (xs, ws)
    }

    pub fn integrate<R: Real, F: FnMut(R) -> R>(&self, mut f: F) -> R {
        let (xs, ws) = self.points::<R>();
        xs.iter()
            .zip(&ws)
            .map(|(x, w)| *w * f(*x))
            .collect::<CompensatedSum<R>>()
            .value()
    }

    /// Tensor-product integral over the cube `[lower, upper]^dim`.
    pub fn integrate_cube<R: Real, F: FnMut(&[R]) -> R>(&self, dim: usize, mut f: F) -> R {
        let (xs, ws) = self.points::<R>();
        let m = xs.len();
        let mut idx = vec![0usize; dim];
        let mut point = vec![R::zero(); dim];
        let mut acc = CompensatedSum::new();
        loop {
            let mut w = R::one();
            for (j, &i) in idx.iter().enumerate() {
                point[j] = xs[i];
                w = w * ws[i];
            }
            acc.add(w * f(&point));
            let mut axis = dim;
            loop {
                if axis == 0 {
                    return acc.value();
                }
                axis -= 1;
                idx[axis] += 1;
                if idx[axis] < m {
                    break;
                }
                idx[axis] = 0;
            }
        }
    }
}
