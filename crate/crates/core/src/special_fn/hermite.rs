//! Physicists' Hermite polynomials `H_k(τ) = e^{τ²}(−d/dτ)^k e^{−τ²}`.

use num_bigint::BigInt;
use num_traits::{One, Zero};

use super::MultiIndex;
use crate::error::{Error, Result};
use crate::scalar::{factorial, Real};

/// `H_k(τ)` by the three-term recurrence `H_{k+1} = 2τH_k − 2kH_{k−1}`.
pub fn hermite_1d<R: Real>(k: u32, tau: R) -> R {
    let two = R::one() + R::one();
    let mut prev = R::one();
    if k == 0 {
        return prev;
    }
    let mut cur = two * tau;
    for j in 1..k {
        let next = two * tau * cur - two * <R as Real>::from_usize(j as usize) * prev;
        prev = cur;
        cur = next;
    }
    cur
}

/// `[H_0(τ), …, H_max(τ)]`.
pub fn hermite_table<R: Real>(max: u32, tau: R) -> Vec<R> {
    let mut out = Vec::with_capacity(max as usize + 1);
    hermite_table_into(max, tau, &mut out);
    out
}

pub(crate) fn hermite_table_into<R: Real>(max: u32, tau: R, out: &mut Vec<R>) {
    let two = R::one() + R::one();
    out.clear();
    out.push(R::one());
    if max == 0 {
        return;
    }
    out.push(two * tau);
    for j in 1..max as usize {
        let next = two * tau * out[j] - two * <R as Real>::from_usize(j) * out[j - 1];
        out.push(next);
    }
}

/// Tensor-product Hermite polynomial `H_β(t) = Π_j H_{β_j}(t_j)`.
pub fn hermite_eval<R: Real>(beta: &MultiIndex, t: &[R]) -> Result<R> {
    if beta.dim() != t.len() {
        return Err(Error::DimensionMismatch {
            expected: beta.dim(),
            got: t.len(),
        });
    }
    Ok(beta
        .exponents()
        .iter()
        .zip(t)
        .fold(R::one(), |acc, (&k, &x)| acc * hermite_1d(k, x)))
}

/// `H_k(0)`: zero for odd `k`, `(−1)^j (2j)!/j!` for `k = 2j`.
pub fn hermite_1d_at_zero(k: u32) -> BigInt {
    if k % 2 == 1 {
        return BigInt::zero();
    }
    let j = k / 2;
    let v = factorial(k) / factorial(j);
    if j % 2 == 1 {
        -v
    } else {
        v
    }
}

/// `H_β(0)` in exact integer arithmetic: zero if any `β_j` is odd, otherwise
/// `(−1)^{|γ|}(2γ)!/γ!` for `β = 2γ`.
pub fn hermite_at_zero(beta: &MultiIndex) -> BigInt {
    beta.exponents()
        .iter()
        .fold(BigInt::one(), |acc, &k| acc * hermite_1d_at_zero(k))
}

/// Monomial coefficients of `H_k`: entry `j` multiplies `τ^j`.
pub fn hermite_monomial_coefficients(k: u32) -> Vec<BigInt> {
    let mut coeffs = vec![BigInt::zero(); k as usize + 1];
    let kf = factorial(k);
    for j in 0..=k / 2 {
        let p = k - 2 * j;
        let mut c = &kf / (factorial(j) * factorial(p)) * (BigInt::one() << p);
        if j % 2 == 1 {
            c = -c;
        }
        coeffs[p as usize] = c;
    }
    coeffs
}
