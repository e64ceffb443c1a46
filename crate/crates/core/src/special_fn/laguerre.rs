//! Generalized Laguerre polynomials `L_k^{(γ)}`.

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::scalar::{factorial_q, Rational, Real};

/// `L_k^{(γ)}(y)` by the recurrence
/// `(j+1) L_{j+1} = (2j + 1 + γ − y) L_j − (j + γ) L_{j−1}`.
pub fn laguerre_eval<R: Real>(k: u32, gamma: R, y: R) -> Result<R> {
    if !(gamma > -R::one()) {
        return Err(Error::LaguerreParameter(gamma.as_f64()));
    }
    let mut prev = R::one();
    if k == 0 {
        return Ok(prev);
    }
    let mut cur = R::one() + gamma - y;
    for j in 1..k as usize {
        let jf = <R as Real>::from_usize(j);
        let two_j = jf + jf;
        let next = ((two_j + R::one() + gamma - y) * cur - (jf + gamma) * prev)
            / (jf + R::one());
        prev = cur;
        cur = next;
    }
    Ok(cur)
}

/// Exact monomial coefficients of `L_k^{(γ)}` for rational `γ`:
/// `L_k^{(γ)}(y) = Σ_i (−1)^i C(k+γ, k−i) y^i / i!`.
pub fn laguerre_coefficients(k: u32, gamma: &Rational) -> Result<Vec<Rational>> {
    if *gamma <= -Rational::one() {
        return Err(Error::LaguerreParameter(crate::Scalar::as_f64(gamma)));
    }
    let mut out = Vec::with_capacity(k as usize + 1);
    for i in 0..=k {
        // C(k+γ, k−i) = Π_{j=1}^{k−i} (i + γ + j) / (k−i)!
        let mut binom = Rational::one();
        for j in 1..=(k - i) {
            binom *= gamma + Rational::from_integer((i + j).into());
        }
        binom /= factorial_q(k - i);
        let mut c = binom / factorial_q(i);
        if i % 2 == 1 {
            c = -c;
        }
        out.push(c);
    }
    if out.is_empty() {
        out.push(Rational::zero());
    }
    Ok(out)
}
