use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::scalar::{factorial_q, pow2_q, Rational, Scalar};
use crate::special_fn::{enumerate_indices, MultiIndex};

use super::generator::GeneratingFunction;
use super::qpoly::QPolynomial;

/// `π^{−n/2} ∫ x^α e^{−|x|²} dx`: zero when some `α_j` is odd, otherwise
/// `Π_j α_j! / ((α_j/2)! 2^{α_j})`.
pub fn gaussian_moment(alpha: &MultiIndex) -> Rational {
    alpha
        .exponents()
        .iter()
        .fold(Rational::one(), |acc, &a| acc * gaussian_moment_1d(a))
}

fn gaussian_moment_1d(a: u32) -> Rational {
    if a % 2 == 1 {
        return Rational::zero();
    }
    factorial_q(a) / factorial_q(a / 2) * pow2_q(-(a as i32))
}

/// `π^{−n/2} ∫ x^α H_β(x) e^{−|x|²} dx`, using `∫ x^a H_b e^{−x²} = a!/(a−b)! ∫ x^{a−b} e^{−x²}`.
pub fn hermite_gaussian_moment(alpha: &MultiIndex, beta: &MultiIndex) -> Rational {
    alpha
        .exponents()
        .iter()
        .zip(beta.exponents())
        .fold(Rational::one(), |acc, (&a, &b)| {
            if b > a {
                return Rational::zero();
            }
            acc * factorial_q(a) / factorial_q(a - b) * gaussian_moment_1d(a - b)
        })
}

/// Residuals of the moment conditions for a generator and its polynomial.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MomentReport {
    /// `r_β = Σ_{α ≤ β} a_{β−α}/α! ∫ x^α ℋ − δ_{|β|0}` for `|β| ≤ N − 1`.
    pub residuals: Vec<(MultiIndex, f64)>,
    pub max_abs: f64,
    pub tol: f64,
    pub passed: bool,
    /// All residuals vanish in exact arithmetic.
    pub exact: bool,
}

impl MomentReport {
    pub fn worst(&self) -> Option<&(MultiIndex, f64)> {
        self.residuals
            .iter()
            .max_by(|a, b| a.1.abs().total_cmp(&b.1.abs()))
    }
}

/// Moments `∫ x^α ℋ` for all `|α| ≤ degree`, exact in the stored coefficients.
pub fn generator_moments<T: Scalar>(
    g: &GeneratingFunction<T>,
    degree: u32,
) -> Result<Vec<(MultiIndex, Rational)>> {
    if g.is_anisotropic() {
        return Err(Error::Anisotropic("closed-form moments need an isotropic generator"));
    }
    let coeffs: Vec<(MultiIndex, Rational)> = g
        .coefficients()
        .map(|(b, c)| (b.clone(), c.to_rational()))
        .collect();
    let set = enumerate_indices(g.dim(), degree)?;
    Ok(set
        .iter()
        .map(|alpha| {
            let mu = coeffs.iter().fold(Rational::zero(), |acc, (b, c)| {
                acc + c * hermite_gaussian_moment(alpha, b)
            });
            (alpha.clone(), mu)
        })
        .collect())
}

/// Checks the moment conditions in closed form.
pub fn verify_moment_conditions<T: Scalar>(
    g: &GeneratingFunction<T>,
    q: &QPolynomial<T>,
    tol: f64,
) -> Result<MomentReport> {
    if g.dim() != q.dim() {
        return Err(Error::DimensionMismatch {
            expected: q.dim(),
            got: g.dim(),
        });
    }
    let degree = q.order().saturating_sub(1);
    let moments = generator_moments(g, degree)?;
    let a: Vec<(MultiIndex, Rational)> = q
        .coefficients()
        .map(|(k, v)| (k.clone(), v.to_rational()))
        .collect();
    let scaled: std::collections::HashMap<&MultiIndex, Rational> = moments
        .iter()
        .map(|(alpha, mu)| (alpha, mu / Rational::from_integer(alpha.factorial())))
        .collect();
    let mut residuals = Vec::with_capacity(moments.len());
    let mut exact = true;
    let mut max_abs: f64 = 0.0;
    for (beta, _) in &moments {
        let mut r = if beta.is_zero() { -Rational::one() } else { Rational::zero() };
        for (gamma, a_gamma) in &a {
            if let Some(alpha) = beta.checked_sub(gamma) {
                r += a_gamma * &scaled[&alpha];
            }
        }
        exact &= r.is_zero();
        let v = r.abs().as_f64();
        max_abs = max_abs.max(v);
        residuals.push((beta.clone(), if r.is_negative() { -v } else { v }));
    }
    Ok(MomentReport {
        residuals,
        max_abs,
        tol,
        passed: max_abs <= tol,
        exact,
    })
}
