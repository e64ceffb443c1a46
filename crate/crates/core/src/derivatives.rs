//! Derivatives of quasi-interpolants through differentiated generators.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::interpolant::{HermiteData, QIConfig, QuasiInterpolant};
use crate::moments::{GeneratingFunction, QPolynomial};
use crate::quadrature::CompositeRule;
use crate::scalar::{Real, Scalar};
use crate::special_fn::MultiIndex;
use crate::testfn::TestFunction;

/// Highest derivative order accepted by [`evaluate_qi_derivative`].
pub const MAX_DERIVATIVE_ORDER: u32 = 3;

/// `∂^β ℋ` re-expanded in Hermite functions.
#[derive(Debug, Clone, PartialEq)]
pub struct DerivedGenerator<T> {
    pub base: GeneratingFunction<T>,
    pub beta: MultiIndex,
    pub generator: GeneratingFunction<T>,
}

/// Uses `∂_j [H_k e^{−x²}] = −H_{k+e_j} e^{−x²}`, so `∂^β` shifts every
/// index by `β` with sign `(−1)^{|β|}`.
pub fn differentiate_generator<T: Scalar>(
    g: &GeneratingFunction<T>,
    beta: &MultiIndex,
) -> Result<DerivedGenerator<T>> {
    if beta.dim() != g.dim() {
        return Err(Error::DimensionMismatch {
            expected: g.dim(),
            got: beta.dim(),
        });
    }
    if g.is_anisotropic() {
        return Err(Error::Anisotropic("derivatives need an isotropic generator"));
    }
    let odd = beta.order() % 2 == 1;
    let coeffs: BTreeMap<MultiIndex, T> = g
        .coefficients()
        .map(|(k, c)| (k.add(beta), if odd { -c.clone() } else { c.clone() }))
        .collect();
    Ok(DerivedGenerator {
        base: g.clone(),
        beta: beta.clone(),
        generator: g.with_coefficients(coeffs, g.order()),
    })
}

/// `∂^β M u(x) = (h√𝒟)^{−|β|} M_{∂^β ℋ} u(x)`.
pub fn evaluate_qi_derivative<R: Real, T: Scalar>(
    g: &GeneratingFunction<R>,
    q: &QPolynomial<T>,
    data: &HermiteData<R>,
    cfg: &QIConfig,
    x: &[R],
    beta: &MultiIndex,
) -> Result<R> {
    if beta.order() > MAX_DERIVATIVE_ORDER {
        return Err(Error::DerivativeOrder(beta.order()));
    }
    let derived = differentiate_generator(g, beta)?;
    let value = QuasiInterpolant::hermite(&derived.generator, q, data, cfg)?.eval(x)?;
    let scale = <R as Real>::from_f64(cfg.scale().powi(-(beta.order() as i32)));
    Ok(scale * value)
}

/// Tensor Gauss–Legendre rule on `[−R, R]ⁿ` for the convolution oracle.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QuadratureSpec {
    pub panels: usize,
    pub order: usize,
    /// Accepted change between the rule and its panel-doubled refinement.
    pub tol: f64,
    pub tail_tol: f64,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self {
            panels: 16,
            order: 12,
            tol: 1e-11,
            tail_tol: 1e-16,
        }
    }
}

/// Convolution value with the refinement estimate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OracleValue {
    pub value: f64,
    pub estimate: f64,
    pub radius: f64,
}

/// `C_δ u(x) = δ^{−n} ∫ ℋ((x−y)/δ) 𝒬(−δ∂) u(y) dy`, computed as
/// `∫ ℋ(t) Σ_γ (−δ)^{|γ|} a_γ ∂^γ u(x − δt) dt`.
pub fn convolution_oracle<T: Scalar, F: TestFunction + ?Sized>(
    g: &GeneratingFunction<f64>,
    q: &QPolynomial<T>,
    u: &F,
    delta: f64,
    x: &[f64],
    spec: &QuadratureSpec,
) -> Result<OracleValue> {
    let dim = g.dim();
    if x.len() != dim || u.dim() != dim || q.dim() != dim {
        return Err(Error::DimensionMismatch {
            expected: dim,
            got: x.len(),
        });
    }
    let radius = crate::saturation::spatial_radius(g.degree(), spec.tail_tol);
    let terms: Vec<(MultiIndex, f64)> = q
        .coefficients()
        .map(|(gm, a)| (gm.clone(), (-delta).powi(gm.order() as i32) * a.as_f64()))
        .collect();
    let integrand = |t: &[f64]| -> f64 {
        let y: Vec<f64> = x.iter().zip(t).map(|(xi, ti)| xi - delta * ti).collect();
        let qu: f64 = terms.iter().map(|(gm, c)| c * u.partial(gm, &y)).sum();
        if qu == 0.0 {
            return 0.0;
        }
        g.eval(t).expect("dimension checked") * qu
    };
    let coarse = CompositeRule::new(-radius, radius, spec.panels, spec.order).integrate_cube(dim, integrand);
    let fine = CompositeRule::new(-radius, radius, 2 * spec.panels, spec.order).integrate_cube(dim, integrand);
    let estimate = (fine - coarse).abs();
    if estimate > spec.tol * fine.abs().max(1.0) {
        return Err(Error::QuadratureNotConverged {
            estimate,
            tol: spec.tol,
        });
    }
    Ok(OracleValue {
        value: fine,
        estimate,
        radius,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Rational;

    #[test]
    fn first_step_of_gaussian() {
        let g = GeneratingFunction::<Rational>::gaussian(1);
        let d = differentiate_generator(&g, &MultiIndex::from([1])).unwrap();
        let c: Vec<_> = d.generator.coefficients().collect();
        assert_eq!(c.len(), 1);
        assert_eq!(c[0].0, &MultiIndex::from([1]));
        assert_eq!(c[0].1, &crate::scalar::ratio(-1, 1));
    }

    #[test]
    fn repeated_equals_combined() {
        let q = QPolynomial::<Rational>::identity(2, 4).unwrap();
        let g = crate::moments::build_hermite_generator(&q);
        let e1 = MultiIndex::from([1, 0]);
        let once = differentiate_generator(&g, &e1).unwrap().generator;
        let twice = differentiate_generator(&once, &e1).unwrap().generator;
        let direct = differentiate_generator(&g, &MultiIndex::from([2, 0])).unwrap().generator;
        assert_eq!(twice, direct);
    }
}
