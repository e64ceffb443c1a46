//! Lattice-defect functions `σ_β`, Poisson sums on affine grids, the
//! saturation bound `ε` and the predicted harmonic saturation error.

use num_complex::{Complex, Complex64};
use num_traits::{One, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::SquareMatrix;
use crate::moments::{GeneratingFunction, QPolynomial};
use crate::scalar::{pow2_q, Rational, Real, Scalar};
use crate::special_fn::{enumerate_indices, hermite_at_zero, hermite_eval, hermite_table, MultiIndex};
use crate::sum::CompensatedSum;
use crate::testfn::TestFunction;

/// Series value with the imaginary residual of the truncated sum.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SeriesValue<R> {
    pub value: R,
    pub imag: R,
    pub cutoff: u32,
}

/// Smallest `K ≥ 1` with `e^{−π²𝒟(K+1)²}(K+1)^p < 10⁻² · tol · e^{−π²𝒟}`.
pub fn frequency_cutoff(d: f64, degree: u32, tail_tol: f64) -> u32 {
    let pi2 = std::f64::consts::PI.powi(2);
    let target = (1e-2 * tail_tol).ln();
    (1u32..400)
        .find(|&k| {
            let kk = f64::from(k + 1);
            -pi2 * d * (kk * kk - 1.0) + f64::from(degree) * kk.ln() < target
        })
        .unwrap_or(400)
}

// Odometer over the box |m_j| ≤ k (last axis fastest).
fn for_each_in_box(dim: usize, lo: &[i64], hi: &[i64], mut f: impl FnMut(&[i64])) {
    if lo.iter().zip(hi).any(|(l, u)| l > u) {
        return;
    }
    let mut m = lo.to_vec();
    loop {
        f(&m);
        let mut axis = dim;
        loop {
            if axis == 0 {
                return;
            }
            axis -= 1;
            if m[axis] < hi[axis] {
                m[axis] += 1;
                break;
            }
            m[axis] = lo[axis];
        }
    }
}

fn i_pow<R: Real>(k: u32) -> Complex<R> {
    match k % 4 {
        0 => Complex::new(R::one(), R::zero()),
        1 => Complex::new(R::zero(), R::one()),
        2 => Complex::new(-R::one(), R::zero()),
        _ => Complex::new(R::zero(), -R::one()),
    }
}

fn reduce<R: Real>(x: R) -> R {
    x - x.round()
}

/// `σ_β(x, 𝒟) = (−2πi)^{|β|} 𝒟^{|β|/2} Σ_{m≠0} m^β e^{−π²𝒟|m|²} e^{2πi⟨m,x⟩}`.
pub fn sigma_series<R: Real>(beta: &MultiIndex, x: &[R], d: f64, tail_tol: f64) -> Result<SeriesValue<R>> {
    if x.len() != beta.dim() {
        return Err(Error::DimensionMismatch {
            expected: beta.dim(),
            got: x.len(),
        });
    }
    let dim = x.len();
    let k = frequency_cutoff(d, beta.order(), tail_tol);
    let two_pi = R::PI() + R::PI();
    let decay = <R as Real>::from_f64(-std::f64::consts::PI.powi(2) * d);
    let xr: Vec<R> = x.iter().map(|v| reduce(*v)).collect();
    let mut re = CompensatedSum::new();
    let mut im = CompensatedSum::new();
    let lo = vec![-(k as i64); dim];
    let hi = vec![k as i64; dim];
    for_each_in_box(dim, &lo, &hi, |m| {
        if m.iter().all(|&v| v == 0) {
            return;
        }
        let mf: Vec<R> = m.iter().map(|&v| <R as Real>::from_f64(v as f64)).collect();
        let norm2 = mf.iter().fold(R::zero(), |s, v| s + *v * *v);
        let weight = beta.monomial(&mf) * (decay * norm2).exp();
        let phase = two_pi * mf.iter().zip(&xr).fold(R::zero(), |s, (a, b)| s + *a * *b);
        re.add(weight * phase.cos());
        im.add(weight * phase.sin());
    });
    let k_beta = beta.order();
    let scale = (two_pi * <R as Real>::from_f64(d.sqrt())).powi(k_beta as i32);
    let sign = if k_beta % 2 == 1 { -R::one() } else { R::one() };
    let z = Complex::new(re.value(), im.value()) * i_pow::<R>(k_beta) * (scale * sign);
    Ok(SeriesValue {
        value: z.re,
        imag: z.im,
        cutoff: k,
    })
}

/// `σ_β(x, 𝒟)` from the Fourier series with the default tolerance.
pub fn sigma_beta<R: Real>(beta: &MultiIndex, x: &[R], d: f64) -> Result<R> {
    sigma_series(beta, x, d, 1e-16).map(|s| s.value)
}

/// `(π𝒟)^{−n/2} Σ_m H_β((x−m)/√𝒟) e^{−|x−m|²/𝒟} − δ_{|β|0}` summed over the
/// lattice directly.
pub fn sigma_direct<R: Real>(beta: &MultiIndex, x: &[R], d: f64, tail_tol: f64) -> Result<R> {
    if x.len() != beta.dim() {
        return Err(Error::DimensionMismatch {
            expected: beta.dim(),
            got: x.len(),
        });
    }
    let dim = x.len();
    let radius = spatial_radius(beta.order(), tail_tol) * d.sqrt();
    let xr: Vec<R> = x.iter().map(|v| reduce(*v)).collect();
    let lo: Vec<i64> = xr.iter().map(|v| (v.as_f64() - radius).ceil() as i64).collect();
    let hi: Vec<i64> = xr.iter().map(|v| (v.as_f64() + radius).floor() as i64).collect();
    let inv_sqrt_d = <R as Real>::from_f64(1.0 / d.sqrt());
    let mut acc = CompensatedSum::new();
    let mut t = vec![R::zero(); dim];
    for_each_in_box(dim, &lo, &hi, |m| {
        for j in 0..dim {
            t[j] = (xr[j] - <R as Real>::from_f64(m[j] as f64)) * inv_sqrt_d;
        }
        let r2 = t.iter().fold(R::zero(), |s, v| s + *v * *v);
        acc.add(hermite_eval(beta, &t).expect("dimension checked") * (-r2).exp());
    });
    let norm = (R::PI() * <R as Real>::from_f64(d)).sqrt().reciprocal().powi(dim as i32);
    let delta = if beta.is_zero() { R::one() } else { R::zero() };
    Ok(norm * acc.value() - delta)
}

/// Scaled radius `R` with `R^p e^{−R²}` below `tail_tol`.
pub(crate) fn spatial_radius(degree: u32, tail_tol: f64) -> f64 {
    let base = -tail_tol.ln();
    let mut r2 = base;
    for _ in 0..50 {
        r2 = base + f64::from(degree) * (2.0 * r2.sqrt()).max(1.0).ln();
    }
    r2.sqrt()
}

/// `sup_x |σ_β(x, 𝒟)|` estimated on a uniform grid of the unit cell.
pub fn sigma_amplitude(beta: &MultiIndex, d: f64, samples: usize) -> Result<(f64, u32)> {
    let dim = beta.dim();
    let mut sup: f64 = 0.0;
    let mut cutoff = 0;
    let lo = vec![0i64; dim];
    let hi = vec![samples as i64 - 1; dim];
    let mut err = None;
    for_each_in_box(dim, &lo, &hi, |m| {
        let x: Vec<f64> = m.iter().map(|&v| v as f64 / samples as f64).collect();
        match sigma_series(beta, &x, d, 1e-16) {
            Ok(s) => {
                sup = sup.max(s.value.abs());
                cutoff = s.cutoff;
            }
            Err(e) => err = Some(e),
        }
    });
    match err {
        Some(e) => Err(e),
        None => Ok((sup, cutoff)),
    }
}

/// `Σ_α(ξ, 𝒟) = det C (π𝒟)^{−n/2} Σ_m y^α e^{−|y|²}`, `y = (ξ − Cm)/√𝒟`,
/// split into its mean `α!/(2^{|α|} γ!)` (for `α = 2γ`) and the dual-lattice
/// oscillation.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AffineSum<R> {
    #[serde(serialize_with = "ser_rational")]
    pub constant: Rational,
    pub oscillatory: R,
    pub imag: R,
    pub cutoff: u32,
}

fn ser_rational<S: serde::Serializer>(q: &Rational, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_str(q)
}

impl<R: Real> AffineSum<R> {
    pub fn value(&self) -> R {
        R::from_rational(&self.constant) + self.oscillatory
    }
}

/// `ν = 0` term of the affine Poisson sum: `(−i/2)^{|α|} H_α(0)`.
pub fn affine_constant(alpha: &MultiIndex) -> Rational {
    let h0 = Rational::from_integer(hermite_at_zero(alpha));
    if h0.is_zero() {
        return h0;
    }
    // |α| even here, (−i/2)^{|α|} = (−1)^{|α|/2} 2^{−|α|}
    let k = alpha.order();
    let sign = if (k / 2) % 2 == 1 { -Rational::one() } else { Rational::one() };
    sign * h0 * pow2_q(-(k as i32))
}

/// Fourier side of the affine Poisson formula with frequencies `C^{−T}ν`.
pub fn sigma_affine<R: Real>(
    alpha: &MultiIndex,
    xi: &[R],
    d: f64,
    c: &SquareMatrix<R>,
    tail_tol: f64,
) -> Result<AffineSum<R>> {
    let dim = alpha.dim();
    if xi.len() != dim || c.dim() != dim {
        return Err(Error::DimensionMismatch {
            expected: dim,
            got: if xi.len() != dim { xi.len() } else { c.dim() },
        });
    }
    let c_inv_t = c.inverse()?.transpose();
    // |C^{−T}ν| ≥ |ν| / ‖Cᵀ‖
    let stretch = c.frobenius_norm().as_f64();
    let k = frequency_cutoff(d / (stretch * stretch), alpha.order(), tail_tol);
    let pi = R::PI();
    let sqrt_d = <R as Real>::from_f64(d.sqrt());
    let lo = vec![-(k as i64); dim];
    let hi = vec![k as i64; dim];
    let mut re = CompensatedSum::new();
    let mut im = CompensatedSum::new();
    let mut lam = vec![R::zero(); dim];
    let mut scaled = vec![R::zero(); dim];
    for_each_in_box(dim, &lo, &hi, |nu| {
        if nu.iter().all(|&v| v == 0) {
            return;
        }
        let nuf: Vec<R> = nu.iter().map(|&v| <R as Real>::from_f64(v as f64)).collect();
        c_inv_t.mul_vec_into(&nuf, &mut lam);
        for j in 0..dim {
            scaled[j] = pi * sqrt_d * lam[j];
        }
        let r2 = scaled.iter().fold(R::zero(), |s, v| s + *v * *v);
        let amp = hermite_eval(alpha, &scaled).expect("dimension checked") * (-r2).exp();
        let phase = (pi + pi) * xi.iter().zip(&lam).fold(R::zero(), |s, (a, b)| s + *a * *b);
        re.add(amp * phase.cos());
        im.add(amp * phase.sin());
    });
    // (i/2π)^{|α|} (−π)^{|α|} = (−i/2)^{|α|}
    let k_alpha = alpha.order();
    let half = <R as Real>::from_f64(0.5f64.powi(k_alpha as i32));
    let sign = if k_alpha % 2 == 1 { -R::one() } else { R::one() };
    let z = Complex::new(re.value(), im.value()) * i_pow::<R>(k_alpha) * (half * sign);
    Ok(AffineSum {
        constant: affine_constant(alpha),
        oscillatory: z.re,
        imag: z.im,
        cutoff: k,
    })
}

/// Direct lattice evaluation of `Σ_α(ξ, 𝒟)`.
pub fn sigma_affine_direct<R: Real>(
    alpha: &MultiIndex,
    xi: &[R],
    d: f64,
    c: &SquareMatrix<R>,
    tail_tol: f64,
) -> Result<R> {
    let dim = alpha.dim();
    if xi.len() != dim || c.dim() != dim {
        return Err(Error::DimensionMismatch {
            expected: dim,
            got: xi.len(),
        });
    }
    let c_inv = c.inverse()?;
    let center = c_inv.mul_vec(xi);
    let radius = spatial_radius(alpha.order(), tail_tol) * d.sqrt();
    let mut lo = vec![0i64; dim];
    let mut hi = vec![0i64; dim];
    for j in 0..dim {
        let row: f64 = (0..dim).map(|k| c_inv.get(j, k).as_f64().powi(2)).sum::<f64>().sqrt();
        lo[j] = (center[j].as_f64() - radius * row).ceil() as i64;
        hi[j] = (center[j].as_f64() + radius * row).floor() as i64;
    }
    let inv_sqrt_d = <R as Real>::from_f64(1.0 / d.sqrt());
    let mut acc = CompensatedSum::new();
    let mut cm = vec![R::zero(); dim];
    let mut y = vec![R::zero(); dim];
    for_each_in_box(dim, &lo, &hi, |m| {
        let mf: Vec<R> = m.iter().map(|&v| <R as Real>::from_f64(v as f64)).collect();
        c.mul_vec_into(&mf, &mut cm);
        for j in 0..dim {
            y[j] = (xi[j] - cm[j]) * inv_sqrt_d;
        }
        let r2 = y.iter().fold(R::zero(), |s, v| s + *v * *v);
        acc.add(alpha.monomial(&y) * (-r2).exp());
    });
    let det = c.determinant().abs();
    let norm = (R::PI() * <R as Real>::from_f64(d)).sqrt().reciprocal().powi(dim as i32);
    Ok(det * norm * acc.value())
}

// ∂^a_λ [λ^b e^{−π²λ²}] in one variable.
fn axis_derivative<R: Real>(a: u32, b: u32, lambda: R) -> R {
    let pi = R::PI();
    let herm = hermite_table(a, pi * lambda);
    let gauss = (-(pi * lambda) * (pi * lambda)).exp();
    let mut acc = R::zero();
    let mut binom = 1.0f64;
    let mut falling = 1.0f64;
    for k in 0..=a.min(b) {
        if k > 0 {
            binom = binom * f64::from(a - k + 1) / f64::from(k);
            falling *= f64::from(b - k + 1);
        }
        let j = a - k;
        let coef = <R as Real>::from_f64(binom * falling * (-std::f64::consts::PI).powi(j as i32));
        acc = acc + coef * lambda.powi((b - k) as i32) * herm[j as usize];
    }
    acc * gauss
}

/// `∂^α ℱℋ(λ)` for `ℱℋ(λ) = e^{−π²|λ|²} Σ_β c_β (−2πiλ)^β`.
pub fn fourier_generator_derivative<R: Real>(
    g: &GeneratingFunction<R>,
    alpha: &MultiIndex,
    lambda: &[R],
) -> Result<Complex<R>> {
    if g.is_anisotropic() {
        return Err(Error::Anisotropic("closed-form transform is isotropic"));
    }
    if lambda.len() != g.dim() || alpha.dim() != g.dim() {
        return Err(Error::DimensionMismatch {
            expected: g.dim(),
            got: lambda.len(),
        });
    }
    let two_pi = R::PI() + R::PI();
    let mut acc = Complex::new(R::zero(), R::zero());
    for (beta, c) in g.coefficients() {
        let mut prod = *c;
        for ((&a, &b), &l) in alpha.exponents().iter().zip(beta.exponents()).zip(lambda) {
            prod = prod * axis_derivative(a, b, l);
        }
        let k = beta.order();
        let sign = if k % 2 == 1 { -R::one() } else { R::one() };
        acc = acc + i_pow::<R>(k) * (prod * sign * two_pi.powi(k as i32));
    }
    Ok(acc)
}

/// `ℱℋ(λ)`.
pub fn fourier_generator<R: Real>(g: &GeneratingFunction<R>, lambda: &[R]) -> Result<Complex<R>> {
    fourier_generator_derivative(g, &MultiIndex::zeros(g.dim()), lambda)
}

/// Saturation bounds at one `𝒟`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SaturationBound {
    pub d: f64,
    /// `ε_α = (2π)^{−|α|} Σ_{ν≠0} |∂^α ℱℋ(√𝒟ν)|`, `|α| ≤ N − 1`.
    pub per_alpha: Vec<(MultiIndex, f64)>,
    /// `Σ_{α≤β} |a_{β−α}|/α! · ε_α` for each `|β| ≤ N − 1`.
    pub combinations: Vec<(MultiIndex, f64)>,
    /// Largest combination.
    pub epsilon: f64,
    pub cutoff: u32,
}

impl SaturationBound {
    /// `Σ_β (h√𝒟)^{|β|} · combination_β · sup|∂^β u|`.
    pub fn floor<F: Fn(&MultiIndex) -> f64>(&self, h: f64, sup_partial: F) -> f64 {
        let s = h * self.d.sqrt();
        self.combinations
            .iter()
            .map(|(b, v)| s.powi(b.order() as i32) * v * sup_partial(b))
            .sum()
    }
}

/// Dual-lattice bound on the `ε`-terms of the pointwise estimate.
pub fn epsilon_bound<T: Scalar>(
    g: &GeneratingFunction<f64>,
    q: &QPolynomial<T>,
    d: f64,
) -> Result<SaturationBound> {
    if g.is_anisotropic() {
        return Err(Error::Anisotropic("saturation bound needs an isotropic generator"));
    }
    if g.dim() != q.dim() {
        return Err(Error::DimensionMismatch {
            expected: q.dim(),
            got: g.dim(),
        });
    }
    if !(d > 0.0) {
        return Err(Error::InvalidConfig("D must be positive".into()));
    }
    let dim = g.dim();
    let degree = q.order().saturating_sub(1);
    let set = enumerate_indices(dim, degree)?;
    let k = frequency_cutoff(d, g.degree() + degree, 1e-16);
    let sqrt_d = d.sqrt();
    let mut per_alpha = Vec::with_capacity(set.len());
    for alpha in set.iter() {
        let mut acc = CompensatedSum::new();
        let lo = vec![-(k as i64); dim];
        let hi = vec![k as i64; dim];
        let mut err = None;
        for_each_in_box(dim, &lo, &hi, |nu| {
            if nu.iter().all(|&v| v == 0) {
                return;
            }
            let lam: Vec<f64> = nu.iter().map(|&v| sqrt_d * v as f64).collect();
            match fourier_generator_derivative(g, alpha, &lam) {
                Ok(z) => acc.add(z.norm()),
                Err(e) => err = Some(e),
            }
        });
        if let Some(e) = err {
            return Err(e);
        }
        let scale = (2.0 * std::f64::consts::PI).powi(-(alpha.order() as i32));
        per_alpha.push((alpha.clone(), scale * acc.value()));
    }
    let mut combinations = Vec::with_capacity(set.len());
    for beta in set.iter() {
        let mut v = 0.0;
        for (alpha, eps) in &per_alpha {
            if let Some(rest) = beta.checked_sub(alpha) {
                let a = q.coefficient(&rest).as_f64().abs();
                let fact = Rational::from_integer(alpha.factorial()).as_f64();
                v += a / fact * eps;
            }
        }
        combinations.push((beta.clone(), v));
    }
    let epsilon = combinations.iter().map(|(_, v)| *v).fold(0.0, f64::max);
    Ok(SaturationBound {
        d,
        per_alpha,
        combinations,
        epsilon,
        cutoff: k,
    })
}

/// Predicted harmonic saturation error at `x`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HarmonicPrediction {
    /// `Σ_{m≠0} ũ(x + iπh𝒟m) e^{−π²𝒟|m|²} e^{2πi⟨m,x⟩/h}` with the full extension.
    pub full: f64,
    pub full_imag: f64,
    /// Same series with `ũ` replaced by its Taylor polynomial of degree
    /// `taylor_degree`, written through `σ_β(x/h, 𝒟)`.
    pub truncated: f64,
    pub truncated_imag: f64,
    pub cutoff: u32,
}

/// Evaluates both forms of the harmonic saturation series.
pub fn predict_harmonic_saturation<F: TestFunction + ?Sized>(
    u: &F,
    x: &[f64],
    h: f64,
    d: f64,
    taylor_degree: u32,
    tail_tol: f64,
) -> Result<HarmonicPrediction> {
    let dim = u.dim();
    if x.len() != dim {
        return Err(Error::DimensionMismatch {
            expected: dim,
            got: x.len(),
        });
    }
    let pi = std::f64::consts::PI;
    // ũ(x + iπh𝒟m) may grow like e^{πh𝒟|m|·c}; a wider cutoff keeps the
    // envelope dominant.
    let k = frequency_cutoff(d, taylor_degree.max(4), tail_tol) + 1;
    let lo = vec![-(k as i64); dim];
    let hi = vec![k as i64; dim];
    let mut re = CompensatedSum::new();
    let mut im = CompensatedSum::new();
    let mut missing = false;
    for_each_in_box(dim, &lo, &hi, |m| {
        if m.iter().all(|&v| v == 0) || missing {
            return;
        }
        let z: Vec<Complex64> = x
            .iter()
            .zip(m)
            .map(|(&xi, &mi)| Complex64::new(xi, pi * h * d * mi as f64))
            .collect();
        let Some(val) = u.complex_value(&z) else {
            missing = true;
            return;
        };
        let norm2: f64 = m.iter().map(|&v| (v * v) as f64).sum();
        let phase: f64 = 2.0 * pi * x.iter().zip(m).map(|(&xi, &mi)| reduce_phase(mi, xi, h)).sum::<f64>();
        let term = val * (-pi * pi * d * norm2).exp() * Complex64::from_polar(1.0, phase);
        re.add(term.re);
        im.add(term.im);
    });
    if missing {
        return Err(Error::InvalidConfig("test function has no analytic extension".into()));
    }

    let xi: Vec<f64> = x.iter().map(|v| v / h).collect();
    let set = enumerate_indices(dim, taylor_degree)?;
    let mut tr = CompensatedSum::new();
    let mut ti = CompensatedSum::new();
    let s = -h * d.sqrt() / 2.0;
    for beta in set.iter() {
        let series = sigma_series(beta, &xi, d, tail_tol)?;
        let fact = Rational::from_integer(beta.factorial()).as_f64();
        let c = u.partial(beta, x) / fact * s.powi(beta.order() as i32);
        tr.add(c * series.value);
        ti.add(c * series.imag);
    }
    Ok(HarmonicPrediction {
        full: re.value(),
        full_imag: im.value(),
        truncated: tr.value(),
        truncated_imag: ti.value(),
        cutoff: k,
    })
}

// m·x/h reduced modulo one before scaling by 2π.
fn reduce_phase(m: i64, x: f64, h: f64) -> f64 {
    let t = m as f64 * (x / h);
    t - t.round()
}
