use crate::error::{Error, Result};
use crate::linalg::SquareMatrix;
use crate::moments::{gaussian_normalization, Anisotropy, GeneratingFunction, HermiteKernel, QPolynomial};
use crate::scalar::{Real, Scalar};
use crate::sum::CompensatedSum;

use super::config::QIConfig;
use super::data::{Channel, HermiteData, Window};

/// Value of a quasi-interpolant at one point, with coverage diagnostics.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Evaluation<R> {
    pub value: R,
    /// The truncation ball reached past the sampled window.
    pub clipped: bool,
    /// `dist(x, ∂W) / (h√𝒟)` for the box hull `W` of the window.
    pub margin: f64,
    /// Lattice points that entered the sum.
    pub terms: usize,
}

/// A quasi-interpolant prepared for repeated evaluation: the per-node
/// weights `Σ_γ (−h√𝒟)^{|γ|} a_γ ∂^γ u(hm)` are combined once.
#[derive(Debug, Clone)]
pub struct QuasiInterpolant<'a, R> {
    kernel: GeneratingFunction<R>,
    factor: Option<SquareMatrix<R>>,
    weights: Vec<R>,
    window: &'a Window,
    cfg: QIConfig,
    radius: f64,
    extent: Vec<f64>,
    prefactor: R,
    strict: bool,
}

fn check_config<R: Real>(data: &HermiteData<R>, cfg: &QIConfig) -> Result<()> {
    cfg.validate()?;
    data.validate()?;
    if ((data.h - cfg.h) / cfg.h).abs() > 1e-12 {
        return Err(Error::InvalidConfig(format!(
            "data sampled at h = {}, configuration asks for h = {}",
            data.h, cfg.h
        )));
    }
    Ok(())
}

fn value_channel<R: Real>(data: &HermiteData<R>) -> Result<&[R]> {
    let c = Channel::value(data.dim);
    data.channel(&c).or_else(|_| data.channel(&Channel::Power(0)))
}

fn power_channel<R: Real>(data: &HermiteData<R>, s: u32) -> Result<&[R]> {
    if s == 0 {
        return data
            .channel(&Channel::Power(0))
            .or_else(|_| data.channel(&Channel::value(data.dim)));
    }
    data.channel(&Channel::Power(s))
}

/// Weights `(−h²𝒟)^s / (s! 4^s)` of the Laplacian-power form, `s < M`.
pub fn laplacian_weights<R: Real>(half_order: u32, scale: f64) -> Vec<R> {
    let mut out = Vec::with_capacity(half_order as usize);
    let mut w = 1.0f64;
    for s in 0..half_order {
        if s > 0 {
            w *= -scale * scale / (4.0 * f64::from(s));
        }
        out.push(<R as Real>::from_f64(w));
    }
    out
}

impl<'a, R: Real> QuasiInterpolant<'a, R> {
    /// General Hermite form `D^{−n/2} Σ_m (Σ_γ (−h√𝒟)^{|γ|} a_γ ∂^γ u(hm)) ℋ((x − hm)/(h√𝒟))`.
    pub fn hermite<T: Scalar>(
        g: &GeneratingFunction<R>,
        q: &QPolynomial<T>,
        data: &'a HermiteData<R>,
        cfg: &QIConfig,
    ) -> Result<Self> {
        check_config(data, cfg)?;
        if g.dim() != data.dim || q.dim() != data.dim {
            return Err(Error::DimensionMismatch {
                expected: data.dim,
                got: if g.dim() != data.dim { g.dim() } else { q.dim() },
            });
        }
        let scale = cfg.scale();
        let mut weights = vec![R::zero(); data.len()];
        for (gamma, a) in q.coefficients() {
            let values = data.channel(&Channel::Partial(gamma.clone()))?;
            let c = <R as Real>::from_f64((-scale).powi(gamma.order() as i32) * a.as_f64());
            for (w, v) in weights.iter_mut().zip(values) {
                *w = *w + c * *v;
            }
        }
        Ok(Self::assemble(g.clone(), weights, data, cfg, true))
    }

    /// Laplacian-power form of order `2M` with the Gaussian kernel.
    pub fn laplacian(data: &'a HermiteData<R>, half_order: u32, cfg: &QIConfig) -> Result<Self> {
        check_config(data, cfg)?;
        let weights = Self::power_weights(data, half_order, cfg)?;
        Ok(Self::assemble(GeneratingFunction::gaussian(data.dim), weights, data, cfg, true))
    }

    /// Anisotropic form with kernel `(det B)^{−1/2} π^{−n/2} e^{−⟨B⁻¹y, y⟩}`
    /// and weights built from the `𝔅^s u` channels.
    pub fn anisotropic(
        b: &SquareMatrix<R>,
        data: &'a HermiteData<R>,
        half_order: u32,
        cfg: &QIConfig,
    ) -> Result<Self> {
        check_config(data, cfg)?;
        let weights = Self::power_weights(data, half_order, cfg)?;
        let g = GeneratingFunction::gaussian(data.dim).with_anisotropy(b.clone())?;
        Ok(Self::assemble(g, weights, data, cfg, true))
    }

    /// Single-channel Gaussian sum over the active (in-domain) nodes. Points
    /// near the boundary of the window are evaluated, not refused.
    pub fn harmonic(
        data: &'a HermiteData<R>,
        cfg: &QIConfig,
        b: Option<&SquareMatrix<R>>,
    ) -> Result<Self> {
        check_config(data, cfg)?;
        let weights = value_channel(data)?.to_vec();
        let mut g = GeneratingFunction::gaussian(data.dim);
        if let Some(b) = b {
            g = g.with_anisotropy(b.clone())?;
        }
        Ok(Self::assemble(g, weights, data, cfg, false))
    }

    fn power_weights(data: &HermiteData<R>, half_order: u32, cfg: &QIConfig) -> Result<Vec<R>> {
        if half_order == 0 {
            return Err(Error::InvalidConfig("M must be at least 1".into()));
        }
        let coeffs = laplacian_weights::<R>(half_order, cfg.scale());
        let mut weights = vec![R::zero(); data.len()];
        for (s, c) in coeffs.iter().enumerate() {
            let values = power_channel(data, s as u32)?;
            for (w, v) in weights.iter_mut().zip(values) {
                *w = *w + *c * *v;
            }
        }
        Ok(weights)
    }

    fn assemble(
        kernel: GeneratingFunction<R>,
        weights: Vec<R>,
        data: &'a HermiteData<R>,
        cfg: &QIConfig,
        strict: bool,
    ) -> Self {
        let mut out = Self {
            kernel,
            factor: None,
            weights,
            window: &data.window,
            cfg: *cfg,
            radius: 0.0,
            extent: Vec::new(),
            prefactor: R::zero(),
            strict,
        };
        out.finish();
        out
    }

    fn finish(&mut self) {
        let dim = self.kernel.dim();
        let radius = self.cfg.truncation_radius(self.kernel.degree());
        let sqrt_d = self.cfg.d.sqrt();
        let (factor, det, extent) = match self.kernel.anisotropy() {
            Some(a) => (
                Some(a.factor().clone()),
                a.det_factor(),
                (0..dim)
                    .map(|j| radius * sqrt_d * a.matrix().get(j, j).as_f64().sqrt())
                    .collect(),
            ),
            None => (None, R::one(), vec![radius * sqrt_d; dim]),
        };
        let d_pow = <R as Real>::from_f64(self.cfg.d).sqrt().reciprocal().powi(dim as i32);
        self.factor = factor;
        self.extent = extent;
        self.radius = radius;
        self.prefactor = det * d_pow * gaussian_normalization::<R>(dim);
    }

    pub fn config(&self) -> &QIConfig {
        &self.cfg
    }

    /// Truncation radius in the scaled metric.
    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn kernel(&self) -> &GeneratingFunction<R> {
        &self.kernel
    }

    pub fn anisotropy(&self) -> Option<&Anisotropy<R>> {
        self.kernel.anisotropy()
    }

    /// `M u(x)`; in strict mode fails when the truncation ball leaves the window.
    pub fn eval(&self, x: &[R]) -> Result<R> {
        self.sum(x, false).map(|e| e.value)
    }

    /// `M u(x)` with diagnostics; never refuses a clipped ball.
    pub fn eval_detailed(&self, x: &[R]) -> Result<Evaluation<R>> {
        self.sum(x, true)
    }

    fn sum(&self, x: &[R], lenient: bool) -> Result<Evaluation<R>> {
        let dim = self.window.dim();
        if x.len() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                got: x.len(),
            });
        }
        let h = self.cfg.h;
        let mut lo = vec![0i64; dim];
        let mut hi = vec![0i64; dim];
        let mut clipped = false;
        for j in 0..dim {
            let c = x[j].as_f64() / h;
            let (a, b) = ((c - self.extent[j]).ceil() as i64, (c + self.extent[j]).floor() as i64);
            let (wl, wu) = (self.window.lower()[j], self.window.upper()[j]);
            if a < wl || b > wu {
                if self.strict && !lenient {
                    return Err(Error::WindowTooSmall { axis: j });
                }
                clipped = true;
            }
            lo[j] = a.max(wl);
            hi[j] = b.min(wu);
        }
        let xf: Vec<f64> = x.iter().map(Scalar::as_f64).collect();
        let margin = self.window.box_distance(h, &xf) / self.cfg.scale();
        if lo.iter().zip(&hi).any(|(l, u)| l > u) {
            return Ok(Evaluation {
                value: R::zero(),
                clipped: true,
                margin,
                terms: 0,
            });
        }

        let hr = <R as Real>::from_f64(h);
        let inv_scale = (hr * <R as Real>::from_f64(self.cfg.d).sqrt()).reciprocal();
        let r2_max = <R as Real>::from_f64(self.radius * self.radius);
        let mut kernel = HermiteKernel::new(&self.kernel);
        let mut acc = CompensatedSum::new();
        let mut t = vec![R::zero(); dim];
        let mut z = vec![R::zero(); dim];
        let mut m = lo.clone();
        let mut terms = 0usize;
        loop {
            let k = self.window.linear_index(&m).expect("box clipped to the window");
            if self.window.is_active(k) {
                for j in 0..dim {
                    t[j] = (x[j] - hr * <R as Real>::from_f64(m[j] as f64)) * inv_scale;
                }
                let y = match &self.factor {
                    Some(c) => {
                        c.mul_vec_into(&t, &mut z);
                        &z
                    }
                    None => &t,
                };
                let r2 = y.iter().fold(R::zero(), |s, v| s + *v * *v);
                if r2 <= r2_max {
                    let w = self.weights[k];
                    if !w.is_zero() {
                        acc.add(w * (-r2).exp_accurate() * kernel.polynomial(y));
                    }
                    terms += 1;
                }
            }
            // odometer, last axis fastest
            let mut axis = dim;
            loop {
                if axis == 0 {
                    return Ok(Evaluation {
                        value: self.prefactor * acc.value(),
                        clipped,
                        margin,
                        terms,
                    });
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
}

/// `M u(x)` for the general Hermite form.
pub fn evaluate_qi<R: Real, T: Scalar>(
    g: &GeneratingFunction<R>,
    q: &QPolynomial<T>,
    data: &HermiteData<R>,
    cfg: &QIConfig,
    x: &[R],
) -> Result<R> {
    QuasiInterpolant::hermite(g, q, data, cfg)?.eval(x)
}

/// `M^{(2M)} u(x)` for the Laplacian-power form.
pub fn evaluate_laplacian_qi<R: Real>(
    data: &HermiteData<R>,
    half_order: u32,
    cfg: &QIConfig,
    x: &[R],
) -> Result<R> {
    QuasiInterpolant::laplacian(data, half_order, cfg)?.eval(x)
}

/// Anisotropic form with `B` symmetric positive definite.
pub fn evaluate_anisotropic_qi<R: Real>(
    b: &SquareMatrix<R>,
    data: &HermiteData<R>,
    half_order: u32,
    cfg: &QIConfig,
    x: &[R],
) -> Result<R> {
    QuasiInterpolant::anisotropic(b, data, half_order, cfg)?.eval(x)
}

/// Gaussian sum restricted to `Ω ∩ hℤⁿ`, optionally with an anisotropic kernel.
pub fn evaluate_harmonic_qi<R: Real>(
    data: &HermiteData<R>,
    cfg: &QIConfig,
    x: &[R],
    b: Option<&SquareMatrix<R>>,
) -> Result<Evaluation<R>> {
    QuasiInterpolant::harmonic(data, cfg, b)?.eval_detailed(x)
}
