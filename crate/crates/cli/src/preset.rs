//! Generator presets named after the paper's examples.

use hqi_core::linalg::SquareMatrix;
use hqi_core::moments::build_hermite_generator;
use hqi_core::saturation::{epsilon_bound, SaturationBound};
use hqi_core::testfn::TestFunction;
use hqi_core::{Channel, ExactGenerator, ExactQ, Generator, MultiIndex, QIConfig, QPoly, Rational, Scalar};

use crate::config::{GeneratorSpec, GeneratorTable};
use crate::CliError;

pub const DEFAULT_B: [[f64; 2]; 2] = [[2.0, 1.0], [1.0, 2.0]];

#[derive(Debug, Clone)]
pub enum Kernel {
    /// General Hermite form with sampled partial derivatives.
    Hermite {
        g: Generator,
        q: QPoly,
        exact_g: ExactGenerator,
        exact_q: ExactQ,
    },
    /// Gaussian kernel with `Δ^s u` channels, order `2M`.
    Laplacian { half: u32 },
    /// Anisotropic Gaussian with `𝔅^s u` channels, order `2M`.
    Anisotropic { b: SquareMatrix<f64>, half: u32 },
}

#[derive(Debug, Clone)]
pub struct ResolvedGenerator {
    pub name: String,
    pub dim: usize,
    pub order: u32,
    pub kernel: Kernel,
}

fn parse_rational(s: &str) -> Result<Rational, CliError> {
    let s = s.trim();
    if let Ok(q) = s.parse::<Rational>() {
        return Ok(q);
    }
    match s.parse::<f64>() {
        Ok(v) if v.is_finite() => Ok(v.to_rational()),
        _ => Err(CliError::Config(format!("bad rational {s:?}"))),
    }
}

fn parse_suffix(name: &str, prefix: &str) -> Option<String> {
    name.strip_prefix(prefix).map(str::to_string)
}

fn parse_half(s: &str, name: &str) -> Result<u32, CliError> {
    match s.parse::<u32>() {
        Ok(m) if m >= 1 => Ok(m),
        _ => Err(CliError::Config(format!("preset {name:?} needs a positive integer M"))),
    }
}

fn hermite(name: String, q: ExactQ) -> ResolvedGenerator {
    let exact_g = build_hermite_generator(&q);
    ResolvedGenerator {
        name,
        dim: q.dim(),
        order: q.order(),
        kernel: Kernel::Hermite {
            g: exact_g.to_real(),
            q: q.to_scalar(),
            exact_g,
            exact_q: q,
        },
    }
}

fn require_1d(name: &str, dim: usize) -> Result<(), CliError> {
    if dim != 1 {
        return Err(CliError::Config(format!("preset {name:?} is one-dimensional, dim = {dim}")));
    }
    Ok(())
}

/// Resolves a preset or custom generator in dimension `dim`.
pub fn resolve(spec: &GeneratorSpec, dim: usize) -> Result<ResolvedGenerator, CliError> {
    let table = match spec {
        GeneratorSpec::Preset(p) => GeneratorTable {
            preset: Some(p.clone()),
            ..Default::default()
        },
        GeneratorSpec::Table(t) => t.clone(),
    };
    let mut out = match (&table.preset, &table.q) {
        (Some(p), None) => resolve_preset(p, dim, table.b.as_deref())?,
        (None, q) => {
            let order = table
                .order
                .ok_or_else(|| CliError::Config("custom generator needs N".into()))?;
            let mut coeffs = vec![(MultiIndex::zeros(dim), Rational::from_integer(1.into()))];
            for (k, v) in q.iter().flatten() {
                let gamma: MultiIndex = k.parse().map_err(|e: hqi_core::Error| CliError::Config(e.to_string()))?;
                if gamma.is_zero() {
                    return Err(CliError::Config("the constant term of Q is fixed to 1".into()));
                }
                coeffs.push((gamma, parse_rational(v)?));
            }
            let q = ExactQ::new(dim, order, coeffs)?;
            hermite("custom".into(), q)
        }
        (Some(_), Some(_)) => {
            return Err(CliError::Config("give either a preset or q, not both".into()));
        }
    };
    if table.preset.is_some() {
        if let Some(n) = table.order {
            if n != out.order {
                return Err(CliError::Config(format!(
                    "preset {:?} has order {}, config says N = {n}",
                    out.name, out.order
                )));
            }
        }
    }
    if let Some(name) = table.name {
        out.name = name;
    }
    Ok(out)
}

fn resolve_preset(name: &str, dim: usize, b: Option<&[Vec<f64>]>) -> Result<ResolvedGenerator, CliError> {
    if b.is_some() && !name.starts_with("anisotropic") {
        return Err(CliError::Config(format!("B only applies to anisotropic presets, not {name:?}")));
    }
    if let Some(m) = parse_suffix(name, "laguerre-") {
        let m = parse_half(&m, name)?;
        return Ok(hermite(name.into(), ExactQ::identity(dim, 2 * m)?));
    }
    if let Some(a) = parse_suffix(name, "example1-") {
        require_1d(name, dim)?;
        let a = parse_rational(&a)?;
        return Ok(hermite(name.into(), ExactQ::one_dim(2, &[a])?));
    }
    if name == "example2-M1" || name.starts_with("example2-M1:") {
        require_1d(name, dim)?;
        // a₁ = −1/2 gives ℋ = π^{−1/2}(1 + x)e^{−x²}
        let a1 = match name.strip_prefix("example2-M1:") {
            Some(v) => parse_rational(v)?,
            None => parse_rational("-1/2")?,
        };
        let zero = Rational::from_integer(0.into());
        return Ok(hermite(name.into(), ExactQ::one_dim(4, &[a1, zero.clone(), zero])?));
    }
    if name == "example2-M2" {
        require_1d(name, dim)?;
        let zero = Rational::from_integer(0.into());
        let q = ExactQ::one_dim(4, &[zero.clone(), parse_rational("-1/4")?, zero])?;
        return Ok(hermite(name.into(), q));
    }
    if let Some(m) = parse_suffix(name, "laplacian-") {
        let half = parse_half(&m, name)?;
        return Ok(ResolvedGenerator {
            name: name.into(),
            dim,
            order: 2 * half,
            kernel: Kernel::Laplacian { half },
        });
    }
    if name == "anisotropic" || name.starts_with("anisotropic-") {
        let half = match name.strip_prefix("anisotropic-") {
            Some(m) => parse_half(m, name)?,
            None => 1,
        };
        let rows: Vec<Vec<f64>> = match b {
            Some(rows) => rows.to_vec(),
            None if dim == 2 => DEFAULT_B.iter().map(|r| r.to_vec()).collect(),
            None => return Err(CliError::Config(format!("preset {name:?} needs B for dim = {dim}"))),
        };
        let b = SquareMatrix::from_rows(&rows)?;
        if b.dim() != dim {
            return Err(CliError::Config(format!("B is {0}x{0}, dim = {dim}", b.dim())));
        }
        return Ok(ResolvedGenerator {
            name: name.into(),
            dim,
            order: 2 * half,
            kernel: Kernel::Anisotropic { b, half },
        });
    }
    Err(CliError::Config(format!("unknown generator preset {name:?}")))
}

impl ResolvedGenerator {
    /// The Hermite-form data `(ℋ, Q)`; the Laplacian form is the Gaussian
    /// with `Q = Σ_{s<M} (−1/4)^s Δ^s / s!`.
    pub fn hermite_pair(&self) -> Result<(Generator, QPoly), CliError> {
        match &self.kernel {
            Kernel::Hermite { g, q, .. } => Ok((g.clone(), q.clone())),
            Kernel::Laplacian { half } => Ok((Generator::gaussian(self.dim), QPoly::laplacian(self.dim, *half)?)),
            Kernel::Anisotropic { .. } => Err(CliError::Config(format!(
                "generator {:?} is anisotropic; this experiment needs an isotropic one",
                self.name
            ))),
        }
    }

    pub fn kernel_degree(&self) -> u32 {
        match &self.kernel {
            Kernel::Hermite { g, .. } => g.degree(),
            _ => 0,
        }
    }

    /// Half-width of the truncation box along each axis, in `x` units.
    pub fn extent(&self, cfg: &QIConfig) -> Vec<f64> {
        let r = cfg.truncation_radius(self.kernel_degree()) * cfg.scale();
        match &self.kernel {
            Kernel::Anisotropic { b, .. } => (0..self.dim).map(|j| r * b.get(j, j).sqrt()).collect(),
            _ => vec![r; self.dim],
        }
    }

    pub fn channels(&self) -> Vec<Channel> {
        match &self.kernel {
            Kernel::Hermite { q, .. } => q.coefficients().map(|(g, _)| Channel::Partial(g.clone())).collect(),
            Kernel::Laplacian { half } | Kernel::Anisotropic { half, .. } => (0..*half).map(Channel::Power).collect(),
        }
    }

    /// Value of one sampled channel of `u` at `x`.
    pub fn sample(&self, u: &dyn TestFunction, c: &Channel, x: &[f64]) -> f64 {
        match (c, &self.kernel) {
            (Channel::Partial(g), _) => u.partial(g, x),
            (Channel::Power(s), Kernel::Anisotropic { b, .. }) => u.operator_power(b, *s, x),
            (Channel::Power(s), _) => u.laplacian_power(*s, x),
        }
    }

    /// Dual-lattice bound; `None` for the anisotropic kernel.
    pub fn saturation_bound(&self, d: f64) -> Result<Option<SaturationBound>, CliError> {
        if matches!(self.kernel, Kernel::Anisotropic { .. }) {
            return Ok(None);
        }
        let (g, q) = self.hermite_pair()?;
        Ok(Some(epsilon_bound(&g, &q, d)?))
    }

    pub fn describe(&self) -> String {
        match &self.kernel {
            Kernel::Hermite { exact_q, .. } => {
                let q: Vec<String> = exact_q
                    .coefficients()
                    .filter(|(g, _)| !g.is_zero())
                    .map(|(g, a)| format!("{g}={a}"))
                    .collect();
                format!("N={};Q=1{}", self.order, q.iter().map(|t| format!("+{t}")).collect::<String>())
            }
            Kernel::Laplacian { half } => format!("N={};laplacian M={half}", self.order),
            Kernel::Anisotropic { b, half } => format!("N={};anisotropic M={half} B={:?}", self.order, b.rows()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use hqi_core::moments::verify_moment_conditions;

    fn preset(name: &str, dim: usize) -> ResolvedGenerator {
        resolve(&GeneratorSpec::Preset(name.into()), dim).unwrap()
    }

    #[test]
    fn example_presets_satisfy_moments() {
        for name in ["example1-0", "example1-1/4", "example1-0.125", "example2-M1", "example2-M1:1/2", "example2-M2", "laguerre-3"] {
            let r = preset(name, 1);
            let Kernel::Hermite { exact_g, exact_q, .. } = &r.kernel else { panic!() };
            assert!(verify_moment_conditions(exact_g, exact_q, 0.0).unwrap().exact, "{name}");
        }
    }

    #[test]
    fn orders_and_errors() {
        assert_eq!(preset("laplacian-2", 2).order, 4);
        assert_eq!(preset("anisotropic-2", 2).order, 4);
        assert!(resolve(&GeneratorSpec::Preset("example2-M2".into()), 2).is_err());
        assert!(resolve(&GeneratorSpec::Preset("laguerre-0".into()), 1).is_err());
        assert!(resolve(&GeneratorSpec::Preset("spline".into()), 1).is_err());
    }

    #[test]
    fn channels_follow_kernel() {
        assert_eq!(preset("example2-M2", 1).channels().len(), 2);
        assert_eq!(preset("laplacian-3", 1).channels(), vec![Channel::Power(0), Channel::Power(1), Channel::Power(2)]);
    }
}
