//! Subcommand drivers.

pub mod converge;
pub mod deriv;
pub mod harmonic;
pub mod moments;
pub mod saturation;

use hqi_core::interpolant::sample_on_window;
use hqi_core::testfn::TestFunction;
use hqi_core::{MultiIndex, QIConfig, QuasiInterpolant, Samples, Window};

use crate::config::{ExperimentConfig, GeneratorSpec, GridSpec};
use crate::output::list;
use crate::preset::{self, Kernel, ResolvedGenerator};
use crate::CliError;

pub(crate) fn positive(name: &str, values: &[f64]) -> Result<(), CliError> {
    if values.is_empty() {
        return Err(CliError::Config(format!("{name} must not be empty")));
    }
    if let Some(v) = values.iter().find(|v| !(**v > 0.0 && v.is_finite())) {
        return Err(CliError::Config(format!("{name} entries must be positive, got {v}")));
    }
    Ok(())
}

/// Settings shared by the grid-based experiments.
pub(crate) struct Common {
    pub function: String,
    pub dim: usize,
    pub h: Vec<f64>,
    pub d: Vec<f64>,
    pub tail_tol: f64,
    pub grid: GridSpec,
    pub generators: Vec<ResolvedGenerator>,
}

pub(crate) struct Defaults<'a> {
    pub function: &'a str,
    pub dim: usize,
    pub h: &'a [f64],
    pub d: &'a [f64],
    pub tail_tol: f64,
    pub grid: (f64, f64, usize),
    pub generators: &'a [&'a str],
}

impl Common {
    pub fn resolve(cfg: &ExperimentConfig, def: &Defaults<'_>) -> Result<Self, CliError> {
        let function = cfg.function.clone().unwrap_or_else(|| def.function.into());
        let dim = cfg
            .dim
            .unwrap_or(if function == "exp-cos-2d" { 2 } else { def.dim });
        if dim == 0 {
            return Err(CliError::Config("dim must be positive".into()));
        }
        let h = cfg.h.clone().unwrap_or_else(|| def.h.to_vec());
        let d = cfg.d.clone().unwrap_or_else(|| def.d.to_vec());
        positive("h", &h)?;
        positive("D", &d)?;
        let tail_tol = cfg.tail_tol.unwrap_or(def.tail_tol);
        if !(tail_tol > 0.0 && tail_tol < 1.0) {
            return Err(CliError::Config(format!("tail_tol must lie in (0, 1), got {tail_tol}")));
        }
        let grid = cfg
            .grid
            .clone()
            .unwrap_or_else(|| GridSpec::uniform(dim, def.grid.0, def.grid.1, def.grid.2));
        grid.validate(dim)?;
        let specs: Vec<GeneratorSpec> = match &cfg.generators {
            Some(g) => g.clone(),
            None => def.generators.iter().map(|s| GeneratorSpec::Preset(s.to_string())).collect(),
        };
        if specs.is_empty() && !def.generators.is_empty() {
            return Err(CliError::Config("generators must not be empty".into()));
        }
        let generators = specs
            .iter()
            .map(|s| preset::resolve(s, dim))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Self {
            function,
            dim,
            h,
            d,
            tail_tol,
            grid,
            generators,
        })
    }

    pub fn header(&self) -> Vec<(String, String)> {
        let mut out = vec![
            ("function".into(), self.function.clone()),
            ("dim".into(), self.dim.to_string()),
            ("h".into(), list(&self.h)),
            ("D".into(), list(&self.d)),
            ("tail_tol".into(), format!("{:e}", self.tail_tol)),
            ("grid".into(), self.grid.describe()),
        ];
        for g in &self.generators {
            out.push((format!("generator.{}", g.name), g.describe()));
        }
        out
    }

    pub fn qi_config(&self, g: &ResolvedGenerator, h: f64, d: f64) -> Result<QIConfig, CliError> {
        Ok(QIConfig::new(h, d, g.order)?.with_tail_tol(self.tail_tol)?)
    }
}

/// Lattice window covering `points` widened by `pad` per axis.
pub(crate) fn covering_window(points: &[Vec<f64>], pad: &[f64], h: f64) -> Result<Window, CliError> {
    let dim = pad.len();
    let intervals: Vec<(f64, f64)> = (0..dim)
        .map(|j| {
            let lo = points.iter().map(|p| p[j]).fold(f64::INFINITY, f64::min);
            let hi = points.iter().map(|p| p[j]).fold(f64::NEG_INFINITY, f64::max);
            (lo - pad[j] - h, hi + pad[j] + h)
        })
        .collect();
    Ok(Window::covering(h, &intervals)?)
}

/// Samples every channel the generator needs on a window wide enough for
/// strict evaluation at `points`.
pub(crate) fn sample_for(
    g: &ResolvedGenerator,
    u: &dyn TestFunction,
    cfg: &QIConfig,
    points: &[Vec<f64>],
    extra: f64,
) -> Result<Samples, CliError> {
    let pad: Vec<f64> = g.extent(cfg).iter().map(|e| e + extra).collect();
    let window = covering_window(points, &pad, cfg.h)?;
    let channels = g.channels();
    Ok(sample_on_window(|c, x: &[f64]| Some(g.sample(u, c, x)), &window, cfg.h, &channels)?)
}

/// Quasi-interpolant for any kernel kind.
pub(crate) fn build_qi<'a>(
    g: &ResolvedGenerator,
    data: &'a Samples,
    cfg: &QIConfig,
) -> Result<QuasiInterpolant<'a, f64>, CliError> {
    Ok(match &g.kernel {
        Kernel::Hermite { g: gen, q, .. } => QuasiInterpolant::hermite(gen, q, data, cfg)?,
        Kernel::Laplacian { half } => QuasiInterpolant::laplacian(data, *half, cfg)?,
        Kernel::Anisotropic { b, half } => QuasiInterpolant::anisotropic(b, data, *half, cfg)?,
    })
}

/// `max_x |∂^β u(x)|` over the evaluation points.
pub(crate) fn sup_partial(u: &dyn TestFunction, beta: &MultiIndex, points: &[Vec<f64>]) -> f64 {
    points.iter().map(|x| u.partial(beta, x).abs()).fold(0.0, f64::max)
}

pub(crate) fn x_columns(dim: usize) -> Vec<String> {
    (1..=dim).map(|j| format!("x{j}")).collect()
}

/// Sup over finite entries; NaN when there are none.
pub(crate) fn sup_abs<I: IntoIterator<Item = f64>>(values: I) -> f64 {
    let mut out = f64::NAN;
    for v in values {
        if v.is_finite() {
            out = if out.is_nan() { v.abs() } else { out.max(v.abs()) };
        } else if !v.is_nan() {
            out = f64::INFINITY;
        }
    }
    out
}
