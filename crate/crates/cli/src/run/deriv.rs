//! `deriv`: `∂^β M u − ∂^β u` through the differentiated generator.
//!
//! Main table: `generator,N,D,h,sup_error,identity_max,slope,eps_exponent,l_exponent,n_exponent,radius`.
//! `identity_max` is `max_x |FD − op| / max(1, |op|)` where `op` is
//! `(h√𝒟)^{−|β|} M_{∂^β ℋ} u` and `FD` nested central differences of
//! `M u` with one Richardson step. The exponent columns are the powers of
//! `h` in the three terms of the error estimate: `−|β|` for the `ε`-term,
//! `L − |β|` with `L = N + |β|`, and `N`. The slope check uses `N`.
//! Auxiliary `errors`: `generator,D,h,x1..xn,error,identity`.

use rayon::prelude::*;

use hqi_core::derivatives::{differentiate_generator, MAX_DERIVATIVE_ORDER};
use hqi_core::interpolant::fit_slopes;
use hqi_core::{MultiIndex, QuasiInterpolant};

use super::{sample_for, sup_abs, x_columns, Common, Defaults};
use crate::config::ExperimentConfig;
use crate::functions::{self, Source};
use crate::output::{Cell, Check, Outcome, Table};
use crate::CliError;

const DEFAULTS: Defaults<'static> = Defaults {
    function: "sin",
    dim: 1,
    h: &[0.2, 0.1, 0.05],
    d: &[2.0],
    tail_tol: 1e-16,
    grid: (-3.0, 3.0, 61),
    generators: &["laguerre-1"],
};

/// Nested central differences of `f` along the axes of `beta` with step `s`.
fn central<F: Fn(&[f64]) -> Result<f64, CliError>>(f: &F, beta: &MultiIndex, x: &[f64], s: f64) -> Result<f64, CliError> {
    let axes: Vec<usize> = beta
        .exponents()
        .iter()
        .enumerate()
        .flat_map(|(j, &k)| std::iter::repeat(j).take(k as usize))
        .collect();
    let mut acc = 0.0;
    let count = 1usize << axes.len();
    for mask in 0..count {
        let mut y = x.to_vec();
        let mut sign = 1.0;
        for (bit, &j) in axes.iter().enumerate() {
            if mask >> bit & 1 == 1 {
                y[j] -= s;
                sign = -sign;
            } else {
                y[j] += s;
            }
        }
        acc += sign * f(&y)?;
    }
    Ok(acc / (2.0 * s).powi(axes.len() as i32))
}

/// Richardson combination of steps `s` and `s/2`, error `O(s⁴)`.
pub fn finite_difference<F: Fn(&[f64]) -> Result<f64, CliError>>(
    f: &F,
    beta: &MultiIndex,
    x: &[f64],
    s: f64,
) -> Result<f64, CliError> {
    let coarse = central(f, beta, x, s)?;
    let fine = central(f, beta, x, s / 2.0)?;
    Ok((4.0 * fine - coarse) / 3.0)
}

pub fn run(cfg: &ExperimentConfig) -> Result<Outcome, CliError> {
    let common = Common::resolve(cfg, &DEFAULTS)?;
    let sec = &cfg.deriv;
    let beta: MultiIndex = match &sec.beta {
        Some(b) => b.parse()?,
        None => MultiIndex::axis(common.dim, 0, 1),
    };
    if beta.dim() != common.dim {
        return Err(CliError::Config(format!("beta {beta} does not match dim = {}", common.dim)));
    }
    if beta.order() > MAX_DERIVATIVE_ORDER {
        return Err(hqi_core::Error::DerivativeOrder(beta.order()).into());
    }
    let step = sec.fd_step.unwrap_or(1e-2);
    let fd_tol = sec.fd_tol.unwrap_or(1e-5);
    let check_slopes = sec.check_slopes.unwrap_or(true);
    let slope_tol = sec.slope_tol.unwrap_or(0.4);
    let source = functions::resolve(&common.function, common.dim)?;
    let Source::Analytic(u) = &source else {
        return Err(CliError::Config("deriv needs an analytic test function".into()));
    };
    let u = u.as_ref();
    let points = common.grid.points();
    let order = beta.order();

    let mut header = common.header();
    header.push(("beta".into(), beta.to_string()));
    header.push(("fd_step".into(), step.to_string()));
    header.push(("fd_tol".into(), fd_tol.to_string()));
    header.push(("slope_tol".into(), slope_tol.to_string()));

    let mut main = Table::new(&[
        "generator", "N", "D", "h", "sup_error", "identity_max", "slope", "eps_exponent", "l_exponent", "n_exponent",
        "radius",
    ]);
    let mut cols = vec!["generator".to_string(), "D".into(), "h".into()];
    cols.extend(x_columns(common.dim));
    cols.extend(["error".into(), "identity".into()]);
    let mut errors = Table::new(&cols);
    let mut checks = Vec::new();

    for g in &common.generators {
        let (gen, q) = g.hermite_pair()?;
        let derived = differentiate_generator(&gen, &beta)?;
        let n = i64::from(g.order);
        for &d in &common.d {
            let mut sups = Vec::new();
            let mut idents = Vec::new();
            let mut radii = Vec::new();
            for &h in &common.h {
                let qcfg = common.qi_config(g, h, d)?;
                let pad = f64::from(order) * step;
                let data = sample_for(g, u, &qcfg, &points, pad)?;
                let base = QuasiInterpolant::hermite(&gen, &q, &data, &qcfg)?;
                let diff = QuasiInterpolant::hermite(&derived.generator, &q, &data, &qcfg)?;
                let scale = qcfg.scale().powi(-(order as i32));
                let mu = |y: &[f64]| -> Result<f64, CliError> { Ok(base.eval(y)?) };
                let vals: Vec<(f64, f64)> = points
                    .par_iter()
                    .map(|x| -> Result<(f64, f64), CliError> {
                        let op = scale * diff.eval(x)?;
                        let fd = finite_difference(&mu, &beta, x, step)?;
                        Ok((op - u.partial(&beta, x), (fd - op).abs() / op.abs().max(1.0)))
                    })
                    .collect::<Result<_, _>>()?;
                for (x, (e, id)) in points.iter().zip(&vals) {
                    let mut row: Vec<Cell> = vec![g.name.clone().into(), d.into(), h.into()];
                    row.extend(x.iter().map(|&v| Cell::F(v)));
                    row.extend([(*e).into(), (*id).into()]);
                    errors.push(row);
                }
                sups.push(sup_abs(vals.iter().map(|v| v.0)));
                idents.push(sup_abs(vals.iter().map(|v| v.1)));
                radii.push(qcfg.truncation_radius(derived.generator.degree()));
            }
            let slopes = fit_slopes(&common.h, &sups);
            for (k, &h) in common.h.iter().enumerate() {
                let slope = if k == 0 { f64::NAN } else { slopes[k - 1] };
                checks.push(Check::new(
                    format!("identity[{},D={d},h={h}]", g.name),
                    idents[k] <= fd_tol,
                    format!("max relative difference {:.3e}, tolerance {fd_tol:e}", idents[k]),
                ));
                if k > 0 && check_slopes {
                    checks.push(Check::new(
                        format!("slope[{},D={d},h={}->{h}]", g.name, common.h[k - 1]),
                        (slope - n as f64).abs() <= slope_tol,
                        format!("observed {slope:.4}, expected {n} +- {slope_tol}"),
                    ));
                }
                main.push(vec![
                    g.name.clone().into(),
                    g.order.into(),
                    d.into(),
                    h.into(),
                    sups[k].into(),
                    idents[k].into(),
                    slope.into(),
                    (-i64::from(order)).into(),
                    n.into(),
                    n.into(),
                    radii[k].into(),
                ]);
            }
        }
    }
    Ok(Outcome {
        header,
        main,
        aux: vec![("errors".into(), errors)],
        checks,
    })
}
