//! `converge`: sup-errors of `M u − u` over an `h` sequence.
//!
//! Main table: `generator,N,D,h,sup_error,floor,epsilon,epsilon_0,floor_dominated,slope,radius,cutoff,points`.
//! `floor` is `Σ_β (h√𝒟)^{|β|} ε-combination_β · max|∂^β u|` over the grid,
//! `epsilon` the largest combination and `epsilon_0` the `β = 0` dual-lattice sum.
//! `slope` is the observed order against the previous `h` of the same
//! generator and `D`; it is NaN for the first `h` and whenever either end is
//! floor-dominated. Auxiliary `errors`: `generator,D,h,x1..xn,error`.
//! With `grid:PATH` data the main table holds `generator,D,h,x1..xn,value,clipped,margin`.

use rayon::prelude::*;

use hqi_core::interpolant::fit_slopes;

use super::{build_qi, sample_for, sup_abs, sup_partial, x_columns, Common, Defaults};
use crate::config::ExperimentConfig;
use crate::functions::{self, Source};
use crate::output::{Cell, Check, Outcome, Table};
use crate::CliError;

const DEFAULTS: Defaults<'static> = Defaults {
    function: "cos",
    dim: 1,
    h: &[0.2, 0.1, 0.05],
    d: &[2.0],
    tail_tol: 1e-16,
    grid: (-3.0, 3.0, 121),
    generators: &["example1-0", "example2-M1", "example2-M2", "laplacian-2"],
};

pub fn run(cfg: &ExperimentConfig) -> Result<Outcome, CliError> {
    let common = Common::resolve(cfg, &DEFAULTS)?;
    let sec = &cfg.converge;
    let check_slopes = sec.check_slopes.unwrap_or(true);
    let slope_tol = sec.slope_tol.unwrap_or(0.4);
    let factor = sec.floor_factor.unwrap_or(10.0);
    let source = functions::resolve(&common.function, common.dim)?;
    let points = common.grid.points();
    let mut header = common.header();
    header.push(("floor_factor".into(), factor.to_string()));
    header.push(("slope_tol".into(), slope_tol.to_string()));

    let u = match &source {
        Source::Grid { data, .. } => return grid_values(&common, data, &points, header),
        Source::Analytic(u) => u.as_ref(),
    };

    let mut main = Table::new(&[
        "generator", "N", "D", "h", "sup_error", "floor", "epsilon", "epsilon_0", "floor_dominated", "slope", "radius", "cutoff",
        "points",
    ]);
    let mut cols = vec!["generator".to_string(), "D".into(), "h".into()];
    cols.extend(x_columns(common.dim));
    cols.push("error".into());
    let mut errors = Table::new(&cols);
    let mut checks = Vec::new();

    for g in &common.generators {
        let degree = g.kernel_degree();
        for &d in &common.d {
            let bound = g.saturation_bound(d)?;
            let mut sups = Vec::new();
            let mut flags = Vec::new();
            let mut rows = Vec::new();
            for &h in &common.h {
                let qcfg = common.qi_config(g, h, d)?;
                let data = sample_for(g, u, &qcfg, &points, 0.0)?;
                let qi = build_qi(g, &data, &qcfg)?;
                let errs: Vec<f64> = points
                    .par_iter()
                    .map(|x| qi.eval(x).map(|v| v - u.value(x)))
                    .collect::<Result<_, _>>()?;
                for (x, e) in points.iter().zip(&errs) {
                    let mut row: Vec<Cell> = vec![g.name.clone().into(), d.into(), h.into()];
                    row.extend(x.iter().map(|&v| Cell::F(v)));
                    row.push((*e).into());
                    errors.push(row);
                }
                let sup = sup_abs(errs.iter().copied());
                let (floor, eps, eps0, cutoff) = match &bound {
                    Some(b) => (
                        b.floor(h, |beta| sup_partial(u, beta, &points)),
                        b.epsilon,
                        b.per_alpha[0].1,
                        i64::from(b.cutoff),
                    ),
                    None => (f64::NAN, f64::NAN, f64::NAN, -1),
                };
                let flagged = floor.is_finite() && sup <= factor * floor;
                sups.push(sup);
                flags.push(flagged);
                rows.push((h, sup, floor, eps, eps0, flagged, qcfg.truncation_radius(degree), cutoff));
            }
            let slopes = fit_slopes(&common.h, &sups);
            for (k, (h, sup, floor, eps, eps0, flagged, radius, cutoff)) in rows.into_iter().enumerate() {
                let slope = if k == 0 || flags[k] || flags[k - 1] { f64::NAN } else { slopes[k - 1] };
                if k > 0 && check_slopes && slope.is_finite() {
                    let target = f64::from(g.order);
                    checks.push(Check::new(
                        format!("slope[{},D={d},h={}->{h}]", g.name, common.h[k - 1]),
                        (slope - target).abs() <= slope_tol,
                        format!("observed {slope:.4}, expected {target} +- {slope_tol}"),
                    ));
                }
                main.push(vec![
                    g.name.clone().into(),
                    g.order.into(),
                    d.into(),
                    h.into(),
                    sup.into(),
                    floor.into(),
                    eps.into(),
                    eps0.into(),
                    flagged.into(),
                    slope.into(),
                    radius.into(),
                    cutoff.into(),
                    points.len().into(),
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

fn grid_values(
    common: &Common,
    data: &hqi_core::Samples,
    points: &[Vec<f64>],
    mut header: Vec<(String, String)>,
) -> Result<Outcome, CliError> {
    header.push(("samples_h".into(), data.h.to_string()));
    let mut cols = vec!["generator".to_string(), "D".into(), "h".into()];
    cols.extend(x_columns(common.dim));
    cols.extend(["value".into(), "clipped".into(), "margin".into()]);
    let mut main = Table::new(&cols);
    for g in &common.generators {
        for &d in &common.d {
            let qcfg = common.qi_config(g, data.h, d)?;
            let qi = super::build_qi(g, data, &qcfg)?;
            let evals: Vec<_> = points
                .par_iter()
                .map(|x| qi.eval_detailed(x))
                .collect::<Result<_, _>>()?;
            for (x, ev) in points.iter().zip(evals) {
                let mut row: Vec<Cell> = vec![g.name.clone().into(), d.into(), data.h.into()];
                row.extend(x.iter().map(|&v| Cell::F(v)));
                row.extend([ev.value.into(), ev.clipped.into(), ev.margin.into()]);
                main.push(row);
            }
        }
    }
    Ok(Outcome {
        header,
        main,
        aux: Vec::new(),
        checks: Vec::new(),
    })
}
