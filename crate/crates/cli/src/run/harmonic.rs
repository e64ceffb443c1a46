//! `harmonic`: single-channel Gaussian sums `M u − u` for harmonic `u`,
//! evaluated in double-double so that errors far below `f64` rounding of
//! `u` stay resolved.
//!
//! Main table: `D,h,sup_error,sup_predicted,sup_truncated,prediction_dev,truncated_dev,min_margin,points,clipped,radius,cutoff`.
//! `prediction_dev` is `sup|e − p| / sup|p|` for the full-extension series
//! `p`; `truncated_dev` uses the Taylor-truncated series instead.
//! Auxiliary tables: `grid` (`D,h,x1..xn,error,predicted_full,predicted_truncated,margin,included`),
//! `ratio` (`D,sup_min,sup_max,h_ratio`) and `slope` (`h,D_slope,reference,relative_deviation`).

use rayon::prelude::*;

use hqi_core::interpolant::sample_on_window;
use hqi_core::saturation::predict_harmonic_saturation;
use hqi_core::testfn::TestFunction;
use hqi_core::{Channel, DoubleDouble, HermiteData, QIConfig, QuasiInterpolant, Real, Scalar, Window};

use super::{covering_window, sup_abs, x_columns, Common, Defaults};
use crate::config::{Domain, ExperimentConfig};
use crate::functions::{self, Source};
use crate::output::{list, Cell, Check, Outcome, Table};
use crate::CliError;

const DEFAULTS: Defaults<'static> = Defaults {
    function: "exp-cos-2d",
    dim: 2,
    h: &[0.125, 0.0078125],
    d: &[2.0, 3.0, 4.0],
    tail_tol: 1e-24,
    grid: (-1.0, 1.0, 21),
    generators: &[],
};

fn dd(v: f64) -> DoubleDouble {
    <DoubleDouble as Real>::from_f64(v)
}

fn value_dd(u: &dyn TestFunction, x: &[DoubleDouble]) -> DoubleDouble {
    u.value_dd(x).unwrap_or_else(|| {
        let xf: Vec<f64> = x.iter().map(Scalar::as_f64).collect();
        dd(u.value(&xf))
    })
}

struct PointResult {
    error: f64,
    full: f64,
    truncated: f64,
    margin: f64,
    clipped: bool,
}

/// Least-squares slope of `y` against `x`.
fn ls_slope(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    sxy / sxx
}

pub fn run(cfg: &ExperimentConfig) -> Result<Outcome, CliError> {
    if cfg.generators.as_ref().is_some_and(|g| !g.is_empty()) {
        return Err(CliError::Config("harmonic uses the Gaussian kernel; remove generators".into()));
    }
    let common = Common::resolve(cfg, &DEFAULTS)?;
    let sec = &cfg.harmonic;
    let dim = common.dim;
    let domain = sec.domain.unwrap_or_default();
    let omega: Vec<(f64, f64)> = match &sec.omega {
        Some(o) => o.iter().map(|p| (p[0], p[1])).collect(),
        None => (0..dim).map(|j| (common.grid.lower[j], common.grid.upper[j])).collect(),
    };
    if omega.len() != dim {
        return Err(CliError::Config(format!("omega needs {dim} intervals")));
    }
    let taylor = sec.taylor_degree.unwrap_or(8);
    let h_ratio_max = sec.h_ratio_max.unwrap_or(2.0);
    let slope_tol = sec.d_slope_tol.unwrap_or(0.15);
    let pred_tol = sec.prediction_tol.unwrap_or(0.2);
    let pred_d = sec.prediction_d.clone().unwrap_or_else(|| vec![2.0, 3.0]);
    let points = common.grid.points();

    let mut header = common.header();
    header.push(("domain".into(), format!("{domain:?}").to_lowercase()));
    header.push((
        "omega".into(),
        omega.iter().map(|(a, b)| format!("[{a},{b}]")).collect::<Vec<_>>().join(";"),
    ));
    header.push(("taylor_degree".into(), taylor.to_string()));
    header.push(("prediction_D".into(), list(&pred_d)));

    let source = functions::resolve(&common.function, dim)?;
    let u = match &source {
        Source::Grid { data, .. } => return grid_values(&common, data, &points, header),
        Source::Analytic(u) => u.as_ref(),
    };

    let mut main = Table::new(&[
        "D", "h", "sup_error", "sup_predicted", "sup_truncated", "prediction_dev", "truncated_dev", "min_margin",
        "points", "clipped", "radius", "cutoff",
    ]);
    let mut cols = vec!["D".to_string(), "h".into()];
    cols.extend(x_columns(dim));
    cols.extend(["error", "predicted_full", "predicted_truncated", "margin", "included"].map(String::from));
    let mut grid = Table::new(&cols);
    let mut checks = Vec::new();
    let mut sups = vec![vec![f64::NAN; common.h.len()]; common.d.len()];

    for (di, &d) in common.d.iter().enumerate() {
        for (hi, &h) in common.h.iter().enumerate() {
            let qcfg = QIConfig::new(h, d, 2)?.with_tail_tol(common.tail_tol)?;
            let radius = qcfg.truncation_radius(0);
            let min_margin = sec.min_margin.unwrap_or(match domain {
                Domain::Full => 0.0,
                Domain::Box => radius,
            });
            let window = match domain {
                Domain::Full => covering_window(&points, &vec![radius * qcfg.scale(); dim], h)?,
                Domain::Box => Window::covering(h, &omega)?,
            };
            let data: HermiteData<DoubleDouble> =
                sample_on_window(|_, x| Some(value_dd(u, x)), &window, h, &[Channel::value(dim)])?;
            let qi = QuasiInterpolant::harmonic(&data, &qcfg, None)?;
            let results: Vec<PointResult> = points
                .par_iter()
                .map(|x| -> Result<PointResult, CliError> {
                    let xd: Vec<DoubleDouble> = x.iter().map(|&v| dd(v)).collect();
                    let ev = qi.eval_detailed(&xd)?;
                    let error = (ev.value - value_dd(u, &xd)).as_f64();
                    let (full, truncated) = match predict_harmonic_saturation(u, x, h, d, taylor, common.tail_tol) {
                        Ok(p) => (p.full, p.truncated),
                        Err(_) => (f64::NAN, f64::NAN),
                    };
                    Ok(PointResult {
                        error,
                        full,
                        truncated,
                        margin: ev.margin,
                        clipped: ev.clipped,
                    })
                })
                .collect::<Result<_, _>>()?;
            let inc: Vec<&PointResult> = results.iter().filter(|r| r.margin >= min_margin).collect();
            for (x, r) in points.iter().zip(&results) {
                let mut row: Vec<Cell> = vec![d.into(), h.into()];
                row.extend(x.iter().map(|&v| Cell::F(v)));
                row.extend([
                    r.error.into(),
                    r.full.into(),
                    r.truncated.into(),
                    r.margin.into(),
                    (r.margin >= min_margin).into(),
                ]);
                grid.push(row);
            }
            let sup = sup_abs(inc.iter().map(|r| r.error));
            let sup_full = sup_abs(inc.iter().map(|r| r.full));
            let sup_trunc = sup_abs(inc.iter().map(|r| r.truncated));
            let dev_full = sup_abs(inc.iter().map(|r| r.error - r.full)) / sup_full;
            let dev_trunc = sup_abs(inc.iter().map(|r| r.error - r.truncated)) / sup_trunc;
            let clipped = inc.iter().filter(|r| r.clipped).count();
            sups[di][hi] = sup;
            if pred_d.contains(&d) {
                checks.push(Check::new(
                    format!("prediction[D={d},h={h}]"),
                    dev_full <= pred_tol,
                    format!("relative deviation {dev_full:.3e}, tolerance {pred_tol}"),
                ));
            }
            for pair in sec.max_error.iter().flatten().filter(|p| p[0] == d) {
                checks.push(Check::new(
                    format!("max_error[D={d},h={h}]"),
                    sup <= pair[1],
                    format!("sup error {sup:.3e}, bound {:e}", pair[1]),
                ));
            }
            let cutoff = hqi_core::saturation::frequency_cutoff(d, taylor.max(4), common.tail_tol) + 1;
            main.push(vec![
                d.into(),
                h.into(),
                sup.into(),
                sup_full.into(),
                sup_trunc.into(),
                dev_full.into(),
                dev_trunc.into(),
                min_margin.into(),
                inc.len().into(),
                clipped.into(),
                radius.into(),
                cutoff.into(),
            ]);
        }
    }

    let mut ratio = Table::new(&["D", "sup_min", "sup_max", "h_ratio"]);
    for (di, &d) in common.d.iter().enumerate() {
        let lo = sups[di].iter().copied().fold(f64::INFINITY, f64::min);
        let hi = sups[di].iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let r = hi / lo;
        ratio.push(vec![d.into(), lo.into(), hi.into(), r.into()]);
        if common.h.len() > 1 {
            checks.push(Check::new(
                format!("h_ratio[D={d}]"),
                r <= h_ratio_max,
                format!("max/min sup error {r:.4}, bound {h_ratio_max}"),
            ));
        }
    }
    let reference = -std::f64::consts::PI.powi(2);
    let mut slope = Table::new(&["h", "D_slope", "reference", "relative_deviation"]);
    if common.d.len() > 1 {
        for (hi, &h) in common.h.iter().enumerate() {
            let y: Vec<f64> = sups.iter().map(|row| row[hi].ln()).collect();
            let s = ls_slope(&common.d, &y);
            let dev = (s / reference - 1.0).abs();
            slope.push(vec![h.into(), s.into(), reference.into(), dev.into()]);
            checks.push(Check::new(
                format!("D_slope[h={h}]"),
                dev <= slope_tol,
                format!("slope {s:.4} vs {reference:.4}, relative deviation {dev:.3}"),
            ));
        }
    }
    Ok(Outcome {
        header,
        main,
        aux: vec![("grid".into(), grid), ("ratio".into(), ratio), ("slope".into(), slope)],
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
    let mut cols = vec!["D".to_string(), "h".into()];
    cols.extend(x_columns(common.dim));
    cols.extend(["value".into(), "margin".into()]);
    let mut main = Table::new(&cols);
    for &d in &common.d {
        let qcfg = QIConfig::new(data.h, d, 2)?.with_tail_tol(common.tail_tol)?;
        let qi = QuasiInterpolant::harmonic(data, &qcfg, None)?;
        let evals: Vec<_> = points
            .par_iter()
            .map(|x| qi.eval_detailed(x))
            .collect::<Result<_, _>>()?;
        for (x, ev) in points.iter().zip(evals) {
            let mut row: Vec<Cell> = vec![d.into(), data.h.into()];
            row.extend(x.iter().map(|&v| Cell::F(v)));
            row.extend([ev.value.into(), ev.margin.into()]);
            main.push(row);
        }
    }
    Ok(Outcome {
        header,
        main,
        aux: Vec::new(),
        checks: Vec::new(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn least_squares_slope() {
        let x = [2.0, 3.0, 4.0];
        let y: Vec<f64> = x.iter().map(|v| 1.5 - 9.0 * v).collect();
        assert!((ls_slope(&x, &y) + 9.0).abs() < 1e-12);
    }
}
