//! `saturation`: `σ_β` amplitudes, the Poisson identity and `ε` bounds.
//!
//! Main table: `beta,D,amplitude,cutoff,poisson_max_diff,imag_max`, where the
//! Poisson columns compare the Fourier series with the direct lattice sum at
//! seeded random points of the unit cell. Auxiliary `epsilon`:
//! `generator,D,kind,index,value,cutoff` with `kind` one of `alpha`
//! (`ε_α`), `combination` (per `β`) or `epsilon` (the maximum).

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use hqi_core::saturation::{sigma_amplitude, sigma_direct, sigma_series};
use hqi_core::special_fn::enumerate_indices;
use hqi_core::MultiIndex;

use super::positive;
use crate::config::{ExperimentConfig, GeneratorSpec};
use crate::output::{list, Check, Outcome, Table};
use crate::preset;
use crate::{CliError, DEFAULT_SEED};

pub fn run(cfg: &ExperimentConfig) -> Result<Outcome, CliError> {
    let sec = &cfg.saturation;
    let dim = cfg.dim.unwrap_or(1);
    if dim == 0 {
        return Err(CliError::Config("dim must be positive".into()));
    }
    let ds = cfg.d.clone().unwrap_or_else(|| vec![1.0, 2.0, 3.0, 5.0]);
    positive("D", &ds)?;
    let max_order = sec.max_order.unwrap_or(5);
    let samples = sec.samples.unwrap_or(64);
    let n_points = sec.poisson_points.unwrap_or(100);
    let tol = sec.poisson_tol.unwrap_or(1e-12);
    let tail_tol = cfg.tail_tol.unwrap_or(1e-16);
    let seed = cfg.seed.unwrap_or(DEFAULT_SEED);
    if samples == 0 {
        return Err(CliError::Config("samples must be positive".into()));
    }
    let specs: Vec<GeneratorSpec> = cfg
        .generators
        .clone()
        .unwrap_or_else(|| vec![GeneratorSpec::Preset("laguerre-1".into()), GeneratorSpec::Preset("laguerre-2".into())]);
    let generators = specs
        .iter()
        .map(|s| preset::resolve(s, dim))
        .collect::<Result<Vec<_>, _>>()?;

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let points: Vec<Vec<f64>> = (0..n_points)
        .map(|_| (0..dim).map(|_| rng.gen::<f64>()).collect())
        .collect();

    let betas = enumerate_indices(dim, max_order)?;
    let jobs: Vec<(MultiIndex, f64)> = betas
        .iter()
        .flat_map(|b| ds.iter().map(move |&d| (b.clone(), d)))
        .collect();
    let rows: Vec<(f64, u32, f64, f64)> = jobs
        .par_iter()
        .map(|(beta, d)| -> Result<_, CliError> {
            let (amp, cutoff) = sigma_amplitude(beta, *d, samples)?;
            let mut diff: f64 = 0.0;
            let mut imag: f64 = 0.0;
            for x in &points {
                let s = sigma_series(beta, x, *d, tail_tol)?;
                let direct: f64 = sigma_direct(beta, x, *d, tail_tol)?;
                diff = diff.max((s.value - direct).abs());
                imag = imag.max(s.imag.abs());
            }
            Ok((amp, cutoff, diff, imag))
        })
        .collect::<Result<_, _>>()?;

    let mut main = Table::new(&["beta", "D", "amplitude", "cutoff", "poisson_max_diff", "imag_max"]);
    let mut checks = Vec::new();
    for ((beta, d), (amp, cutoff, diff, imag)) in jobs.iter().zip(&rows) {
        main.push(vec![beta.to_string().into(), (*d).into(), (*amp).into(), (*cutoff).into(), (*diff).into(), (*imag).into()]);
        if !points.is_empty() {
            checks.push(Check::new(
                format!("poisson[beta={beta},D={d}]"),
                *diff <= tol && *imag <= tol,
                format!("max difference {diff:.3e}, max imaginary part {imag:.3e}, tolerance {tol:e}"),
            ));
        }
    }
    for e in sec.expect_amplitude.iter().flatten() {
        let beta: MultiIndex = e.beta.parse()?;
        let (amp, _) = sigma_amplitude(&beta, e.d, samples)?;
        let rel = (amp - e.value).abs() / e.value.abs();
        checks.push(Check::new(
            format!("amplitude[beta={beta},D={}]", e.d),
            rel <= e.rel_tol,
            format!("amplitude {amp:.6e}, expected {:e}, relative deviation {rel:.3e}", e.value),
        ));
    }

    let mut eps = Table::new(&["generator", "D", "kind", "index", "value", "cutoff"]);
    for g in &generators {
        for &d in &ds {
            let Some(b) = g.saturation_bound(d)? else {
                return Err(CliError::Config(format!("no epsilon bound for anisotropic generator {:?}", g.name)));
            };
            for (a, v) in &b.per_alpha {
                eps.push(vec![g.name.clone().into(), d.into(), "alpha".into(), a.to_string().into(), (*v).into(), b.cutoff.into()]);
            }
            for (a, v) in &b.combinations {
                eps.push(vec![g.name.clone().into(), d.into(), "combination".into(), a.to_string().into(), (*v).into(), b.cutoff.into()]);
            }
            eps.push(vec![g.name.clone().into(), d.into(), "epsilon".into(), "".into(), b.epsilon.into(), b.cutoff.into()]);
        }
    }

    let mut header = vec![
        ("dim".to_string(), dim.to_string()),
        ("D".into(), list(&ds)),
        ("max_order".into(), max_order.to_string()),
        ("samples".into(), samples.to_string()),
        ("poisson_points".into(), n_points.to_string()),
        ("poisson_tol".into(), format!("{:e}", tol)),
        ("tail_tol".into(), format!("{:e}", tail_tol)),
        ("seed".into(), seed.to_string()),
    ];
    for g in &generators {
        header.push((format!("generator.{}", g.name), g.describe()));
    }
    Ok(Outcome {
        header,
        main,
        aux: vec![("epsilon".into(), eps)],
        checks,
    })
}
