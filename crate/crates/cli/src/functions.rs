//! Test-function ids.

use std::path::PathBuf;

use hqi_core::testfn::{Cosine, ExpCos, Monomial, Sine, TestFunction};
use hqi_core::Samples;

use crate::CliError;

pub enum Source {
    Analytic(Box<dyn TestFunction>),
    /// Precomputed samples; values are reported without errors.
    Grid { data: Samples, path: PathBuf },
}

impl Source {
    pub fn dim(&self) -> usize {
        match self {
            Source::Analytic(f) => f.dim(),
            Source::Grid { data, .. } => data.dim,
        }
    }

    pub fn analytic(&self) -> Option<&dyn TestFunction> {
        match self {
            Source::Analytic(f) => Some(f.as_ref()),
            Source::Grid { .. } => None,
        }
    }
}

/// `cos`, `sin`, `exp-cos-2d`, `poly:k`, `linear` or `grid:PATH`.
pub fn resolve(id: &str, dim: usize) -> Result<Source, CliError> {
    let f: Box<dyn TestFunction> = match id {
        "cos" => Box::new(Cosine { dim }),
        "sin" => Box::new(Sine { dim }),
        "linear" => Box::new(Monomial { dim, degree: 1, scale: 1.0 }),
        "exp-cos-2d" => {
            if dim != 2 {
                return Err(CliError::Config(format!("exp-cos-2d needs dim = 2, got {dim}")));
            }
            Box::new(ExpCos)
        }
        _ => {
            if let Some(k) = id.strip_prefix("poly:") {
                let degree = k
                    .parse()
                    .map_err(|_| CliError::Config(format!("bad polynomial degree in {id:?}")))?;
                Box::new(Monomial { dim, degree, scale: 1.0 })
            } else if let Some(path) = id.strip_prefix("grid:") {
                let path = PathBuf::from(path);
                let text = std::fs::read_to_string(&path)
                    .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
                let data = Samples::from_json(&text)?;
                if data.dim != dim {
                    return Err(CliError::Config(format!(
                        "{} holds {}-D samples, dim = {dim}",
                        path.display(),
                        data.dim
                    )));
                }
                return Ok(Source::Grid { data, path });
            } else {
                return Err(CliError::Config(format!("unknown test function {id:?}")));
            }
        }
    };
    Ok(Source::Analytic(f))
}
