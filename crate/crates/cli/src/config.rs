//! TOML experiment files.

use std::collections::BTreeMap;
use std::path::Path;

use serde::Deserialize;

use crate::CliError;

/// Top-level experiment file. Sections other than the one matching the
/// subcommand are accepted and ignored.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub function: Option<String>,
    pub dim: Option<usize>,
    pub h: Option<Vec<f64>>,
    #[serde(rename = "D")]
    pub d: Option<Vec<f64>>,
    pub generators: Option<Vec<GeneratorSpec>>,
    pub grid: Option<GridSpec>,
    pub tail_tol: Option<f64>,
    pub seed: Option<u64>,
    #[serde(default)]
    pub converge: ConvergeSection,
    #[serde(default)]
    pub harmonic: HarmonicSection,
    #[serde(default)]
    pub saturation: SaturationSection,
    #[serde(default)]
    pub moments: MomentsSection,
    #[serde(default)]
    pub deriv: DerivSection,
}

/// A preset name, or a table with a preset and its parameters, or a custom
/// `Q` given by rational coefficients.
#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum GeneratorSpec {
    Preset(String),
    Table(GeneratorTable),
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeneratorTable {
    pub name: Option<String>,
    pub preset: Option<String>,
    #[serde(rename = "N")]
    pub order: Option<u32>,
    /// `"(1,0)" = "1/2"`; the constant term is always 1.
    pub q: Option<BTreeMap<String, String>>,
    #[serde(rename = "B")]
    pub b: Option<Vec<Vec<f64>>>,
}

/// Tensor grid of evaluation points, endpoints included.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
    pub points: Vec<usize>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConvergeSection {
    /// Check every unflagged slope against the generator order.
    pub check_slopes: Option<bool>,
    pub slope_tol: Option<f64>,
    /// Errors at most this multiple of the floor are flagged.
    pub floor_factor: Option<f64>,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Domain {
    /// Samples cover the evaluation box plus the truncation extent.
    #[default]
    Full,
    /// Samples restricted to `omega`.
    Box,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HarmonicSection {
    pub domain: Option<Domain>,
    pub omega: Option<Vec<[f64; 2]>>,
    /// Points with `dist(x, ∂W)/(h√𝒟)` below this are excluded from the sup.
    pub min_margin: Option<f64>,
    pub taylor_degree: Option<u32>,
    pub h_ratio_max: Option<f64>,
    /// Relative tolerance of the fitted `D`-slope against `−π²`.
    pub d_slope_tol: Option<f64>,
    pub prediction_tol: Option<f64>,
    #[serde(rename = "prediction_D")]
    pub prediction_d: Option<Vec<f64>>,
    /// `[D, bound]` pairs on the sup-error.
    pub max_error: Option<Vec<[f64; 2]>>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SaturationSection {
    pub max_order: Option<u32>,
    pub samples: Option<usize>,
    pub poisson_points: Option<usize>,
    pub poisson_tol: Option<f64>,
    pub expect_amplitude: Option<Vec<AmplitudeCheck>>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AmplitudeCheck {
    pub beta: String,
    #[serde(rename = "D")]
    pub d: f64,
    pub value: f64,
    pub rel_tol: f64,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MomentsSection {
    pub count: Option<usize>,
    pub dims: Option<Vec<usize>>,
    pub orders: Option<Vec<u32>>,
    pub tol: Option<f64>,
    pub quad_tol: Option<f64>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DerivSection {
    pub beta: Option<String>,
    pub fd_step: Option<f64>,
    pub fd_tol: Option<f64>,
    pub check_slopes: Option<bool>,
    pub slope_tol: Option<f64>,
}

impl ExperimentConfig {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        Self::parse(&text).map_err(|e| match e {
            CliError::Config(m) => CliError::Config(format!("{}: {m}", path.display())),
            other => other,
        })
    }
}

impl GridSpec {
    pub fn uniform(dim: usize, lo: f64, hi: f64, points: usize) -> Self {
        Self {
            lower: vec![lo; dim],
            upper: vec![hi; dim],
            points: vec![points; dim],
        }
    }

    pub fn dim(&self) -> usize {
        self.lower.len()
    }

    pub fn validate(&self, dim: usize) -> Result<(), CliError> {
        if self.lower.len() != dim || self.upper.len() != dim || self.points.len() != dim {
            return Err(CliError::Config(format!("grid must have {dim} entries per field")));
        }
        if self.points.iter().any(|&p| p == 0) {
            return Err(CliError::Config("grid.points must be positive".into()));
        }
        if self.lower.iter().zip(&self.upper).any(|(a, b)| !(a <= b)) {
            return Err(CliError::Config("grid.lower must not exceed grid.upper".into()));
        }
        Ok(())
    }

    /// Points in row-major order, last axis fastest.
    pub fn points(&self) -> Vec<Vec<f64>> {
        let axes: Vec<Vec<f64>> = (0..self.dim())
            .map(|j| {
                let (a, b, p) = (self.lower[j], self.upper[j], self.points[j]);
                if p == 1 {
                    return vec![a];
                }
                (0..p).map(|k| a + (b - a) * k as f64 / (p - 1) as f64).collect()
            })
            .collect();
        let mut out = vec![Vec::new()];
        for axis in &axes {
            out = out
                .into_iter()
                .flat_map(|prefix| {
                    axis.iter().map(move |&v| {
                        let mut p = prefix.clone();
                        p.push(v);
                        p
                    })
                })
                .collect();
        }
        out
    }

    pub fn describe(&self) -> String {
        (0..self.dim())
            .map(|j| format!("[{},{}]x{}", self.lower[j], self.upper[j], self.points[j]))
            .collect::<Vec<_>>()
            .join(";")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_nested_sections() {
        let cfg = ExperimentConfig::parse(
            r#"
function = "cos"
h = [0.2, 0.1]
D = [2.0]
generators = ["example2-M2", { preset = "anisotropic-1", B = [[2.0, 1.0], [1.0, 2.0]] }, { N = 4, q = { "(2)" = "-1/4" } }]

[converge]
slope_tol = 0.4
"#,
        )
        .unwrap();
        assert_eq!(cfg.generators.unwrap().len(), 3);
        assert_eq!(cfg.converge.slope_tol, Some(0.4));
    }

    #[test]
    fn unknown_field_reports_position() {
        let err = ExperimentConfig::parse("function = \"cos\"\nstep = 3\n").unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("step"), "{msg}");
        assert!(msg.contains("line 2"), "{msg}");
    }

    #[test]
    fn grid_points_row_major() {
        let g = GridSpec {
            lower: vec![0.0, -1.0],
            upper: vec![1.0, 1.0],
            points: vec![2, 3],
        };
        let p = g.points();
        assert_eq!(p.len(), 6);
        assert_eq!(p[1], vec![0.0, 0.0]);
        assert_eq!(p[5], vec![1.0, 1.0]);
    }
}
