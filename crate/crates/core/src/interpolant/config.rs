use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Grid spacing `h`, shape parameter `𝒟`, order `N` and the lattice-sum
/// truncation tolerance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QIConfig {
    pub h: f64,
    #[serde(rename = "D")]
    pub d: f64,
    #[serde(rename = "N")]
    pub order: u32,
    #[serde(default = "default_tail_tol")]
    pub tail_tol: f64,
}

fn default_tail_tol() -> f64 {
    1e-16
}

impl QIConfig {
    pub fn new(h: f64, d: f64, order: u32) -> Result<Self> {
        let cfg = Self {
            h,
            d,
            order,
            tail_tol: default_tail_tol(),
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn with_tail_tol(mut self, tail_tol: f64) -> Result<Self> {
        self.tail_tol = tail_tol;
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.h > 0.0 && self.h.is_finite()) {
            return Err(Error::InvalidConfig(format!("h must be positive, got {}", self.h)));
        }
        if !(self.d > 0.0 && self.d.is_finite()) {
            return Err(Error::InvalidConfig(format!("D must be positive, got {}", self.d)));
        }
        if self.order == 0 {
            return Err(Error::InvalidConfig("N must be at least 1".into()));
        }
        if !(self.tail_tol > 0.0 && self.tail_tol < 1.0) {
            return Err(Error::InvalidConfig(format!(
                "tail_tol must lie in (0, 1), got {}",
                self.tail_tol
            )));
        }
        Ok(())
    }

    /// Kernel width `h√𝒟`.
    pub fn scale(&self) -> f64 {
        self.h * self.d.sqrt()
    }

    /// `h√𝒟 ≥ 1`: allowed, but outside the regime of the harmonic limit.
    pub fn is_coarse(&self) -> bool {
        self.scale() >= 1.0
    }

    /// Truncation radius `R` in the scaled metric `|x − hm| / (h√𝒟)` for a
    /// kernel `P(y) e^{−|y|²}` with `deg P = degree`.
    ///
    /// `R² = ln(1/tail_tol)` for the plain Gaussian; polynomial factors add
    /// `degree · ln(2R)` so that `|P| e^{−R²}` stays below the tolerance.
    pub fn truncation_radius(&self, degree: u32) -> f64 {
        let base = -self.tail_tol.ln();
        let mut r2 = base;
        for _ in 0..50 {
            let next = base + f64::from(degree) * (2.0 * r2.sqrt()).max(1.0).ln();
            if (next - r2).abs() < 1e-12 {
                break;
            }
            r2 = next;
        }
        r2.sqrt()
    }
}
