use std::io::{self, Write};

use serde::Serialize;

/// Pointwise errors `M u(x) − u(x)` at one `(h, 𝒟)`.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct ErrorReport {
    pub h: f64,
    pub d: f64,
    pub points: Vec<Vec<f64>>,
    pub errors: Vec<f64>,
    pub sup: f64,
}

impl ErrorReport {
    pub fn new(h: f64, d: f64) -> Self {
        Self {
            h,
            d,
            ..Self::default()
        }
    }

    pub fn push(&mut self, x: Vec<f64>, error: f64) {
        self.sup = self.sup.max(error.abs());
        self.points.push(x);
        self.errors.push(error);
    }

    pub fn len(&self) -> usize {
        self.errors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.errors.is_empty()
    }

    /// CSV with `# key=value` header lines, then `x1,…,xn,error,abs_error`.
    pub fn write_csv<W: Write>(&self, mut w: W, header: &[(String, String)]) -> io::Result<()> {
        for (k, v) in header {
            writeln!(w, "# {k}={v}")?;
        }
        let dim = self.points.first().map_or(1, Vec::len);
        let cols: Vec<String> = (1..=dim).map(|j| format!("x{j}")).collect();
        writeln!(w, "{},error,abs_error", cols.join(","))?;
        for (x, e) in self.points.iter().zip(&self.errors) {
            for xi in x {
                write!(w, "{xi:.17e},")?;
            }
            writeln!(w, "{e:.17e},{:.17e}", e.abs())?;
        }
        Ok(())
    }
}

/// Observed orders `log(e_i/e_{i+1}) / log(h_i/h_{i+1})` between consecutive
/// entries.
pub fn fit_slopes(h: &[f64], errors: &[f64]) -> Vec<f64> {
    h.windows(2)
        .zip(errors.windows(2))
        .map(|(hh, ee)| (ee[0] / ee[1]).ln() / (hh[0] / hh[1]).ln())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn slopes_of_power_law() {
        let h = [0.2, 0.1, 0.05];
        let e: Vec<f64> = h.iter().map(|v: &f64| 3.0 * v.powi(4)).collect();
        for s in fit_slopes(&h, &e) {
            assert!((s - 4.0).abs() < 1e-12);
        }
    }

    #[test]
    fn csv_layout() {
        let mut r = ErrorReport::new(0.1, 2.0);
        r.push(vec![0.5, -0.5], -2.0e-3);
        r.push(vec![0.0, 0.0], 1.0e-3);
        assert_eq!(r.sup, 2.0e-3);
        let mut buf = Vec::new();
        r.write_csv(&mut buf, &[("h".into(), "0.1".into())]).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "# h=0.1");
        assert_eq!(lines[1], "x1,x2,error,abs_error");
        assert_eq!(lines.len(), 4);
    }
}
