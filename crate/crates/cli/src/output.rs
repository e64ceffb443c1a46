//! CSV tables with `# key=value` headers.

use std::fmt;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use crate::CliError;

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    F(f64),
    I(i64),
    S(String),
    B(bool),
}

impl fmt::Display for Cell {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Cell::F(v) => write!(f, "{v:.17e}"),
            Cell::I(v) => write!(f, "{v}"),
            Cell::S(s) => write!(f, "{s}"),
            Cell::B(b) => write!(f, "{b}"),
        }
    }
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::F(v)
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::I(v as i64)
    }
}

impl From<u32> for Cell {
    fn from(v: u32) -> Self {
        Cell::I(i64::from(v))
    }
}

impl From<i64> for Cell {
    fn from(v: i64) -> Self {
        Cell::I(v)
    }
}

impl From<bool> for Cell {
    fn from(v: bool) -> Self {
        Cell::B(v)
    }
}

impl From<String> for Cell {
    fn from(v: String) -> Self {
        Cell::S(v)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::S(v.into())
    }
}

impl Cell {
    pub fn as_f64(&self) -> Option<f64> {
        match self {
            Cell::F(v) => Some(*v),
            Cell::I(v) => Some(*v as f64),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new<S: AsRef<str>>(columns: &[S]) -> Self {
        Self {
            columns: columns.iter().map(|c| c.as_ref().to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn column(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c == name)
    }

    /// Rows whose `key` column renders as `value`.
    pub fn select<'a>(&'a self, key: &str, value: &'a str) -> impl Iterator<Item = &'a Vec<Cell>> + 'a {
        let k = self.column(key);
        self.rows
            .iter()
            .filter(move |r| k.is_some_and(|k| r[k].to_string() == value))
    }

    pub fn write<W: Write>(&self, mut w: W, header: &[(String, String)]) -> Result<(), CliError> {
        for (k, v) in header {
            writeln!(w, "# {k}={v}")?;
        }
        let mut csv = csv::Writer::from_writer(w);
        csv.write_record(&self.columns)?;
        for row in &self.rows {
            csv.write_record(row.iter().map(Cell::to_string))?;
        }
        csv.flush()?;
        Ok(())
    }
}

/// One tolerance check.
#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl Check {
    pub fn new(name: impl Into<String>, passed: bool, detail: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            passed,
            detail: detail.into(),
        }
    }
}

#[derive(Debug, Clone, Default)]
pub struct Outcome {
    pub header: Vec<(String, String)>,
    pub main: Table,
    /// Written to `<out>.<name>.csv`.
    pub aux: Vec<(String, Table)>,
    pub checks: Vec<Check>,
}

impl Outcome {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn aux(&self, name: &str) -> Option<&Table> {
        self.aux.iter().find(|(n, _)| n == name).map(|(_, t)| t)
    }

    pub fn checks_table(&self) -> Table {
        let mut t = Table::new(&["check", "passed", "detail"]);
        for c in &self.checks {
            t.push(vec![c.name.clone().into(), c.passed.into(), c.detail.clone().into()]);
        }
        t
    }

    pub fn aux_path(out: &Path, name: &str) -> PathBuf {
        let mut s = out.as_os_str().to_owned();
        s.push(format!(".{name}.csv"));
        PathBuf::from(s)
    }

    /// Main table to `out` (stdout when `None`), auxiliary tables and the
    /// check summary next to it.
    pub fn write(&self, out: Option<&Path>) -> Result<Vec<PathBuf>, CliError> {
        let Some(out) = out else {
            let stdout = std::io::stdout();
            self.main.write(stdout.lock(), &self.header)?;
            return Ok(Vec::new());
        };
        let mut written = vec![out.to_path_buf()];
        self.main.write(BufWriter::new(File::create(out)?), &self.header)?;
        let summary = self.checks_table();
        let aux = self.aux.iter().map(|(n, t)| (n.as_str(), t)).chain([("checks", &summary)]);
        for (name, table) in aux {
            let path = Self::aux_path(out, name);
            table.write(BufWriter::new(File::create(&path)?), &self.header)?;
            written.push(path);
        }
        Ok(written)
    }
}

/// `a,b,c` rendering of a list of floats for header lines.
pub fn list(values: &[f64]) -> String {
    values.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(",")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_quotes_and_formats() {
        let mut t = Table::new(&["q", "v"]);
        t.push(vec!["(1,0)=1/2".into(), 0.1.into()]);
        let mut buf = Vec::new();
        t.write(&mut buf, &[("h".into(), "0.1".into())]).unwrap();
        let s = String::from_utf8(buf).unwrap();
        assert_eq!(s, "# h=0.1\nq,v\n\"(1,0)=1/2\",1.00000000000000006e-1\n");
    }

    #[test]
    fn aux_paths() {
        let p = Outcome::aux_path(Path::new("/tmp/run.csv"), "grid");
        assert_eq!(p, PathBuf::from("/tmp/run.csv.grid.csv"));
    }
}
