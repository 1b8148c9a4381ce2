use std::fmt;
use std::path::{Path, PathBuf};

use serde::Serialize;

use super::fit::LogFit;
use super::plot::{log2_line_plot, Series};
use crate::error::Result;

/// A CSV table; every row carries the parameters that produced it.
#[derive(Clone, Debug, Serialize)]
pub struct Table {
    pub name: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(name: &str, columns: &[&str]) -> Self {
        Self {
            name: name.into(),
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row.into_iter().map(|c| c.to_string()).collect());
    }

    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.columns)?;
        for r in &self.rows {
            w.write_record(r)?;
        }
        let bytes = w.into_inner().map_err(|e| std::io::Error::other(e.to_string()))?;
        Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
    }
}

/// A CSV cell; floats use the shortest round-trip representation, switching to
/// exponent notation for very large or small magnitudes.
pub enum Cell {
    F(f64),
    I(i64),
    U(u64),
    S(String),
}

impl fmt::Display for Cell {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Cell::F(v) => write!(f, "{v:?}"),
            Cell::I(v) => write!(f, "{v}"),
            Cell::U(v) => write!(f, "{v}"),
            Cell::S(v) => write!(f, "{v}"),
        }
    }
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::F(v)
    }
}

impl From<u32> for Cell {
    fn from(v: u32) -> Self {
        Cell::U(v as u64)
    }
}

impl From<u64> for Cell {
    fn from(v: u64) -> Self {
        Cell::U(v)
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::U(v as u64)
    }
}

impl From<i64> for Cell {
    fn from(v: i64) -> Self {
        Cell::I(v)
    }
}

impl From<bool> for Cell {
    fn from(v: bool) -> Self {
        Cell::S(v.to_string())
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::S(v.to_string())
    }
}

impl From<String> for Cell {
    fn from(v: String) -> Self {
        Cell::S(v)
    }
}

/// Build a row from heterogeneous values.
#[macro_export]
macro_rules! row {
    ($($v:expr),* $(,)?) => {
        vec![$($crate::harness::Cell::from($v)),*]
    };
}

/// A threshold comparison.
#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub threshold: f64,
    /// `"<="`, `"<"`, `">="` or `"=="`.
    pub relation: String,
    pub passed: bool,
}

impl Check {
    pub fn at_most(name: impl Into<String>, value: f64, threshold: f64) -> Self {
        Self::new(name, value, threshold, "<=", value <= threshold)
    }

    pub fn below(name: impl Into<String>, value: f64, threshold: f64) -> Self {
        Self::new(name, value, threshold, "<", value < threshold)
    }

    pub fn at_least(name: impl Into<String>, value: f64, threshold: f64) -> Self {
        Self::new(name, value, threshold, ">=", value >= threshold)
    }

    /// A yes/no property recorded as `1 == 1`.
    pub fn holds(name: impl Into<String>, ok: bool) -> Self {
        Self::new(name, if ok { 1.0 } else { 0.0 }, 1.0, "==", ok)
    }

    fn new(name: impl Into<String>, value: f64, threshold: f64, rel: &str, passed: bool) -> Self {
        Self {
            name: name.into(),
            value,
            threshold,
            relation: rel.into(),
            passed: passed && !value.is_nan(),
        }
    }
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "[{}] {}: {} {} {}",
            if self.passed { "PASS" } else { "FAIL" },
            self.name,
            self.value,
            self.relation,
            self.threshold
        )
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct NamedFit {
    pub name: String,
    #[serde(flatten)]
    pub fit: LogFit,
}

/// Line plot specification; written as SVG next to the CSV.
#[derive(Clone, Debug)]
pub struct Plot {
    pub title: String,
    pub xlabel: String,
    pub ylabel: String,
    pub series: Vec<Series>,
}

#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub experiment: String,
    /// The estimate this experiment probes.
    pub probes: String,
    pub config: serde_json::Value,
    pub tables: Vec<Table>,
    pub fits: Vec<NamedFit>,
    pub checks: Vec<Check>,
    pub metadata: serde_json::Map<String, serde_json::Value>,
    pub wall_clock_seconds: f64,
    #[serde(skip)]
    pub plots: Vec<Plot>,
}

impl Report {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn main_table(&self) -> &Table {
        &self.tables[0]
    }

    /// Writes `<name>.csv` (plus `<name>-<table>.csv` for further tables),
    /// `<name>.json` and `<name>.svg`; returns the paths written.
    pub fn write(&self, dir: &Path) -> Result<Vec<PathBuf>> {
        std::fs::create_dir_all(dir)?;
        let mut out = Vec::new();
        for (i, t) in self.tables.iter().enumerate() {
            let file = if i == 0 {
                format!("{}.csv", self.experiment)
            } else {
                format!("{}-{}.csv", self.experiment, t.name)
            };
            let p = dir.join(file);
            std::fs::write(&p, t.to_csv()?)?;
            out.push(p);
        }
        let p = dir.join(format!("{}.json", self.experiment));
        std::fs::write(&p, serde_json::to_string_pretty(self)? + "\n")?;
        out.push(p);
        for (i, plot) in self.plots.iter().enumerate() {
            let file = if i == 0 {
                format!("{}.svg", self.experiment)
            } else {
                format!("{}-{i}.svg", self.experiment)
            };
            let p = dir.join(file);
            std::fs::write(
                &p,
                log2_line_plot(&plot.title, &plot.xlabel, &plot.ylabel, &plot.series),
            )?;
            out.push(p);
        }
        Ok(out)
    }
}
