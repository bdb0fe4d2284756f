//! CSV tables, plot-data files and the run summary.

use std::fs;
use std::io::Write;
use std::path::Path;

use qwlimits_core::convergence::ConvergenceReport;
use qwlimits_core::SpinorField;

use crate::error::{CliError, Result};

#[derive(Clone, Debug, PartialEq)]
pub enum Cell {
    Int(i64),
    Float(f64),
    Text(String),
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Float(v)
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as i64)
    }
}

impl From<i64> for Cell {
    fn from(v: i64) -> Self {
        Cell::Int(v)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.to_string())
    }
}

/// 17 significant digits: enough to round-trip any `f64`.
pub fn fmt_float(v: f64) -> String {
    format!("{v:.16e}")
}

fn escape(field: &str) -> String {
    if field.contains([',', '"', '\r', '\n']) {
        format!("\"{}\"", field.replace('"', "\"\""))
    } else {
        field.to_string()
    }
}

impl Cell {
    fn render(&self) -> String {
        match self {
            Cell::Int(i) => i.to_string(),
            Cell::Float(f) => fmt_float(*f),
            Cell::Text(s) => escape(s),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Table {
    header: Vec<String>,
    rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(header: &[&str]) -> Self {
        Table { header: header.iter().map(|h| h.to_string()).collect(), rows: Vec::new() }
    }

    /// Panics on a width mismatch; rows are built by this crate only.
    pub fn push(&mut self, row: Vec<Cell>) {
        assert_eq!(row.len(), self.header.len(), "row width does not match header");
        self.rows.push(row);
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        let line = |cells: Vec<String>, out: &mut String| {
            out.push_str(&cells.join(","));
            out.push_str("\r\n");
        };
        line(self.header.iter().map(|h| escape(h)).collect(), &mut out);
        for r in &self.rows {
            line(r.iter().map(Cell::render).collect(), &mut out);
        }
        out
    }
}

fn write_file(path: &Path, contents: &str) -> Result<()> {
    let mut f = fs::File::create(path).map_err(|e| CliError::io(path, e))?;
    f.write_all(contents.as_bytes()).map_err(|e| CliError::io(path, e))
}

pub fn emit_csv(path: &Path, table: &Table) -> Result<()> {
    write_file(path, &table.to_csv())
}

/// Two whitespace-separated columns, one `#` header line.
pub fn emit_plotdata(path: &Path, labels: (&str, &str), series: &[(f64, f64)]) -> Result<()> {
    if series.is_empty() {
        return Err(CliError::config(format!("{}: empty plot series", path.display())));
    }
    let mut s = format!("# {} {}\n", labels.0, labels.1);
    for &(x, y) in series {
        s.push_str(&format!("{} {}\n", fmt_float(x), fmt_float(y)));
    }
    write_file(path, &s)
}

pub fn field_table(field: &SpinorField) -> Table {
    let mut t = Table::new(&["site", "x", "re_L", "im_L", "re_R", "im_R"]);
    for (j, s) in field.data().iter().enumerate() {
        t.push(vec![j.into(), field.grid().x(j).into(), s.l.re.into(), s.l.im.into(), s.r.re.into(), s.r.im.into()]);
    }
    t
}

pub fn report_table(report: &ConvergenceReport) -> Table {
    let mut t = Table::new(&["dt", "dx", "distance"]);
    for p in &report.probe_points {
        t.push(vec![p.dt.into(), p.dx.into(), p.distance.into()]);
    }
    t
}

/// `(log10 step, log10 distance)`, skipping exact zeros.
pub fn convergence_series(report: &ConvergenceReport) -> Vec<(f64, f64)> {
    report
        .probe_points
        .iter()
        .filter(|p| p.distance > 0.0)
        .map(|p| {
            let step = if p.dt > 0.0 { p.dt } else { p.dx };
            (step.log10(), p.distance.log10())
        })
        .collect()
}

pub fn distribution_series(field: &SpinorField) -> Vec<(f64, f64)> {
    field.probabilities().into_iter().enumerate().map(|(j, p)| (field.grid().x(j), p)).collect()
}
