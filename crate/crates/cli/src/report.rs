//! `metric,value,tolerance,pass` reports.

use std::fs;
use std::path::Path;

use crate::CliError;

#[derive(Clone, Debug, PartialEq)]
pub struct Row {
    pub metric: String,
    pub value: f64,
    /// Upper bound on `value`; informational rows have none.
    pub tolerance: Option<f64>,
    pub pass: bool,
}

impl Row {
    pub fn tolerance_text(&self) -> String {
        self.tolerance.map(number).unwrap_or_default()
    }
}

/// Shortest round-trip text; exponent form outside `[1e-3, 1e6)`.
pub fn number(x: f64) -> String {
    let m = x.abs();
    if x == 0.0 || !x.is_finite() || (1e-3..1e6).contains(&m) {
        x.to_string()
    } else {
        format!("{x:e}")
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct Report {
    rows: Vec<Row>,
}

impl Report {
    /// Adds a row that passes when `value ≤ tolerance` (NaN fails).
    pub fn check(&mut self, metric: &str, value: f64, tolerance: f64) {
        let pass = value <= tolerance;
        self.rows.push(Row { metric: metric.into(), value, tolerance: Some(tolerance), pass });
    }

    /// Adds a row with an explicit verdict and no numeric tolerance.
    pub fn verdict(&mut self, metric: &str, value: f64, pass: bool) {
        self.rows.push(Row { metric: metric.into(), value, tolerance: None, pass });
    }

    pub fn info(&mut self, metric: &str, value: f64) {
        self.verdict(metric, value, true);
    }

    pub fn passed(&self) -> bool {
        self.rows.iter().all(|r| r.pass)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Row> {
        self.rows.iter().filter(|r| !r.pass)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("metric,value,tolerance,pass\n");
        for r in &self.rows {
            out.push_str(&format!("{},{},{},{}\n", r.metric, number(r.value), r.tolerance_text(), r.pass));
        }
        out
    }

    /// Writes the CSV to `path`, or to stdout without one.
    pub fn emit(&self, path: Option<&Path>) -> Result<(), CliError> {
        match path {
            Some(p) => fs::write(p, self.to_csv()).map_err(|source| CliError::Io { path: p.display().to_string(), source }),
            None => {
                print!("{}", self.to_csv());
                Ok(())
            }
        }
    }
}
