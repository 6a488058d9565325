//! Checks, tables and the run summary.

use serde::Serialize;
use std::fmt::Write as _;

/// One embedded assertion.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub tolerance: String,
    pub observed: f64,
    pub pass: bool,
}

impl Check {
    pub fn at_most(name: impl Into<String>, observed: f64, tol: f64) -> Self {
        Self { name: name.into(), tolerance: format!("<= {tol:e}"), observed, pass: observed <= tol }
    }

    pub fn in_range(name: impl Into<String>, observed: f64, lo: f64, hi: f64) -> Self {
        Self {
            name: name.into(),
            tolerance: format!("in [{lo}, {hi}]"),
            observed,
            pass: (lo..=hi).contains(&observed),
        }
    }

    pub fn holds(name: impl Into<String>, ok: bool) -> Self {
        Self { name: name.into(), tolerance: "true".into(), observed: if ok { 1.0 } else { 0.0 }, pass: ok }
    }
}

/// Normalization of an emitted probability column. Closed forms are held
/// to `1e-8`, simulations to `1e-6`.
pub fn normalization(name: impl Into<String>, total: f64, analytic: bool) -> Check {
    let tol = if analytic { 1e-8 } else { 1e-6 };
    Check::at_most(format!("{} sums to one", name.into()), (total - 1.0).abs(), tol)
}

/// Column-labelled table written as one CSV.
#[derive(Debug, Clone, PartialEq)]
pub struct Panel {
    pub name: String,
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Panel {
    pub fn new(name: impl Into<String>, header: &[&str]) -> Self {
        Self { name: name.into(), header: header.iter().map(|s| s.to_string()).collect(), rows: Vec::new() }
    }

    /// Appends a row; numbers use the shortest round-trip representation.
    pub fn push<I, T>(&mut self, row: I)
    where
        I: IntoIterator<Item = T>,
        T: Cell,
    {
        let row: Vec<String> = row.into_iter().map(|c| c.cell()).collect();
        assert_eq!(row.len(), self.header.len(), "row width differs from header in {}", self.name);
        self.rows.push(row);
    }
}

/// Value that can be written into a CSV cell.
pub trait Cell {
    fn cell(&self) -> String;
}

impl Cell for f64 {
    fn cell(&self) -> String {
        format!("{self}")
    }
}

impl Cell for String {
    fn cell(&self) -> String {
        self.clone()
    }
}

impl Cell for &str {
    fn cell(&self) -> String {
        (*self).to_string()
    }
}

/// Outcome of one experiment.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Report {
    pub panels: Vec<Panel>,
    pub checks: Vec<Check>,
    /// Extra scalar results for the sidecar.
    pub summary: Vec<(String, f64)>,
}

impl Report {
    pub fn pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.pass)
    }

    pub fn note(&mut self, key: impl Into<String>, value: f64) {
        self.summary.push((key.into(), value));
    }
}

/// Fixed-width table of checks.
pub fn check_table(rows: &[(String, &Check)]) -> String {
    let head = ("check", "tolerance", "observed", "result");
    let w0 = rows.iter().map(|(n, _)| n.len()).chain([head.0.len()]).max().unwrap_or(0);
    let w1 = rows.iter().map(|(_, c)| c.tolerance.len()).chain([head.1.len()]).max().unwrap_or(0);
    let mut s = String::new();
    let _ = writeln!(s, "{:<w0$}  {:<w1$}  {:>12}  {}", head.0, head.1, head.2, head.3);
    for (name, c) in rows {
        let _ = writeln!(
            s,
            "{name:<w0$}  {:<w1$}  {:>12.3e}  {}",
            c.tolerance,
            c.observed,
            if c.pass { "pass" } else { "FAIL" }
        );
    }
    s
}
