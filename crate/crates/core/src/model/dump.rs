//! Plain-text matrix dumps.
//!
//! ```text
//! kind = DO3
//! n = 1
//! g = 1
//! beta = 2
//! epsilon = 0.5
//! t = 1
//! tau = 1
//! dim = 3
//! basis = 0 1 2
//! 2 0 1 0 1 0
//! ...
//! ```
//!
//! Each matrix row is written as `re im` pairs. Floats use the shortest
//! representation that round-trips.

use super::{BasisLabel, HamiltonianSpec, ModelKind};
use crate::error::{MlzError, Result};
use crate::params::ModelParams;
use nalgebra::DMatrix;
use num_complex::Complex64;
use std::fmt::Write;

/// A materialized matrix with enough header to rebuild it.
#[derive(Debug, Clone, PartialEq)]
pub struct MatrixDump {
    pub kind: ModelKind,
    pub params: ModelParams,
    pub t: f64,
    pub tau: f64,
    pub basis: Vec<BasisLabel>,
    pub matrix: DMatrix<Complex64>,
}

impl MatrixDump {
    pub fn from_spec(spec: &HamiltonianSpec, t: f64, tau: f64) -> Result<Self> {
        let m = spec.materialize(t, tau)?;
        Ok(Self {
            kind: spec.kind,
            params: spec.params,
            t,
            tau,
            basis: spec.basis.clone(),
            matrix: m.map(|x| Complex64::new(x, 0.0)),
        })
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn to_text(&self) -> String {
        let p = &self.params;
        let mut s = String::new();
        let _ = writeln!(s, "kind = {}", self.kind);
        let _ = writeln!(s, "n = {}", p.n);
        let _ = writeln!(s, "g = {}", p.g);
        let _ = writeln!(s, "beta = {}", p.beta);
        let _ = writeln!(s, "epsilon = {}", p.epsilon);
        let _ = writeln!(s, "t = {}", self.t);
        let _ = writeln!(s, "tau = {}", self.tau);
        let _ = writeln!(s, "dim = {}", self.dim());
        let labels: Vec<String> = self.basis.iter().map(|b| b.to_string()).collect();
        let _ = writeln!(s, "basis = {}", labels.join(" "));
        for i in 0..self.matrix.nrows() {
            let row: Vec<String> = (0..self.matrix.ncols())
                .map(|j| {
                    let z = self.matrix[(i, j)];
                    format!("{} {}", z.re, z.im)
                })
                .collect();
            let _ = writeln!(s, "{}", row.join(" "));
        }
        s
    }
}

/// Parses the output of [`MatrixDump::to_text`].
pub fn parse_dump(text: &str) -> Result<MatrixDump> {
    let bad = |msg: String| MlzError::Domain(format!("matrix dump: {msg}"));
    let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty() && !l.starts_with('#'));
    let mut header = |key: &str| -> Result<String> {
        let line = lines.next().ok_or_else(|| bad(format!("missing {key}")))?;
        let (k, v) = line.split_once('=').ok_or_else(|| bad(format!("expected {key} = ...")))?;
        if k.trim() != key {
            return Err(bad(format!("expected {key}, found {}", k.trim())));
        }
        Ok(v.trim().to_string())
    };
    let num = |key: &str, v: String| v.parse::<f64>().map_err(|_| bad(format!("bad {key}: {v}")));
    let kind: ModelKind = header("kind")?.parse()?;
    let n = header("n")?.parse::<usize>().map_err(|e| bad(e.to_string()))?;
    let g = num("g", header("g")?)?;
    let beta = num("beta", header("beta")?)?;
    let epsilon = num("epsilon", header("epsilon")?)?;
    let t = num("t", header("t")?)?;
    let tau = num("tau", header("tau")?)?;
    let dim = header("dim")?.parse::<usize>().map_err(|e| bad(e.to_string()))?;
    let basis = header("basis")?
        .split_whitespace()
        .map(str::parse)
        .collect::<Result<Vec<BasisLabel>>>()?;
    if basis.len() != dim {
        return Err(bad(format!("{} basis labels for dim {dim}", basis.len())));
    }
    let mut matrix = DMatrix::zeros(dim, dim);
    for i in 0..dim {
        let line = lines.next().ok_or_else(|| bad(format!("missing row {i}")))?;
        let vals = line
            .split_whitespace()
            .map(|v| v.parse::<f64>().map_err(|_| bad(format!("bad entry {v}"))))
            .collect::<Result<Vec<f64>>>()?;
        if vals.len() != 2 * dim {
            return Err(bad(format!("row {i} has {} numbers, expected {}", vals.len(), 2 * dim)));
        }
        for j in 0..dim {
            matrix[(i, j)] = Complex64::new(vals[2 * j], vals[2 * j + 1]);
        }
    }
    if lines.next().is_some() {
        return Err(bad("trailing data".into()));
    }
    let params = ModelParams::new(n, g, beta, epsilon)?;
    Ok(MatrixDump { kind, params, t, tau, basis, matrix })
}
