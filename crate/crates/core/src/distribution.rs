//! Discrete probability tables and regime-flagged values.

use crate::numeric::kahan_sum;
use crate::params::ModelParams;
use std::fmt;

/// Basis label of one table entry.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Label {
    Index(i64),
    Pair(usize, usize),
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Label::Index(i) => write!(f, "{i}"),
            Label::Pair(a, b) => write!(f, "({a},{b})"),
        }
    }
}

/// Whether a table came from a closed form or from a simulation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Provenance {
    Analytic,
    Numeric,
}

impl fmt::Display for Provenance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Provenance::Analytic => f.write_str("analytic"),
            Provenance::Numeric => f.write_str("numeric"),
        }
    }
}

/// Labelled probability table.
#[derive(Debug, Clone, PartialEq)]
pub struct Distribution {
    pub labels: Vec<Label>,
    pub probs: Vec<f64>,
    pub provenance: Provenance,
    pub params: Option<ModelParams>,
}

impl Distribution {
    pub fn new(
        labels: Vec<Label>,
        probs: Vec<f64>,
        provenance: Provenance,
        params: Option<ModelParams>,
    ) -> Self {
        assert_eq!(labels.len(), probs.len(), "labels and probabilities differ in length");
        Self { labels, probs, provenance, params }
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    pub fn total(&self) -> f64 {
        kahan_sum(self.probs.iter().copied())
    }

    pub fn get(&self, label: Label) -> Option<f64> {
        self.labels.iter().position(|&l| l == label).map(|i| self.probs[i])
    }

    /// `Σ f(label) P(label)`.
    pub fn expectation(&self, f: impl Fn(Label) -> f64) -> f64 {
        kahan_sum(self.labels.iter().zip(&self.probs).map(|(&l, &p)| f(l) * p))
    }

    /// Mean of an integer label; pairs contribute their sum.
    pub fn mean(&self) -> f64 {
        self.expectation(|l| match l {
            Label::Index(i) => i as f64,
            Label::Pair(a, b) => (a + b) as f64,
        })
    }

    /// Largest absolute entrywise difference; tables must share labels.
    pub fn max_abs_diff(&self, other: &Distribution) -> f64 {
        assert_eq!(self.labels, other.labels, "tables have different supports");
        self.probs
            .iter()
            .zip(&other.probs)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    /// Total-variation distance `½ Σ |p − q|`; tables must share labels.
    pub fn total_variation(&self, other: &Distribution) -> f64 {
        assert_eq!(self.labels, other.labels, "tables have different supports");
        0.5 * kahan_sum(self.probs.iter().zip(&other.probs).map(|(a, b)| (a - b).abs()))
    }

    /// Index of the largest probability; ties go to the earlier entry.
    pub fn argmax(&self) -> usize {
        let mut best = 0;
        for (i, &p) in self.probs.iter().enumerate() {
            if p > self.probs[best] {
                best = i;
            }
        }
        best
    }
}

/// A value computed from an asymptotic formula together with whether the
/// parameters sit inside that formula's validity window.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Flagged<T> {
    pub value: T,
    pub valid: bool,
}

impl<T> Flagged<T> {
    pub fn new(value: T, valid: bool) -> Self {
        Self { value, valid }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn table(p: &[f64]) -> Distribution {
        let labels = (0..p.len() as i64).map(Label::Index).collect();
        Distribution::new(labels, p.to_vec(), Provenance::Analytic, None)
    }

    #[test]
    fn mean_and_tv() {
        let a = table(&[0.25, 0.5, 0.25]);
        let b = table(&[0.5, 0.5, 0.0]);
        assert!((a.mean() - 1.0).abs() < 1e-15);
        assert!((a.total_variation(&b) - 0.25).abs() < 1e-15);
        assert!((a.max_abs_diff(&b) - 0.25).abs() < 1e-15);
    }

    #[test]
    fn argmax_prefers_first_on_ties() {
        assert_eq!(table(&[0.4, 0.4, 0.2]).argmax(), 0);
    }
}
