//! Model parameters shared by the closed forms, builders and simulations.

use crate::error::{domain, Result};
use std::f64::consts::PI;

/// `(N, g, β, ε)` for one experiment point.
///
/// `n` is the initial molecule number (or the pair-sector size for the
/// effective thermalization model).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelParams {
    pub n: usize,
    pub g: f64,
    pub beta: f64,
    pub epsilon: f64,
}

impl ModelParams {
    /// Validated constructor. `g = 0` is allowed and selects the `x = 1` limits.
    pub fn new(n: usize, g: f64, beta: f64, epsilon: f64) -> Result<Self> {
        let p = Self { n, g, beta, epsilon };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.g.is_finite() && self.g >= 0.0) {
            return domain(format!("g must be finite and >= 0, got {}", self.g));
        }
        if !(self.beta.is_finite() && self.beta > 0.0) {
            return domain(format!("beta must be finite and > 0, got {}", self.beta));
        }
        if !(self.epsilon.is_finite() && self.epsilon >= 0.0) {
            return domain(format!("epsilon must be finite and >= 0, got {}", self.epsilon));
        }
        Ok(())
    }

    pub fn with_n(self, n: usize) -> Self {
        Self { n, ..self }
    }

    pub fn with_beta(self, beta: f64) -> Self {
        Self { beta, ..self }
    }

    pub fn with_epsilon(self, epsilon: f64) -> Self {
        Self { epsilon, ..self }
    }

    /// `ln x = −2πg²/β`.
    pub fn ln_x(&self) -> f64 {
        -2.0 * PI * self.g * self.g / self.beta
    }

    /// `x = e^{−2πg²/β}`, the single-molecule Landau-Zener survival probability.
    pub fn x(&self) -> f64 {
        self.ln_x().exp()
    }

    /// `Γ = β/(2πg²)`, infinite at `g = 0`.
    pub fn gamma_ratio(&self) -> f64 {
        self.beta / (2.0 * PI * self.g * self.g)
    }

    /// `q = 2πg²N/(β ln N)`, the figure axis for the single-channel distribution.
    pub fn q(&self) -> f64 {
        let nf = self.n as f64;
        2.0 * PI * self.g * self.g * nf / (self.beta * nf.ln())
    }

    /// Sweep rate that realises a given `q` at fixed `(N, g)`.
    pub fn beta_for_q(n: usize, g: f64, q: f64) -> f64 {
        let nf = n as f64;
        2.0 * PI * g * g * nf / (q * nf.ln())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn x_and_gamma_are_consistent() {
        let p = ModelParams::new(10, 1.0, 4.0 * PI, 0.0).unwrap();
        assert!((p.x() - (-0.5f64).exp()).abs() < 1e-15);
        assert!((p.gamma_ratio() - 2.0).abs() < 1e-15);
        assert!((p.ln_x() * p.gamma_ratio() + 1.0).abs() < 1e-15);
    }

    #[test]
    fn rejects_bad_values() {
        assert!(ModelParams::new(1, -1.0, 1.0, 0.0).is_err());
        assert!(ModelParams::new(1, 1.0, 0.0, 0.0).is_err());
        assert!(ModelParams::new(1, 1.0, 1.0, f64::NAN).is_err());
    }

    #[test]
    fn q_round_trip() {
        let b = ModelParams::beta_for_q(1000, 1.0, 0.8);
        let p = ModelParams::new(1000, 1.0, b, 0.0).unwrap();
        assert!((p.q() - 0.8).abs() < 1e-12);
    }
}
