//! Small-occupation normal form near the first critical point.
//!
//! With angles measured from the stationary value `π`, the canonical map
//! `n = X²`, `φ − π = −P/(2X)` turns the classical Hamiltonian into
//! `P²/2m + V(X)`, `V = −βt'|X|² + (γ/4)|X|⁴ + ε(X₂² − X₁²)`, where
//! `t' = t + 2g√N/β` is the time measured from the critical point.

use super::classical::ClassicalState;
use crate::dynamics::ode::{integrate, OdeSystem, StepControl};
use crate::error::{MlzError, Result};
use crate::params::ModelParams;
use std::f64::consts::PI;

/// Phase-space point of the normal form.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuarticState {
    pub x: [f64; 2],
    pub p: [f64; 2],
    /// Shifted time `t'`.
    pub time: f64,
}

impl QuarticState {
    /// `X₁P₂ − X₂P₁`, conserved at `ε = 0`.
    pub fn angular_momentum(&self) -> f64 {
        self.x[0] * self.p[1] - self.x[1] * self.p[0]
    }
}

/// Potential, mass and stiffness of the quartic normal form.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuarticNormalForm {
    pub beta: f64,
    pub epsilon: f64,
    /// `m = 2/(g√N)`.
    pub mass: f64,
    /// `γ = 4g/√N`.
    pub gamma: f64,
    /// `2g√N/β`: original time is `t' − time_shift`.
    pub time_shift: f64,
}

pub fn quartic_normal_form(p: &ModelParams) -> Result<QuarticNormalForm> {
    if p.n == 0 || p.g <= 0.0 {
        return Err(MlzError::Domain("normal form needs N > 0 and g > 0".into()));
    }
    let rn = (p.n as f64).sqrt();
    Ok(QuarticNormalForm {
        beta: p.beta,
        epsilon: p.epsilon,
        mass: 2.0 / (p.g * rn),
        gamma: 4.0 * p.g / rn,
        time_shift: 2.0 * p.g * rn / p.beta,
    })
}

impl QuarticNormalForm {
    /// `V(X, t')`.
    pub fn potential(&self, x: [f64; 2], t: f64) -> f64 {
        let r2 = x[0] * x[0] + x[1] * x[1];
        -self.beta * t * r2 + 0.25 * self.gamma * r2 * r2 + self.epsilon * (x[1] * x[1] - x[0] * x[0])
    }

    /// `∇V(X, t')`.
    pub fn gradient(&self, x: [f64; 2], t: f64) -> [f64; 2] {
        let r2 = x[0] * x[0] + x[1] * x[1];
        let radial = -2.0 * self.beta * t + self.gamma * r2;
        [(radial - 2.0 * self.epsilon) * x[0], (radial + 2.0 * self.epsilon) * x[1]]
    }

    pub fn energy(&self, s: &QuarticState) -> f64 {
        (s.p[0] * s.p[0] + s.p[1] * s.p[1]) / (2.0 * self.mass) + self.potential(s.x, s.time)
    }

    /// `|X_min|²` at `ε = 0`: zero for `t' ≤ 0`, `2βt'/γ` after.
    pub fn minimum_radius_squared(&self, t: f64) -> f64 {
        if t <= 0.0 {
            0.0
        } else {
            2.0 * self.beta * t / self.gamma
        }
    }

    /// Hamilton's equations from `s0.time` to `t1`.
    pub fn integrate(&self, s0: &QuarticState, t1: f64, control: &StepControl) -> Result<QuarticState> {
        struct Flow<'a>(&'a QuarticNormalForm);
        impl OdeSystem<f64> for Flow<'_> {
            fn rhs(&mut self, t: f64, y: &[f64], dy: &mut [f64]) {
                let g = self.0.gradient([y[0], y[1]], t);
                dy[0] = y[2] / self.0.mass;
                dy[1] = y[3] / self.0.mass;
                dy[2] = -g[0];
                dy[3] = -g[1];
            }
        }
        let mut y = [s0.x[0], s0.x[1], s0.p[0], s0.p[1]];
        integrate(&mut Flow(self), s0.time, t1, &mut y, control, |_, _| {})?;
        Ok(QuarticState { x: [y[0], y[1]], p: [y[2], y[3]], time: t1 })
    }

    /// Original-time state for normal-form coordinates.
    pub fn to_classical(&self, s: &QuarticState) -> ClassicalState {
        let (n1, phi1) = canonical_to_actions(s.x[0], s.p[0]);
        let (n2, phi2) = canonical_to_actions(s.x[1], s.p[1]);
        ClassicalState::new(n1, n2, phi1, phi2, s.time - self.time_shift)
    }

    /// Normal-form coordinates of a classical state (`X > 0` branch).
    pub fn from_classical(&self, s: &ClassicalState) -> Result<QuarticState> {
        let (x1, p1) = canonical_from_actions(s.n1, s.phi1)?;
        let (x2, p2) = canonical_from_actions(s.n2, s.phi2)?;
        Ok(QuarticState { x: [x1, x2], p: [p1, p2], time: s.time + self.time_shift })
    }
}

/// `(X, P) ↦ (n, φ) = (X², π − P/(2X))`.
pub fn canonical_to_actions(x: f64, p: f64) -> (f64, f64) {
    (x * x, PI - p / (2.0 * x))
}

/// `(n, φ) ↦ (X, P) = (√n, −2√n(φ − π))`; needs `n > 0`.
pub fn canonical_from_actions(n: f64, phi: f64) -> Result<(f64, f64)> {
    if !(n > 0.0) {
        return Err(MlzError::Domain(format!("canonical map needs n > 0, got {n}")));
    }
    let x = n.sqrt();
    Ok((x, -2.0 * x * (phi - PI)))
}
