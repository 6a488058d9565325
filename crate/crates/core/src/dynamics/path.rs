//! Evolution along piecewise-linear paths of the `(t, τ)` plane.

use super::config::IntegrationConfig;
use super::propagate::evolve_segment;
use super::state::StateVector;
use crate::error::{MlzError, Result};
use crate::integrability::pair_residuals;
use crate::model::HamiltonianSpec;
use crate::tolerance::CONSISTENCY_REL_TOL;

/// Vertices `(t, τ)` visited in order; every vertex has `τ > 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct TimePath {
    pub vertices: Vec<(f64, f64)>,
}

impl TimePath {
    pub fn new(vertices: Vec<(f64, f64)>) -> Result<Self> {
        if vertices.len() < 2 {
            return Err(MlzError::Domain("a path needs at least two vertices".into()));
        }
        if let Some(&(t, tau)) = vertices.iter().find(|&&(t, tau)| !(tau > 0.0) || !t.is_finite()) {
            return Err(MlzError::Domain(format!("path vertex ({t}, {tau}) needs finite t and tau > 0")));
        }
        Ok(Self { vertices })
    }

    pub fn straight(from: (f64, f64), to: (f64, f64)) -> Result<Self> {
        Self::new(vec![from, to])
    }

    /// `from → (from.t, τ₀) → (to.t, τ₀) → to`: the sweep in `t` happens at `τ = τ₀`.
    pub fn detour(from: (f64, f64), to: (f64, f64), tau0: f64) -> Result<Self> {
        Self::new(vec![from, (from.0, tau0), (to.0, tau0), to])
    }

    /// `from → (to.t, from.τ) → to`.
    pub fn t_then_tau(from: (f64, f64), to: (f64, f64)) -> Result<Self> {
        Self::new(vec![from, (to.0, from.1), to])
    }

    /// `from → (from.t, to.τ) → to`.
    pub fn tau_then_t(from: (f64, f64), to: (f64, f64)) -> Result<Self> {
        Self::new(vec![from, (from.0, to.1), to])
    }

    pub fn start(&self) -> (f64, f64) {
        self.vertices[0]
    }

    pub fn end(&self) -> (f64, f64) {
        *self.vertices.last().expect("non-empty path")
    }

    pub fn reversed(&self) -> Self {
        let mut v = self.vertices.clone();
        v.reverse();
        Self { vertices: v }
    }

    /// Vertices and segment midpoints.
    pub fn sample_points(&self) -> Vec<(f64, f64)> {
        let mut out = vec![self.vertices[0]];
        for w in self.vertices.windows(2) {
            out.push((0.5 * (w[0].0 + w[1].0), 0.5 * (w[0].1 + w[1].1)));
            out.push(w[1]);
        }
        out
    }
}

/// Integrates `dψ = −i(H dt + H′ dτ)ψ` along `path`, one straight segment at a time.
pub fn two_time_evolve(
    h: &HamiltonianSpec,
    h_partner: &HamiltonianSpec,
    path: &TimePath,
    psi0: &StateVector,
    cfg: &IntegrationConfig,
) -> Result<StateVector> {
    if h.dim != h_partner.dim || psi0.dim() != h.dim {
        return Err(MlzError::Domain("dimension mismatch between pair and state".into()));
    }
    for (t, tau) in path.sample_points() {
        let r = pair_residuals(h, h_partner, t, tau)?;
        if r.commutator > CONSISTENCY_REL_TOL || r.mixed_derivative > CONSISTENCY_REL_TOL {
            return Err(MlzError::Consistency(format!(
                "at (t, tau) = ({t}, {tau}): commutator {:e}, mixed derivative {:e}",
                r.commutator, r.mixed_derivative
            )));
        }
    }
    let mut psi = psi0.amplitudes.clone();
    for w in path.vertices.windows(2) {
        let (a, b) = (w[0], w[1]);
        let rates = (b.0 - a.0, b.1 - a.1);
        if rates == (0.0, 0.0) {
            continue;
        }
        psi = evolve_segment(&[(h, rates.0), (h_partner, rates.1)], a, rates, 1.0, &psi, cfg, None)?.0;
    }
    let (t, tau) = path.end();
    StateVector::new(psi, h.basis.clone(), t, tau)
}
