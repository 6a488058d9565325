//! Numeric certificates that a `(t, τ)` Hamiltonian pair is integrable.
//!
//! Two conditions make two-time evolution path independent:
//! `∂H/∂τ = ∂H′/∂t` and `[H, H′] = 0`. Both are evaluated from the analytic
//! term structure of the builders. Path invariance is then checked by direct
//! evolution along deformed paths.

use crate::dynamics::{two_time_evolve, Frame, IntegrationConfig, StateVector, TimePath};
use crate::error::{MlzError, Result};
use crate::model::HamiltonianSpec;
use crate::tolerance::CONSISTENCY_REL_TOL;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::fmt;

/// Relative residuals of the two consistency conditions at one point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PairResiduals {
    /// `‖[H, H′]‖ / (‖H‖‖H′‖)`, Frobenius norms.
    pub commutator: f64,
    /// `‖∂H′/∂t − ∂H/∂τ‖ / (‖∂H′/∂t‖ + ‖∂H/∂τ‖)`, zero when both vanish.
    pub mixed_derivative: f64,
}

pub fn pair_residuals(h: &HamiltonianSpec, hp: &HamiltonianSpec, t: f64, tau: f64) -> Result<PairResiduals> {
    if h.dim != hp.dim {
        return Err(MlzError::Domain(format!("pair dimensions differ: {} vs {}", h.dim, hp.dim)));
    }
    let a = h.materialize(t, tau)?;
    let b = hp.materialize(t, tau)?;
    let scale = a.norm() * b.norm();
    let comm = (&a * &b - &b * &a).norm();
    let commutator = if scale > 0.0 { comm / scale } else { comm };
    let dh = h.d_dtau(t, tau)?;
    let dhp = hp.d_dt(t, tau)?;
    let denom = dh.norm() + dhp.norm();
    let diff = (&dhp - &dh).norm();
    let mixed_derivative = if denom > 0.0 { diff / denom } else { 0.0 };
    Ok(PairResiduals { commutator, mixed_derivative })
}

/// Worst-case residuals over a grid of points.
#[derive(Debug, Clone, PartialEq)]
pub struct ConsistencyReport {
    pub max_commutator_norm: f64,
    pub max_mixed_derivative_norm: f64,
    pub sample_points: Vec<(f64, f64)>,
    pub threshold: f64,
    pub pass: bool,
}

impl fmt::Display for ConsistencyReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "max_commutator_norm: {:e}", self.max_commutator_norm)?;
        writeln!(f, "max_mixed_derivative_norm: {:e}", self.max_mixed_derivative_norm)?;
        writeln!(f, "sample_points: {}", self.sample_points.len())?;
        writeln!(f, "threshold: {:e}", self.threshold)?;
        writeln!(f, "pass: {}", self.pass)
    }
}

/// Evaluates both consistency conditions at every grid point.
pub fn check_consistency(
    h: &HamiltonianSpec,
    hp: &HamiltonianSpec,
    grid: &[(f64, f64)],
) -> Result<ConsistencyReport> {
    let mut comm: f64 = 0.0;
    let mut mixed: f64 = 0.0;
    for &(t, tau) in grid {
        h.check_pole_proximity(t, tau)?;
        hp.check_pole_proximity(t, tau)?;
        let r = pair_residuals(h, hp, t, tau)?;
        comm = comm.max(r.commutator);
        mixed = mixed.max(r.mixed_derivative);
    }
    Ok(ConsistencyReport {
        max_commutator_norm: comm,
        max_mixed_derivative_norm: mixed,
        sample_points: grid.to_vec(),
        threshold: CONSISTENCY_REL_TOL,
        pass: comm <= CONSISTENCY_REL_TOL && mixed <= CONSISTENCY_REL_TOL,
    })
}

/// Deterministic grid of `count` points with `t ∈ [−t_max, t_max]`, `τ ∈ [τ_min, τ_max]`,
/// drawn from a ChaCha8 stream seeded with `seed`.
pub fn sample_grid(count: usize, t_max: f64, tau_range: (f64, f64), seed: u64) -> Vec<(f64, f64)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| (rng.random_range(-t_max..=t_max), rng.random_range(tau_range.0..=tau_range.1)))
        .collect()
}

/// Final probabilities of each path and their worst pairwise discrepancy.
#[derive(Debug, Clone, PartialEq)]
pub struct PathInvarianceReport {
    pub probabilities: Vec<Vec<f64>>,
    pub max_discrepancy: f64,
    pub threshold: f64,
    pub pass: bool,
}

impl fmt::Display for PathInvarianceReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "paths: {}", self.probabilities.len())?;
        writeln!(f, "max_discrepancy: {:e}", self.max_discrepancy)?;
        writeln!(f, "threshold: {:e}", self.threshold)?;
        writeln!(f, "pass: {}", self.pass)
    }
}

/// Evolves the initial adiabatic state of `h` along every path and compares
/// the final adiabatic populations. All paths must share their endpoints.
///
/// `threshold` defaults to ten times the integrator relative tolerance.
pub fn path_invariance_suite(
    h: &HamiltonianSpec,
    hp: &HamiltonianSpec,
    paths: &[TimePath],
    cfg: &IntegrationConfig,
    threshold: Option<f64>,
) -> Result<PathInvarianceReport> {
    let Some(first) = paths.first() else {
        return Err(MlzError::Domain("no paths given".into()));
    };
    let (a, b) = (first.start(), first.end());
    if paths.iter().any(|p| p.start() != a || p.end() != b) {
        return Err(MlzError::Domain("paths must share endpoints".into()));
    }
    let m0 = {
        let d = h.materialize(a.0, a.1)?;
        (0..h.dim).min_by(|&i, &j| d[(i, i)].total_cmp(&d[(j, j)])).unwrap_or(0)
    };
    let f0 = Frame::for_readout(h, a.0, a.1, cfg.readout)?;
    let psi0 = StateVector::new(f0.state(m0), h.basis.clone(), a.0, a.1)?;
    let f1 = Frame::for_readout(h, b.0, b.1, cfg.readout)?;
    let mut probabilities = Vec::with_capacity(paths.len());
    for p in paths {
        let out = two_time_evolve(h, hp, p, &psi0, cfg)?;
        probabilities.push(f1.amplitudes(&out.amplitudes).iter().map(|z| z.norm_sqr()).collect::<Vec<f64>>());
    }
    let mut worst: f64 = 0.0;
    for i in 0..probabilities.len() {
        for j in (i + 1)..probabilities.len() {
            for (x, y) in probabilities[i].iter().zip(&probabilities[j]) {
                worst = worst.max((x - y).abs());
            }
        }
    }
    let threshold = threshold.unwrap_or(10.0 * cfg.rel_tol);
    Ok(PathInvarianceReport { probabilities, max_discrepancy: worst, threshold, pass: worst <= threshold })
}
