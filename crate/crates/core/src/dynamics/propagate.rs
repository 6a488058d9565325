use super::config::IntegrationConfig;
use super::frame::Frame;
use super::generator::SegmentSystem;
use super::ode::{integrate, OdeStats};
use super::state::StateVector;
use crate::distribution::{Distribution, Label, Provenance};
use crate::error::{MlzError, Result};
use crate::model::{BasisLabel, HamiltonianSpec};
use nalgebra::DVector;
use num_complex::Complex64;

/// Result of one propagation with integrator diagnostics.
#[derive(Debug, Clone, PartialEq)]
pub struct Propagation {
    pub state: StateVector,
    pub stats: OdeStats,
    /// Largest `|‖ψ‖ − 1|` seen at accepted steps.
    pub max_norm_drift: f64,
}

/// Callback receiving `(t, τ, ψ)` in the lab frame after each accepted step.
pub type Observer<'a> = &'a mut dyn FnMut(f64, f64, &DVector<Complex64>);

fn check_segment(spec: &HamiltonianSpec, a: (f64, f64), b: (f64, f64)) -> Result<()> {
    spec.check_point(a.0, a.1)?;
    spec.check_point(b.0, b.1)?;
    if spec.singular_in_t() && a.0.signum() != b.0.signum() {
        return Err(MlzError::Singularity(format!("segment crosses t = 0 for {}", spec.kind)));
    }
    if spec.singular_in_tau() && a.1.signum() != b.1.signum() {
        return Err(MlzError::Singularity(format!("segment crosses tau = 0 for {}", spec.kind)));
    }
    Ok(())
}

/// Straight segment from `start` with `rates` over `s ∈ [0, length]`.
pub(crate) fn evolve_segment(
    sources: &[(&HamiltonianSpec, f64)],
    start: (f64, f64),
    rates: (f64, f64),
    length: f64,
    psi0: &DVector<Complex64>,
    cfg: &IntegrationConfig,
    mut observer: Option<Observer<'_>>,
) -> Result<(DVector<Complex64>, OdeStats, f64)> {
    let end = (start.0 + length * rates.0, start.1 + length * rates.1);
    for &(spec, _) in sources {
        check_segment(spec, start, end)?;
    }
    let norm0 = psi0.norm();
    let mut sys = SegmentSystem::new(sources, start, rates, cfg.gauge, cfg.step_fraction);
    let mut y: Vec<Complex64> = psi0.iter().copied().collect();
    let budget = cfg.norm_budget();
    let mut drift: f64 = 0.0;
    let mut lab_sys = observer
        .as_ref()
        .map(|_| SegmentSystem::new(sources, start, rates, cfg.gauge, cfg.step_fraction));
    let stats = integrate(&mut sys, 0.0, length, &mut y, &cfg.step_control(), |s, y| {
        let n: f64 = y.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        drift = drift.max((n - norm0).abs());
        if let (Some(obs), Some(ls)) = (observer.as_mut(), lab_sys.as_mut()) {
            let psi = ls.to_lab(s, y);
            obs(start.0 + s * rates.0, start.1 + s * rates.1, &psi);
        }
    })?;
    if cfg.fixed_step.is_none() && drift > 10.0 * budget {
        return Err(MlzError::NormDrift { drift, budget });
    }
    Ok((sys.to_lab(length, &y), stats, drift))
}

/// Solves `i dψ/dt = H(t, τ)ψ` from `t0` to `t1` at the state's fixed `τ`.
pub fn propagate(
    spec: &HamiltonianSpec,
    psi0: &StateVector,
    t0: f64,
    t1: f64,
    cfg: &IntegrationConfig,
) -> Result<Propagation> {
    propagate_observed(spec, psi0, t0, t1, cfg, None)
}

pub fn propagate_observed(
    spec: &HamiltonianSpec,
    psi0: &StateVector,
    t0: f64,
    t1: f64,
    cfg: &IntegrationConfig,
    observer: Option<Observer<'_>>,
) -> Result<Propagation> {
    if psi0.dim() != spec.dim {
        return Err(MlzError::Domain(format!("state dim {} vs model dim {}", psi0.dim(), spec.dim)));
    }
    let n = psi0.norm();
    if (n - 1.0).abs() > 1e-8 {
        return Err(MlzError::Domain(format!("initial state not normalized: |psi| = {n}")));
    }
    let tau = psi0.tau;
    let (psi, stats, drift) =
        evolve_segment(&[(spec, 1.0)], (t0, tau), (1.0, 0.0), t1 - t0, &psi0.amplitudes, cfg, observer)?;
    Ok(Propagation {
        state: StateVector::new(psi, spec.basis.clone(), t1, tau)?,
        stats,
        max_norm_drift: drift,
    })
}

/// Distribution label for a basis label.
pub fn distribution_label(b: BasisLabel) -> Label {
    match b {
        BasisLabel::Level(k) | BasisLabel::Split(k) | BasisLabel::ModeTwo(k) => Label::Index(k as i64),
        BasisLabel::Pair { n1, n2 } => Label::Pair(n1, n2),
    }
}

/// Initial label of a linear sweep: lowest diagonal entry as `t → −∞`.
pub(crate) fn initial_label(spec: &HamiltonianSpec, window: f64) -> Result<usize> {
    let h = spec.materialize(-window, 1.0)?;
    Ok((0..spec.dim).min_by(|&a, &b| h[(a, a)].total_cmp(&h[(b, b)])).unwrap_or(0))
}

/// Ground state of the `1/t` part, i.e. the limit `t → 0⁺` of the instantaneous
/// ground state.
pub(crate) fn inverse_time_ground_state(spec: &HamiltonianSpec) -> Result<DVector<Complex64>> {
    let m = spec
        .terms
        .iter()
        .filter(|t| t.coefficient == crate::model::Coefficient::InvT)
        .fold(nalgebra::DMatrix::zeros(spec.dim, spec.dim), |acc, t| acc + &t.matrix);
    let eig = m.symmetric_eigen();
    let k = eig.eigenvalues.imin();
    let v = eig.eigenvectors.column(k);
    let sign = if v.sum() < 0.0 { -1.0 } else { 1.0 };
    Ok(v.map(|x| Complex64::new(sign * x, 0.0)))
}

/// Final readout amplitudes of a full sweep from the physical initial state.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    pub amplitudes: DVector<Complex64>,
    pub start: f64,
    pub end: f64,
    pub initial_label: Option<usize>,
    pub stats: OdeStats,
    pub max_norm_drift: f64,
}

/// Runs the physical sweep for `spec`: `(−T, T)` from the ground diabatic
/// state for linear models, `(t₀, T)` from the `t → 0⁺` ground state for `1/t`
/// models. Amplitudes are read in the configured frame at the end.
pub fn sweep(spec: &HamiltonianSpec, cfg: &IntegrationConfig) -> Result<SweepResult> {
    cfg.validate(spec)?;
    let t_end = cfg.window;
    let (t_start, psi0, label) = if spec.singular_in_t() {
        let t0 = cfg.start_time(spec);
        if !(t0 > 0.0 && t0 < t_end) {
            return Err(MlzError::Domain(format!("start time {t0} outside (0, {t_end})")));
        }
        (t0, inverse_time_ground_state(spec)?, None)
    } else {
        let m = initial_label(spec, cfg.window)?;
        let frame = Frame::for_readout(spec, -cfg.window, 1.0, cfg.readout)?;
        (-cfg.window, frame.state(m), Some(m))
    };
    let (psi, stats, drift) =
        evolve_segment(&[(spec, 1.0)], (t_start, 1.0), (1.0, 0.0), t_end - t_start, &psi0, cfg, None)?;
    let out = Frame::for_readout(spec, t_end, 1.0, cfg.readout)?;
    Ok(SweepResult {
        amplitudes: out.amplitudes(&psi),
        start: t_start,
        end: t_end,
        initial_label: label,
        stats,
        max_norm_drift: drift,
    })
}

/// Final occupation probabilities of the physical sweep.
pub fn transition_probabilities(spec: &HamiltonianSpec, cfg: &IntegrationConfig) -> Result<Distribution> {
    let r = sweep(spec, cfg)?;
    let labels = spec.basis.iter().map(|&b| distribution_label(b)).collect();
    let probs = r.amplitudes.iter().map(|z| z.norm_sqr()).collect();
    Ok(Distribution::new(labels, probs, Provenance::Numeric, Some(spec.params)))
}

/// A `1/t` run together with its sensitivity to the start time.
#[derive(Debug, Clone, PartialEq)]
pub struct ThermalizationRun {
    pub distribution: Distribution,
    pub t_start: f64,
    /// Largest probability change when the run starts at `10·t₀` instead.
    pub t_start_sensitivity: f64,
}

/// Transition probabilities of a `1/t` model plus the `t₀` sensitivity check.
pub fn thermalization_run(spec: &HamiltonianSpec, cfg: &IntegrationConfig) -> Result<ThermalizationRun> {
    if !spec.singular_in_t() {
        return Err(MlzError::Domain(format!("{} has no 1/t term", spec.kind)));
    }
    let t0 = cfg.start_time(spec);
    let base = transition_probabilities(spec, &IntegrationConfig { t_start: Some(t0), ..*cfg })?;
    let shifted = transition_probabilities(spec, &IntegrationConfig { t_start: Some(10.0 * t0), ..*cfg })?;
    let sens = base.max_abs_diff(&shifted);
    Ok(ThermalizationRun { distribution: base, t_start: t0, t_start_sensitivity: sens })
}
