use super::ode::StepControl;
use crate::error::{MlzError, Result};
use crate::model::HamiltonianSpec;
use crate::tolerance::INVERSE_TIME_START_FRACTION;

/// Frame in which the amplitudes are stepped.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Gauge {
    /// Plain Schrödinger picture.
    Lab,
    /// Diagonal phases removed analytically; only couplings are stepped.
    Interaction,
}

/// How final amplitudes are read from the state at the window edge.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Readout {
    /// Raw basis components.
    Diabatic,
    /// Projection on instantaneous eigenvectors matched to basis labels.
    Adiabatic,
    /// Adiabatic vectors with the first-order velocity correction.
    Superadiabatic,
}

/// Window, tolerances and stepping policy for one propagation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegrationConfig {
    /// Half-window `T`: linear models run over `(−T, T)`, `1/t` models over `(t₀, T)`.
    pub window: f64,
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_step: f64,
    /// Step bound as a fraction of the fastest coupled-pair oscillation period `1/ω`.
    pub step_fraction: f64,
    pub gauge: Gauge,
    pub readout: Readout,
    /// Start time for `1/t` models; `None` picks the default fraction of the
    /// natural time scale.
    pub t_start: Option<f64>,
    /// Fixed step size (disables adaptivity); for convergence studies.
    pub fixed_step: Option<f64>,
    pub max_steps: usize,
}

impl Default for IntegrationConfig {
    fn default() -> Self {
        Self {
            window: 100.0,
            rel_tol: 1e-10,
            abs_tol: 1e-12,
            max_step: f64::INFINITY,
            step_fraction: 0.5,
            gauge: Gauge::Interaction,
            readout: Readout::Adiabatic,
            t_start: None,
            fixed_step: None,
            max_steps: 50_000_000,
        }
    }
}

/// Base window `max(50/√β, 40g/β, 30/ε)`.
pub fn default_window(g: f64, beta: f64, eps: f64) -> f64 {
    let mut t = (50.0 / beta.sqrt()).max(40.0 * g / beta);
    if eps > 0.0 {
        t = t.max(30.0 / eps);
    }
    t
}

/// Smallest coupled-pair diagonal gap over the largest coupling, at `(t, 1)`.
pub(crate) fn freedom_ratio(spec: &HamiltonianSpec, t: f64) -> Result<f64> {
    let h = spec.materialize(t, 1.0)?;
    let mut min_gap = f64::INFINITY;
    let mut max_coupling: f64 = 0.0;
    for i in 0..spec.dim {
        for j in (i + 1)..spec.dim {
            let v = h[(i, j)].abs();
            if v > 0.0 {
                max_coupling = max_coupling.max(v);
                min_gap = min_gap.min((h[(i, i)] - h[(j, j)]).abs());
            }
        }
    }
    Ok(if max_coupling == 0.0 { f64::INFINITY } else { min_gap / max_coupling })
}

const FREEDOM_RATIO: f64 = 10.0;

impl IntegrationConfig {
    /// Default configuration with the window chosen for `spec` and raised
    /// until the edges are asymptotically free.
    pub fn for_spec(spec: &HamiltonianSpec) -> Self {
        let p = &spec.params;
        let mut cfg = Self { window: default_window(p.g, p.beta, p.epsilon), ..Self::default() };
        for _ in 0..60 {
            if cfg.edges_free(spec).unwrap_or(false) {
                break;
            }
            cfg.window *= 1.25;
        }
        if !cfg.edges_free(spec).unwrap_or(false) {
            cfg.window = default_window(p.g, p.beta, p.epsilon);
        }
        cfg
    }

    fn edges_free(&self, spec: &HamiltonianSpec) -> Result<bool> {
        let mut ok = freedom_ratio(spec, self.window)? >= FREEDOM_RATIO;
        if !spec.singular_in_t() {
            ok &= freedom_ratio(spec, -self.window)? >= FREEDOM_RATIO;
        }
        Ok(ok)
    }

    /// Checks tolerances and that couplings are negligible at the window edges.
    pub fn validate(&self, spec: &HamiltonianSpec) -> Result<()> {
        if !(self.window > 0.0 && self.window.is_finite()) {
            return Err(MlzError::Domain(format!("window must be positive, got {}", self.window)));
        }
        if !(self.rel_tol > 0.0 && self.abs_tol > 0.0) {
            return Err(MlzError::Domain("tolerances must be positive".into()));
        }
        if !(self.step_fraction > 0.0) {
            return Err(MlzError::Domain("step_fraction must be positive".into()));
        }
        if !self.edges_free(spec)? {
            return Err(MlzError::Domain(format!(
                "window T = {} too small: coupled-pair gaps at the edges are below {FREEDOM_RATIO}x the largest coupling",
                self.window
            )));
        }
        Ok(())
    }

    /// Start time of a `1/t` model: explicit, or a small fraction of
    /// `min(1/ε, β/g²)`.
    pub fn start_time(&self, spec: &HamiltonianSpec) -> f64 {
        if let Some(t0) = self.t_start {
            return t0;
        }
        let p = &spec.params;
        let mut scale = f64::INFINITY;
        if p.epsilon > 0.0 {
            scale = scale.min(1.0 / p.epsilon);
        }
        if p.g > 0.0 {
            scale = scale.min(p.beta / (p.g * p.g));
        }
        if !scale.is_finite() {
            scale = 1.0;
        }
        INVERSE_TIME_START_FRACTION * scale
    }

    /// Allowed drift of `‖ψ‖` from 1; exceeding ten times this is an error.
    /// Fixed-step runs have no error budget and skip the check.
    pub fn norm_budget(&self) -> f64 {
        (1e3 * self.rel_tol).max(1e-9)
    }

    pub(crate) fn step_control(&self) -> StepControl {
        StepControl {
            rel_tol: self.rel_tol,
            abs_tol: self.abs_tol,
            max_step: self.max_step,
            fixed_step: self.fixed_step,
            per_unit_step: self.gauge == Gauge::Lab,
            max_steps: self.max_steps,
        }
    }

    pub fn with_window(mut self, window: f64) -> Self {
        self.window = window;
        self
    }

    pub fn with_tolerances(mut self, rel_tol: f64, abs_tol: f64) -> Self {
        self.rel_tol = rel_tol;
        self.abs_tol = abs_tol;
        self
    }

    pub fn with_gauge(mut self, gauge: Gauge) -> Self {
        self.gauge = gauge;
        self
    }

    pub fn with_readout(mut self, readout: Readout) -> Self {
        self.readout = readout;
        self
    }
}
