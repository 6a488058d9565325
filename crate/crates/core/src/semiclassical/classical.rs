use crate::dynamics::ode::{integrate, OdeSystem, StepControl};
use crate::error::{MlzError, Result};
use crate::params::ModelParams;
use crate::tolerance::BOUNDARY_SLACK;
use std::fmt::Write;

/// Point of classical phase space at time `time`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClassicalState {
    pub n1: f64,
    pub n2: f64,
    pub phi1: f64,
    pub phi2: f64,
    pub time: f64,
}

impl ClassicalState {
    pub fn new(n1: f64, n2: f64, phi1: f64, phi2: f64, time: f64) -> Self {
        Self { n1, n2, phi1, phi2, time }
    }

    /// `N − n₁ − n₂`.
    pub fn molecules(&self, n: usize) -> f64 {
        n as f64 - self.n1 - self.n2
    }

    fn check(&self, n: usize) -> Result<()> {
        if self.n1 < -BOUNDARY_SLACK || self.n2 < -BOUNDARY_SLACK || self.molecules(n) < -BOUNDARY_SLACK {
            return Err(MlzError::BoundaryBreach(format!(
                "n1 = {}, n2 = {}, N - n1 - n2 = {} at t = {}",
                self.n1,
                self.n2,
                self.molecules(n),
                self.time
            )));
        }
        Ok(())
    }
}

/// Partial derivatives with respect to `(n₁, n₂, φ₁, φ₂)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Gradient {
    pub dn1: f64,
    pub dn2: f64,
    pub dphi1: f64,
    pub dphi2: f64,
}

impl Gradient {
    pub fn norm(&self) -> f64 {
        (self.dn1 * self.dn1 + self.dn2 * self.dn2 + self.dphi1 * self.dphi1 + self.dphi2 * self.dphi2).sqrt()
    }
}

/// `{A, B} = Σₛ (∂A/∂φₛ ∂B/∂nₛ − ∂A/∂nₛ ∂B/∂φₛ)`.
pub fn poisson_bracket(a: &Gradient, b: &Gradient) -> f64 {
    a.dphi1 * b.dn1 - a.dn1 * b.dphi1 + a.dphi2 * b.dn2 - a.dn2 * b.dphi2
}

fn root(s: &ClassicalState, n: usize) -> f64 {
    s.molecules(n).max(0.0).sqrt()
}

/// `−βt(n₁+n₂) + ε(n₂−n₁) + 2g√(N−n₁−n₂)(n₁cosφ₁ + n₂cosφ₂)` at `s.time`.
pub fn classical_hamiltonian(s: &ClassicalState, p: &ModelParams) -> Result<f64> {
    s.check(p.n)?;
    let t = s.time;
    Ok(-p.beta * t * (s.n1 + s.n2)
        + p.epsilon * (s.n2 - s.n1)
        + 2.0 * p.g * root(s, p.n) * (s.n1 * s.phi1.cos() + s.n2 * s.phi2.cos()))
}

/// Analytic gradient of [`classical_hamiltonian`].
pub fn classical_gradient(s: &ClassicalState, p: &ModelParams) -> Result<Gradient> {
    s.check(p.n)?;
    let (c1, c2) = (s.phi1.cos(), s.phi2.cos());
    let r = root(s, p.n);
    let bt = p.beta * s.time;
    let inner = s.n1 * c1 + s.n2 * c2;
    let pull = if r > 0.0 { p.g * inner / r } else { 0.0 };
    Ok(Gradient {
        dn1: -bt - p.epsilon - pull + 2.0 * p.g * r * c1,
        dn2: -bt + p.epsilon - pull + 2.0 * p.g * r * c2,
        dphi1: -2.0 * p.g * r * s.n1 * s.phi1.sin(),
        dphi2: -2.0 * p.g * r * s.n2 * s.phi2.sin(),
    })
}

fn check_eps(p: &ModelParams) -> Result<()> {
    if p.epsilon == 0.0 {
        return Err(MlzError::Singularity("classical partner has a 1/epsilon term; epsilon = 0".into()));
    }
    Ok(())
}

/// Commuting partner
/// `t(n₂−n₁) − (ε/β)(n₁+n₂) − (2g/β)√(N−n₁−n₂)(n₂cosφ₂ − n₁cosφ₁)
///  + (4g²n₁n₂/βε) sin²((φ₁−φ₂)/2)`.
pub fn classical_partner(s: &ClassicalState, p: &ModelParams) -> Result<f64> {
    check_eps(p)?;
    s.check(p.n)?;
    let (g, b, e, t) = (p.g, p.beta, p.epsilon, s.time);
    let half = (0.5 * (s.phi1 - s.phi2)).sin();
    Ok(t * (s.n2 - s.n1) - e / b * (s.n1 + s.n2)
        - 2.0 * g / b * root(s, p.n) * (s.n2 * s.phi2.cos() - s.n1 * s.phi1.cos())
        + 4.0 * g * g * s.n1 * s.n2 / (b * e) * half * half)
}

/// Analytic gradient of [`classical_partner`].
pub fn partner_gradient(s: &ClassicalState, p: &ModelParams) -> Result<Gradient> {
    check_eps(p)?;
    s.check(p.n)?;
    let (g, b, e, t) = (p.g, p.beta, p.epsilon, s.time);
    let (c1, c2) = (s.phi1.cos(), s.phi2.cos());
    let r = root(s, p.n);
    let half = (0.5 * (s.phi1 - s.phi2)).sin();
    let s2 = half * half;
    let diff = s.n2 * c2 - s.n1 * c1;
    let pull = if r > 0.0 { g / b * diff / r } else { 0.0 };
    let quart = 4.0 * g * g / (b * e);
    let cross = 2.0 * g * g * s.n1 * s.n2 / (b * e) * (s.phi1 - s.phi2).sin();
    Ok(Gradient {
        dn1: -t - e / b + pull + 2.0 * g / b * r * c1 + quart * s.n2 * s2,
        dn2: t - e / b + pull - 2.0 * g / b * r * c2 + quart * s.n1 * s2,
        dphi1: -2.0 * g / b * r * s.n1 * s.phi1.sin() + cross,
        dphi2: 2.0 * g / b * r * s.n2 * s.phi2.sin() - cross,
    })
}

/// Stepper settings and sampling for [`integrate_trajectory`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrajectoryConfig {
    pub control: StepControl,
    /// Record every accepted step when `None`, else at most once per interval.
    pub record_interval: Option<f64>,
}

impl Default for TrajectoryConfig {
    fn default() -> Self {
        Self { control: StepControl { rel_tol: 1e-11, abs_tol: 1e-13, ..StepControl::default() }, record_interval: None }
    }
}

/// Sampled classical trajectory.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub states: Vec<ClassicalState>,
    pub energies: Vec<f64>,
    /// `∫ ∂H/∂t dt` accumulated from the start, per sample.
    pub work: Vec<f64>,
}

impl Trajectory {
    pub fn last(&self) -> &ClassicalState {
        self.states.last().expect("trajectory has at least the initial state")
    }

    /// CSV with columns `t,n1,n2,phi1,phi2,H_cl`.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("t,n1,n2,phi1,phi2,H_cl\n");
        for (st, e) in self.states.iter().zip(&self.energies) {
            let _ = writeln!(s, "{},{},{},{},{},{}", st.time, st.n1, st.n2, st.phi1, st.phi2, e);
        }
        s
    }
}

struct Flow<'a> {
    p: &'a ModelParams,
    breach: Option<MlzError>,
}

impl OdeSystem<f64> for Flow<'_> {
    fn rhs(&mut self, t: f64, y: &[f64], dy: &mut [f64]) {
        let s = ClassicalState::new(y[0], y[1], y[2], y[3], t);
        match classical_gradient(&s, self.p) {
            Ok(gr) => {
                dy[0] = -gr.dphi1;
                dy[1] = -gr.dphi2;
                dy[2] = gr.dn1;
                dy[3] = gr.dn2;
                dy[4] = -self.p.beta * (s.n1 + s.n2);
            }
            Err(e) => {
                // trial stages may poke outside; the step is rejected via NaN
                self.breach.get_or_insert(e);
                dy.iter_mut().for_each(|d| *d = f64::NAN);
            }
        }
    }
}

/// Integrates Hamilton's equations of [`classical_hamiltonian`] from
/// `state0.time` to `t1`.
///
/// Fails with a boundary breach if an accepted step leaves
/// `n₁, n₂ ≥ 0, n₁ + n₂ ≤ N` by more than the slack.
pub fn integrate_trajectory(
    state0: &ClassicalState,
    p: &ModelParams,
    t1: f64,
    cfg: &TrajectoryConfig,
) -> Result<Trajectory> {
    state0.check(p.n)?;
    let mut y = [state0.n1, state0.n2, state0.phi1, state0.phi2, 0.0];
    let mut traj = Trajectory {
        states: vec![*state0],
        energies: vec![classical_hamiltonian(state0, p)?],
        work: vec![0.0],
    };
    let mut flow = Flow { p, breach: None };
    let mut error: Option<MlzError> = None;
    let mut next_record = state0.time;
    let dir = (t1 - state0.time).signum();
    let res = integrate(&mut flow, state0.time, t1, &mut y, &cfg.control, |t, y| {
        if error.is_some() {
            return;
        }
        let s = ClassicalState::new(y[0], y[1], y[2], y[3], t);
        if let Err(e) = s.check(p.n) {
            error = Some(e);
            return;
        }
        let due = match cfg.record_interval {
            None => true,
            Some(dt) => (t - next_record) * dir >= dt || t == t1,
        };
        if due {
            next_record = t;
            traj.energies.push(classical_hamiltonian(&s, p).unwrap_or(f64::NAN));
            traj.states.push(s);
            traj.work.push(y[4]);
        }
    });
    if let Some(e) = error {
        return Err(e);
    }
    match res {
        Ok(_) => Ok(traj),
        Err(MlzError::StepUnderflow { .. }) if flow.breach.is_some() => Err(flow.breach.take().unwrap()),
        Err(e) => Err(e),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params() -> ModelParams {
        ModelParams::new(40, 0.7, 3.0, 0.9).unwrap()
    }

    #[test]
    fn empty_modes_have_zero_energy() {
        let s = ClassicalState::new(0.0, 0.0, 1.0, 2.0, 3.0);
        assert_eq!(classical_hamiltonian(&s, &params()).unwrap(), 0.0);
    }

    #[test]
    fn swapping_modes_flips_only_epsilon_term() {
        let p = params();
        let a = ClassicalState::new(3.0, 7.0, 0.4, 2.1, 1.3);
        let b = ClassicalState::new(7.0, 3.0, 2.1, 0.4, 1.3);
        let ha = classical_hamiltonian(&a, &p).unwrap();
        let hb = classical_hamiltonian(&b, &p).unwrap();
        assert!((ha - hb - 2.0 * p.epsilon * 4.0).abs() < 1e-12);
    }

    #[test]
    fn gradients_match_finite_differences() {
        let p = params();
        let s = ClassicalState::new(5.0, 11.0, 0.7, -1.9, 0.8);
        let h = 1e-6;
        let fd = |f: &dyn Fn(&ClassicalState) -> f64, k: usize| {
            let mut a = s;
            let mut b = s;
            match k {
                0 => (a.n1 += h, b.n1 -= h),
                1 => (a.n2 += h, b.n2 -= h),
                2 => (a.phi1 += h, b.phi1 -= h),
                _ => (a.phi2 += h, b.phi2 -= h),
            };
            (f(&a) - f(&b)) / (2.0 * h)
        };
        let hf = |x: &ClassicalState| classical_hamiltonian(x, &p).unwrap();
        let pf = |x: &ClassicalState| classical_partner(x, &p).unwrap();
        let gh = classical_gradient(&s, &p).unwrap();
        let gp = partner_gradient(&s, &p).unwrap();
        for (k, (a, b)) in [(gh.dn1, gp.dn1), (gh.dn2, gp.dn2), (gh.dphi1, gp.dphi1), (gh.dphi2, gp.dphi2)]
            .into_iter()
            .enumerate()
        {
            assert!((a - fd(&hf, k)).abs() < 1e-6 * (1.0 + a.abs()), "H component {k}");
            assert!((b - fd(&pf, k)).abs() < 1e-6 * (1.0 + b.abs()), "H' component {k}");
        }
    }

    #[test]
    fn partner_requires_epsilon() {
        let p = ModelParams::new(10, 1.0, 1.0, 0.0).unwrap();
        let s = ClassicalState::new(1.0, 1.0, 0.0, 0.0, 0.0);
        assert!(matches!(classical_partner(&s, &p), Err(MlzError::Singularity(_))));
    }

    #[test]
    fn equal_angles_kill_quartic_term() {
        let p = params();
        let s = ClassicalState::new(4.0, 6.0, 1.1, 1.1, 0.5);
        let v = classical_partner(&s, &p).unwrap();
        let r = (p.n as f64 - 10.0).sqrt();
        let expected = 0.5 * 2.0 - p.epsilon / p.beta * 10.0 - 2.0 * p.g / p.beta * r * 2.0 * 1.1f64.cos();
        assert!((v - expected).abs() < 1e-12);
    }

    #[test]
    fn decoupled_flow_is_linear_in_angles() {
        let p = ModelParams::new(20, 0.0, 2.0, 0.5).unwrap();
        let s = ClassicalState::new(3.0, 4.0, 0.1, 0.2, -1.0);
        let tr = integrate_trajectory(&s, &p, 2.0, &TrajectoryConfig::default()).unwrap();
        let e = tr.last();
        assert_eq!((e.n1, e.n2), (3.0, 4.0));
        // dφ₁/dt = −βt − ε integrates to −β(t₁² − t₀²)/2 − εΔt
        let expect1 = 0.1 - p.beta * (4.0 - 1.0) / 2.0 - p.epsilon * 3.0;
        assert!((e.phi1 - expect1).abs() < 1e-9);
    }

    #[test]
    fn flow_stays_inside_domain() {
        let p = ModelParams::new(10, 1.0, 1.0, 0.0).unwrap();
        // φ = π/2 pumps both modes towards the √(N − n₁ − n₂) edge, which
        // the flow approaches without crossing
        let h = std::f64::consts::FRAC_PI_2;
        let s = ClassicalState::new(4.9, 4.9, h, h, 0.0);
        let tr = integrate_trajectory(&s, &p, 1.0, &TrajectoryConfig::default()).unwrap();
        assert!(tr.states.iter().all(|st| st.molecules(10) > -BOUNDARY_SLACK));
    }

    #[test]
    fn boundary_breach_reported() {
        let p = ModelParams::new(10, 1.0, 1.0, 0.0).unwrap();
        let bad = ClassicalState::new(8.0, 8.0, 0.0, 0.0, 0.0);
        assert!(matches!(classical_hamiltonian(&bad, &p), Err(MlzError::BoundaryBreach(_))));
        let err = integrate_trajectory(&bad, &p, 1.0, &TrajectoryConfig::default());
        assert!(matches!(err, Err(MlzError::BoundaryBreach(_))), "{err:?}");
    }
}
