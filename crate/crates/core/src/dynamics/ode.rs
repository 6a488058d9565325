//! Dormand-Prince 5(4) with PI step-size control.
//!
//! Generic over the scalar type so the same stepper drives the complex
//! Schrödinger equation and the real classical flow.

use crate::error::{MlzError, Result};
use num_complex::Complex64;
use std::ops::{Add, Mul, Sub};

/// Scalar component of an ODE state.
pub trait OdeValue:
    Copy + Default + Add<Output = Self> + Sub<Output = Self> + Mul<f64, Output = Self>
{
    fn magnitude(self) -> f64;
}

impl OdeValue for f64 {
    fn magnitude(self) -> f64 {
        self.abs()
    }
}

impl OdeValue for Complex64 {
    fn magnitude(self) -> f64 {
        self.norm()
    }
}

/// Right-hand side `dy/ds = f(s, y)`.
pub trait OdeSystem<V: OdeValue> {
    fn rhs(&mut self, s: f64, y: &[V], dy: &mut [V]);

    /// Upper bound on the step magnitude near `s`.
    fn max_step(&self, _s: f64) -> f64 {
        f64::INFINITY
    }
}

/// Tolerances and limits for [`integrate`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepControl {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_step: f64,
    /// Fixed step size; disables error control when set.
    pub fixed_step: Option<f64>,
    /// Scale the local error by `span/h` so the accumulated error, not the
    /// per-step error, is held to the tolerance.
    pub per_unit_step: bool,
    pub max_steps: usize,
}

impl Default for StepControl {
    fn default() -> Self {
        Self { rel_tol: 1e-10, abs_tol: 1e-12, max_step: f64::INFINITY, fixed_step: None, per_unit_step: false, max_steps: 50_000_000 }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct OdeStats {
    pub accepted: usize,
    pub rejected: usize,
    pub evaluations: usize,
}

const C: [f64; 7] = [0.0, 0.2, 0.3, 0.8, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [0.2, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
/// Fifth-order minus embedded fourth-order weights.
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

const SAFETY: f64 = 0.9;
const PI_BETA: f64 = 0.04;
const PI_ALPHA: f64 = 0.2 - 0.75 * PI_BETA;
const FAC_MIN: f64 = 0.2;
const FAC_MAX: f64 = 10.0;

struct Work<V> {
    k: [Vec<V>; 7],
    tmp: Vec<V>,
    ynew: Vec<V>,
}

impl<V: OdeValue> Work<V> {
    fn new(n: usize) -> Self {
        Self {
            k: std::array::from_fn(|_| vec![V::default(); n]),
            tmp: vec![V::default(); n],
            ynew: vec![V::default(); n],
        }
    }
}

/// One Dormand-Prince step of signed size `h` from `(s, y)`; `k[0]` must hold
/// `f(s, y)`. Leaves the new state in `ynew`, its derivative in `k[6]`, and
/// returns the scaled RMS error estimate.
fn dp_step<V: OdeValue, S: OdeSystem<V>>(
    sys: &mut S,
    s: f64,
    y: &[V],
    h: f64,
    w: &mut Work<V>,
    ctl: &StepControl,
) -> f64 {
    let n = y.len();
    for stage in 1..7 {
        for i in 0..n {
            let mut acc = y[i];
            for (j, &a) in A[stage][..stage].iter().enumerate() {
                if a != 0.0 {
                    acc = acc + w.k[j][i] * (h * a);
                }
            }
            w.tmp[i] = acc;
        }
        if stage == 6 {
            w.ynew.copy_from_slice(&w.tmp);
        }
        sys.rhs(s + C[stage] * h, &w.tmp, &mut w.k[stage]);
    }
    let mut sum = 0.0;
    for i in 0..n {
        let mut err = V::default();
        for (j, &e) in E.iter().enumerate() {
            if e != 0.0 {
                err = err + w.k[j][i] * (h * e);
            }
        }
        let scale = ctl.abs_tol + ctl.rel_tol * y[i].magnitude().max(w.ynew[i].magnitude());
        let r = err.magnitude() / scale;
        sum += r * r;
    }
    (sum / n.max(1) as f64).sqrt()
}

fn initial_step<V: OdeValue, S: OdeSystem<V>>(
    sys: &mut S,
    s: f64,
    y: &[V],
    dir: f64,
    w: &mut Work<V>,
    ctl: &StepControl,
    cap: f64,
) -> f64 {
    let n = y.len().max(1) as f64;
    let scale = |v: V, base: V| ctl.abs_tol + ctl.rel_tol * base.magnitude().max(v.magnitude());
    let d0 = (y.iter().map(|&v| (v.magnitude() / scale(v, v)).powi(2)).sum::<f64>() / n).sqrt();
    let d1 = (y.iter().zip(&w.k[0]).map(|(&v, &f)| (f.magnitude() / scale(v, v)).powi(2)).sum::<f64>() / n)
        .sqrt();
    let h0 = if d0 < 1e-5 || d1 < 1e-5 { 1e-6 } else { 0.01 * d0 / d1 };
    let h0 = h0.min(cap);
    for i in 0..y.len() {
        w.tmp[i] = y[i] + w.k[0][i] * (dir * h0);
    }
    sys.rhs(s + dir * h0, &w.tmp, &mut w.k[1]);
    let d2 = (y
        .iter()
        .zip(w.k[1].iter().zip(&w.k[0]))
        .map(|(&v, (&f1, &f0))| ((f1 - f0).magnitude() / scale(v, v)).powi(2))
        .sum::<f64>()
        / n)
        .sqrt()
        / h0;
    let h1 = if d1.max(d2) <= 1e-15 {
        (h0 * 1e-3).max(1e-6)
    } else {
        (0.01 / d1.max(d2)).powf(0.2)
    };
    (100.0 * h0).min(h1).min(cap)
}

/// Integrates `y` in place from `s0` to `s1` (either direction), calling
/// `observer(s, y)` after every accepted step.
pub fn integrate<V: OdeValue, S: OdeSystem<V>>(
    sys: &mut S,
    s0: f64,
    s1: f64,
    y: &mut [V],
    ctl: &StepControl,
    mut observer: impl FnMut(f64, &[V]),
) -> Result<OdeStats> {
    let mut stats = OdeStats::default();
    let span = s1 - s0;
    if span == 0.0 {
        return Ok(stats);
    }
    if !span.is_finite() {
        return Err(MlzError::Domain(format!("non-finite integration span {s0} -> {s1}")));
    }
    let dir = span.signum();
    let n = y.len();
    let mut w = Work::new(n);
    let mut s = s0;
    sys.rhs(s, y, &mut w.k[0]);
    stats.evaluations += 1;

    if let Some(h_fixed) = ctl.fixed_step {
        if !(h_fixed > 0.0) {
            return Err(MlzError::Domain(format!("fixed step must be > 0, got {h_fixed}")));
        }
        let steps = (span.abs() / h_fixed).ceil().max(1.0) as usize;
        let h = span / steps as f64;
        for k in 0..steps {
            dp_step(sys, s, y, h, &mut w, ctl);
            stats.evaluations += 6;
            stats.accepted += 1;
            y.copy_from_slice(&w.ynew);
            s = if k + 1 == steps { s1 } else { s0 + (k + 1) as f64 * h };
            w.k.swap(0, 6);
            observer(s, y);
        }
        return Ok(stats);
    }

    let cap = |s: f64, sys: &S| ctl.max_step.min(sys.max_step(s)).min(span.abs());
    let mut h = initial_step(sys, s, y, dir, &mut w, ctl, cap(s, sys));
    stats.evaluations += 1;
    let mut err_prev: f64 = 1e-4;
    let mut rejected_last = false;
    loop {
        let remaining = (s1 - s).abs();
        if remaining <= 0.0 {
            break;
        }
        if stats.accepted + stats.rejected >= ctl.max_steps {
            return Err(MlzError::StepLimit(ctl.max_steps));
        }
        h = h.min(cap(s, sys));
        let last = h >= remaining * (1.0 - 1e-12);
        if last {
            h = remaining;
        }
        let h_min = 1e-14 * s.abs().max(span.abs());
        if h < h_min {
            return Err(MlzError::StepUnderflow { t: s, h });
        }
        let mut err = dp_step(sys, s, y, dir * h, &mut w, ctl);
        if ctl.per_unit_step {
            err *= span.abs() / h;
        }
        stats.evaluations += 6;
        if err <= 1.0 && err.is_finite() {
            stats.accepted += 1;
            y.copy_from_slice(&w.ynew);
            s = if last { s1 } else { s + dir * h };
            w.k.swap(0, 6);
            observer(s, y);
            let err_c = err.max(1e-10);
            let mut fac = SAFETY * err_c.powf(-PI_ALPHA) * err_prev.powf(PI_BETA);
            fac = fac.clamp(FAC_MIN, if rejected_last { 1.0 } else { FAC_MAX });
            err_prev = err_c;
            rejected_last = false;
            h *= fac;
            if last {
                break;
            }
        } else {
            stats.rejected += 1;
            rejected_last = true;
            let fac = if err.is_finite() { (SAFETY * err.powf(-PI_ALPHA)).max(FAC_MIN) } else { FAC_MIN };
            h *= fac.min(1.0);
        }
    }
    Ok(stats)
}
