//! Schrödinger right-hand side along one straight segment of the time plane.
//!
//! The segment is `(t, τ)(s) = (t₀ + s·ṫ, τ₀ + s·τ̇)` and the generator is
//! `ṫ·H + τ̇·H′`. In the interaction gauge the diagonal phase
//! `θ(s) = ∫₀ˢ diag G` is carried analytically, so only couplings are stepped.

use super::config::Gauge;
use super::ode::OdeSystem;
use crate::model::{Coefficient, HamiltonianSpec};
use nalgebra::DVector;
use num_complex::Complex64;

struct DiagTerm {
    coefficient: Coefficient,
    values: Vec<f64>,
}

struct OffTerm {
    coefficient: Coefficient,
    /// Both `(i, j)` and `(j, i)` for symmetric entries.
    entries: Vec<(usize, usize, f64)>,
}

pub(crate) struct SegmentSystem {
    t0: f64,
    tau0: f64,
    dt: f64,
    dtau: f64,
    dim: usize,
    diag: Vec<DiagTerm>,
    off: Vec<OffTerm>,
    /// Unique coupled pairs `i < j`.
    pairs: Vec<(usize, usize)>,
    step_fraction: f64,
    theta: Vec<f64>,
    rot: Vec<Complex64>,
    psi: Vec<Complex64>,
    chi: Vec<Complex64>,
}

impl SegmentSystem {
    /// `sources` pairs each Hamiltonian with its rate (`ṫ` or `τ̇`).
    pub(crate) fn new(
        sources: &[(&HamiltonianSpec, f64)],
        start: (f64, f64),
        rates: (f64, f64),
        gauge: Gauge,
        step_fraction: f64,
    ) -> Self {
        let dim = sources[0].0.dim;
        let mut diag = Vec::new();
        let mut off = Vec::new();
        let mut pair_set = std::collections::BTreeSet::new();
        for &(spec, rate) in sources {
            debug_assert_eq!(spec.dim, dim);
            if rate == 0.0 {
                continue;
            }
            for term in &spec.terms {
                let m = &term.matrix;
                let mut entries = Vec::new();
                let mut values = vec![0.0; dim];
                let mut any_diag = false;
                for i in 0..dim {
                    for j in 0..dim {
                        let v = m[(i, j)] * rate;
                        if v == 0.0 {
                            continue;
                        }
                        if i == j && gauge == Gauge::Interaction {
                            values[i] = v;
                            any_diag = true;
                        } else {
                            entries.push((i, j, v));
                            if i < j {
                                pair_set.insert((i, j));
                            }
                        }
                    }
                }
                if any_diag {
                    diag.push(DiagTerm { coefficient: term.coefficient, values });
                }
                if !entries.is_empty() {
                    off.push(OffTerm { coefficient: term.coefficient, entries });
                }
            }
        }
        Self {
            t0: start.0,
            tau0: start.1,
            dt: rates.0,
            dtau: rates.1,
            dim,
            diag,
            off,
            pairs: pair_set.into_iter().collect(),
            step_fraction,
            theta: vec![0.0; dim],
            rot: vec![Complex64::default(); dim],
            psi: vec![Complex64::default(); dim],
            chi: vec![Complex64::default(); dim],
        }
    }

    fn point(&self, s: f64) -> (f64, f64) {
        (self.t0 + s * self.dt, self.tau0 + s * self.dtau)
    }

    fn fill_theta(&mut self, s: f64) {
        self.theta.iter_mut().for_each(|x| *x = 0.0);
        for term in &self.diag {
            let w = term.coefficient.integral_along(self.t0, self.tau0, self.dt, self.dtau, s);
            for (th, &v) in self.theta.iter_mut().zip(&term.values) {
                *th += w * v;
            }
        }
    }

    /// Interaction-frame vector to lab amplitudes at `s`.
    pub(crate) fn to_lab(&mut self, s: f64, phi: &[Complex64]) -> DVector<Complex64> {
        self.fill_theta(s);
        DVector::from_iterator(
            self.dim,
            phi.iter().zip(&self.theta).map(|(&p, &th)| p * Complex64::from_polar(1.0, -th)),
        )
    }

    /// Diagonal of the generator at `s` (zero in the lab gauge).
    fn diagonal_rates(&self, s: f64) -> Vec<f64> {
        let (t, tau) = self.point(s);
        let mut d = vec![0.0; self.dim];
        for term in &self.diag {
            let c = term.coefficient.eval(t, tau);
            for (x, &v) in d.iter_mut().zip(&term.values) {
                *x += c * v;
            }
        }
        d
    }

    /// Fastest oscillation rate the stepper must resolve near `s`.
    fn omega(&self, s: f64) -> f64 {
        let (t, tau) = self.point(s);
        if self.diag.is_empty() {
            // lab gauge: bound by the largest row sum
            let mut rows = vec![0.0; self.dim];
            for term in &self.off {
                let c = term.coefficient.eval(t, tau).abs();
                for &(i, _, v) in &term.entries {
                    rows[i] += c * v.abs();
                }
            }
            return rows.into_iter().fold(0.0, f64::max);
        }
        let d = self.diagonal_rates(s);
        let mut w: f64 = 0.0;
        for &(i, j) in &self.pairs {
            w = w.max((d[i] - d[j]).abs());
        }
        let mut coupling: f64 = 0.0;
        for term in &self.off {
            let c = term.coefficient.eval(t, tau).abs();
            for &(_, _, v) in &term.entries {
                coupling = coupling.max(c * v.abs());
            }
        }
        w.max(coupling)
    }
}

impl OdeSystem<Complex64> for SegmentSystem {
    fn rhs(&mut self, s: f64, y: &[Complex64], dy: &mut [Complex64]) {
        let (t, tau) = self.point(s);
        self.fill_theta(s);
        for i in 0..self.dim {
            self.rot[i] = Complex64::from_polar(1.0, self.theta[i]);
            self.psi[i] = y[i] * self.rot[i].conj();
            self.chi[i] = Complex64::default();
        }
        for term in &self.off {
            let c = term.coefficient.eval(t, tau);
            for &(i, j, v) in &term.entries {
                self.chi[i] += self.psi[j] * (c * v);
            }
        }
        for i in 0..self.dim {
            dy[i] = Complex64::new(0.0, -1.0) * self.rot[i] * self.chi[i];
        }
    }

    fn max_step(&self, s: f64) -> f64 {
        let w = self.omega(s);
        if w > 0.0 {
            self.step_fraction / w
        } else {
            f64::INFINITY
        }
    }
}
