//! Randomized checks of the classical integrability relations.

use super::classical::{classical_gradient, partner_gradient, poisson_bracket, ClassicalState};
use super::mean_field::{mean_field_crossing, mean_field_delta12};
use super::quartic::quartic_normal_form;
use crate::error::{MlzError, Result};
use crate::params::ModelParams;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::PI;
use std::fmt;

/// `∂H_cl/∂ε = n₂ − n₁`.
pub fn hamiltonian_d_epsilon(s: &ClassicalState) -> f64 {
    s.n2 - s.n1
}

/// `∂H′_cl/∂t = n₂ − n₁`.
pub fn partner_d_t(s: &ClassicalState) -> f64 {
    s.n2 - s.n1
}

/// Uniform random valid states: `n₁ + n₂ ≤ N`, angles in `[0, 2π)`,
/// time in `[−t_max, t_max]`.
pub fn random_states(p: &ModelParams, count: usize, t_max: f64, seed: u64) -> Vec<ClassicalState> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = p.n as f64;
    (0..count)
        .map(|_| {
            // uniform on the triangle by folding the unit square
            let (mut a, mut b): (f64, f64) = (rng.random(), rng.random());
            if a + b > 1.0 {
                (a, b) = (1.0 - a, 1.0 - b);
            }
            ClassicalState::new(
                a * n,
                b * n,
                rng.random_range(0.0..2.0 * PI),
                rng.random_range(0.0..2.0 * PI),
                rng.random_range(-t_max..=t_max),
            )
        })
        .collect()
}

/// Worst residuals of the classical certificate.
#[derive(Debug, Clone, PartialEq)]
pub struct ClassicalCertificate {
    pub samples: usize,
    /// `max |{H, H′}| / (|∇H| |∇H′|)`.
    pub max_bracket: f64,
    /// `max |∂H/∂ε − ∂H′/∂t| / max(|∂H/∂ε| + |∂H′/∂t|, 1)`.
    pub max_mixed: f64,
    /// Relative offset of the bisected `Δ₁₂` zero from `t_c`.
    pub crossing_offset: f64,
    /// Worst relative gap between the quartic gradient and central differences.
    pub quartic_gradient_error: f64,
}

impl ClassicalCertificate {
    pub const BRACKET_TOL: f64 = 1e-9;
    pub const CROSSING_TOL: f64 = 1e-10;
    pub const GRADIENT_TOL: f64 = 1e-6;

    pub fn pass(&self) -> bool {
        self.max_bracket <= Self::BRACKET_TOL
            && self.max_mixed <= Self::BRACKET_TOL
            && self.crossing_offset <= Self::CROSSING_TOL
            && self.quartic_gradient_error <= Self::GRADIENT_TOL
    }
}

impl fmt::Display for ClassicalCertificate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "samples: {}", self.samples)?;
        writeln!(f, "max_bracket: {:e}", self.max_bracket)?;
        writeln!(f, "max_mixed: {:e}", self.max_mixed)?;
        writeln!(f, "crossing_offset: {:e}", self.crossing_offset)?;
        writeln!(f, "quartic_gradient_error: {:e}", self.quartic_gradient_error)?;
        write!(f, "pass: {}", self.pass())
    }
}

/// Runs every classical check on `count` random states drawn from `seed`.
/// The mean-field crossing uses the sector `n = N`.
pub fn classical_certificate(p: &ModelParams, count: usize, seed: u64) -> Result<ClassicalCertificate> {
    if count == 0 {
        return Err(MlzError::Domain("certificate needs at least one sample".into()));
    }
    let t_max = 2.0 * (p.epsilon.abs() + p.g * (p.n as f64).sqrt()) / p.beta;
    let states = random_states(p, count, t_max, seed);
    let (mut max_bracket, mut max_mixed) = (0.0f64, 0.0f64);
    for s in &states {
        let gh = classical_gradient(s, p)?;
        let gp = partner_gradient(s, p)?;
        let scale = gh.norm() * gp.norm();
        if scale > 0.0 {
            max_bracket = max_bracket.max(poisson_bracket(&gh, &gp).abs() / scale);
        }
        let (a, b) = (hamiltonian_d_epsilon(s), partner_d_t(s));
        max_mixed = max_mixed.max((a - b).abs() / (a.abs() + b.abs()).max(1.0));
    }

    let t_c = mean_field_delta12(p.n, p, 1.0)?.t_c;
    let crossing_offset = ((mean_field_crossing(p.n, p)? - t_c) / t_c).abs();

    let q = quartic_normal_form(p)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x9e37_79b9_7f4a_7c15);
    let mut quartic_gradient_error = 0.0f64;
    for _ in 0..count {
        let x = [rng.random_range(-3.0..3.0), rng.random_range(-3.0..3.0)];
        let t = rng.random_range(-t_max..=t_max);
        let g = q.gradient(x, t);
        for k in 0..2 {
            let h = 1e-5 * x[k].abs().max(1.0);
            let (mut xp, mut xm) = (x, x);
            xp[k] += h;
            xm[k] -= h;
            let fd = (q.potential(xp, t) - q.potential(xm, t)) / (2.0 * h);
            quartic_gradient_error = quartic_gradient_error.max((fd - g[k]).abs() / g[k].abs().max(1.0));
        }
    }

    Ok(ClassicalCertificate { samples: count, max_bracket, max_mixed, crossing_offset, quartic_gradient_error })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn states_are_valid() {
        let p = ModelParams::new(20, 1.0, 3.0, 0.7).unwrap();
        let st = random_states(&p, 500, 5.0, 3);
        assert!(st.iter().all(|s| s.n1 >= 0.0 && s.n2 >= 0.0 && s.molecules(20) >= 0.0));
        assert_eq!(st, random_states(&p, 500, 5.0, 3));
    }

    #[test]
    fn certificate_passes() {
        let p = ModelParams::new(40, 1.0, 2.0, 0.5).unwrap();
        let c = classical_certificate(&p, 1000, 7).unwrap();
        assert!(c.pass(), "{c}");
    }

    #[test]
    fn zero_epsilon_cannot_be_certified() {
        let p = ModelParams::new(4, 1.0, 1.0, 0.0).unwrap();
        assert!(classical_certificate(&p, 10, 1).is_err());
    }
}
