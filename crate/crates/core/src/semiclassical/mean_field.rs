use crate::error::{MlzError, Result};
use crate::params::ModelParams;
use crate::tolerance::{ROOT_ABS_TOL, ROOT_MAX_ITER};

/// Mean fields of the thermalization stage in a sector of `n` pairs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeanFieldState {
    /// Cross-mode correlator `Δ₁₂ ≥ 0`.
    pub delta12: f64,
    /// Mode-2 occupation `Δ₂ = n(1 − t/t_c)/2` below `t_c`, zero above.
    pub delta2: f64,
    /// Transition time `n g²/(βε)` of the sector; infinite at `ε = 0`.
    pub t_c: f64,
    /// Same expression with the total `N` in place of the sector `n`.
    pub t_c_total: f64,
}

/// Signed `(n/2)² − ε²(βt)²/(4g⁴)`.
pub fn mean_field_delta12_squared(n: usize, p: &ModelParams, t: f64) -> f64 {
    let half = 0.5 * n as f64;
    let x = p.epsilon * p.beta * t / (p.g * p.g);
    half * half - 0.25 * x * x
}

/// Self-consistent mean field at time `t > 0`.
pub fn mean_field_delta12(n: usize, p: &ModelParams, t: f64) -> Result<MeanFieldState> {
    if !(t > 0.0) {
        return Err(MlzError::Domain(format!("mean field needs t > 0, got {t}")));
    }
    if p.g == 0.0 {
        return Err(MlzError::Domain("mean field needs g > 0".into()));
    }
    let tc = |k: f64| if p.epsilon == 0.0 { f64::INFINITY } else { k * p.g * p.g / (p.beta * p.epsilon) };
    let t_c = tc(n as f64);
    let sq = mean_field_delta12_squared(n, p, t);
    let delta12 = if sq > 0.0 { sq.sqrt() } else { 0.0 };
    let delta2 = if t < t_c { 0.5 * n as f64 * (1.0 - t / t_c) } else { 0.0 };
    Ok(MeanFieldState { delta12, delta2, t_c, t_c_total: tc(p.n as f64) })
}

/// Zero of the signed `Δ₁₂²` found by bisection on `(0, 2t_c]`, independent
/// of the closed-form `t_c`.
pub fn mean_field_crossing(n: usize, p: &ModelParams) -> Result<f64> {
    if p.epsilon == 0.0 || p.g == 0.0 || n == 0 {
        return Err(MlzError::Bracket("no sign change without epsilon, g and n all nonzero".into()));
    }
    let f = |t: f64| mean_field_delta12_squared(n, p, t);
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    while f(hi) > 0.0 {
        hi *= 2.0;
        if !hi.is_finite() {
            return Err(MlzError::Bracket("upper bracket overflow".into()));
        }
    }
    for _ in 0..ROOT_MAX_ITER {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi || hi - lo <= ROOT_ABS_TOL * hi {
            break;
        }
        if f(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p() -> ModelParams {
        ModelParams::new(200, 1.3, 7.0, 0.4).unwrap()
    }

    #[test]
    fn early_time_is_fully_correlated() {
        let m = mean_field_delta12(50, &p(), 1e-9).unwrap();
        assert!((m.delta12 - 25.0).abs() < 1e-9);
        assert!((m.delta2 - 25.0).abs() < 1e-6);
    }

    #[test]
    fn vanishes_at_transition() {
        let m = mean_field_delta12(50, &p(), 1.0).unwrap();
        assert!((m.t_c - 50.0 * 1.69 / (7.0 * 0.4)).abs() < 1e-12);
        assert!((m.t_c_total / m.t_c - 4.0).abs() < 1e-14);
        let at = mean_field_delta12(50, &p(), m.t_c).unwrap();
        assert!(at.delta12 < 1e-6);
        assert!(mean_field_delta12_squared(50, &p(), 0.99 * m.t_c) > 0.0);
        assert!(mean_field_delta12_squared(50, &p(), 1.01 * m.t_c) < 0.0);
        assert_eq!(mean_field_delta12(50, &p(), 2.0 * m.t_c).unwrap().delta12, 0.0);
    }

    #[test]
    fn crossing_matches_closed_form() {
        let tc = mean_field_delta12(50, &p(), 1.0).unwrap().t_c;
        let root = mean_field_crossing(50, &p()).unwrap();
        assert!(((root - tc) / tc).abs() < 1e-10, "{root} {tc}");
    }

    #[test]
    fn zero_epsilon_never_transitions() {
        let q = ModelParams::new(10, 1.0, 1.0, 0.0).unwrap();
        let m = mean_field_delta12(10, &q, 100.0).unwrap();
        assert!(m.t_c.is_infinite());
        assert_eq!(m.delta12, 5.0);
        assert!(mean_field_crossing(10, &q).is_err());
        assert!(mean_field_delta12(10, &q, 0.0).is_err());
    }
}
