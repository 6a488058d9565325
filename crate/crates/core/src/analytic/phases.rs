use crate::error::Result;
use crate::params::ModelParams;
use crate::specfun::arg_gamma;
use num_complex::Complex64;
use std::f64::consts::PI;

/// Scattering phases `Φ_m`, `m = 0..=N`, of the single-channel model:
///
/// `Φ_m = 3mπ/4 + Σ_{k=1}^{m} { arg Γ[i(k + N − m) g²/β] − 2 arg Γ(i k g²/β) }`.
///
/// Values are continuous (not reduced modulo 2π). This is the form that
/// agrees with direct integration; see [`scattering_phases_printed`].
pub fn scattering_phases(params: &ModelParams) -> Result<Vec<f64>> {
    let r = params.g * params.g / params.beta;
    let big = params.n;
    let mut out = Vec::with_capacity(big + 1);
    out.push(0.0);
    for m in 1..=big {
        let mut s = 0.75 * m as f64 * PI;
        for k in 1..=m {
            s += arg_gamma(Complex64::new(0.0, (k + big - m) as f64 * r))?;
            s -= 2.0 * arg_gamma(Complex64::new(0.0, k as f64 * r))?;
        }
        out.push(s);
    }
    Ok(out)
}

/// Variant with `arg Γ[i(k + (N − m) g²/β)]` in the first term.
///
/// Kept for comparison; it does not reproduce simulated phases.
pub fn scattering_phases_printed(params: &ModelParams) -> Result<Vec<f64>> {
    let r = params.g * params.g / params.beta;
    let big = params.n;
    let mut out = Vec::with_capacity(big + 1);
    out.push(0.0);
    for m in 1..=big {
        let mut s = 0.75 * m as f64 * PI;
        for k in 1..=m {
            s += arg_gamma(Complex64::new(0.0, k as f64 + (big - m) as f64 * r))?;
            s -= 2.0 * arg_gamma(Complex64::new(0.0, k as f64 * r))?;
        }
        out.push(s);
    }
    Ok(out)
}

/// `lim_{g→0} Φ_m = 5mπ/4`, since `arg Γ(iy) → −π/2`.
pub fn scattering_phases_weak_limit(n: usize) -> Vec<f64> {
    (0..=n).map(|m| 1.25 * m as f64 * PI).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn survival_phase_is_zero_and_values_finite() {
        for n in 1..=10 {
            for g in [0.1, 1.0, 3.0] {
                let p = ModelParams::new(n, g, 1.0, 0.0).unwrap();
                let ph = scattering_phases(&p).unwrap();
                assert_eq!(ph[0], 0.0);
                assert!(ph.iter().all(|v| v.is_finite()));
            }
        }
    }

    #[test]
    fn weak_coupling_limit() {
        let p = ModelParams::new(3, 1e-5, 1.0, 0.0).unwrap();
        let ph = scattering_phases(&p).unwrap();
        let lim = scattering_phases_weak_limit(3);
        for (a, b) in ph.iter().zip(&lim) {
            assert!((a - b).abs() < 1e-8);
        }
    }
}
