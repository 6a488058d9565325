use super::tables::{single_channel_distribution, two_channel_total_distribution};
use crate::distribution::{Flagged, Label};
use crate::error::{MlzError, Result};
use crate::params::ModelParams;
use crate::specfun::{q_digamma, EULER_GAMMA};
use crate::tolerance::SERIES_REL_TOL;

/// `ψ₁(2) = 1 − γ_E`.
pub const PSI_UNIT_TWO: f64 = 1.0 - EULER_GAMMA;

/// Whether the infinite-N Euler form of the distribution is accurate:
/// the neglected factor `(x^{N+1}, x)_∞` differs from one by about
/// `x^{N+1}/(1−x)`.
pub fn euler_regime(params: &ModelParams) -> bool {
    if params.g == 0.0 {
        return false;
    }
    let lx = params.ln_x();
    let one_minus_x = -lx.exp_m1();
    ((params.n + 1) as f64 * lx).exp() / one_minus_x < 1e-12
}

/// Quasi-adiabatic window `10 ln N / N ≤ 2πg²/β ≤ 0.05`.
pub fn quasi_adiabatic(params: &ModelParams) -> bool {
    let nf = params.n as f64;
    let r = -params.ln_x();
    params.n >= 2 && r >= 10.0 * nf.ln() / nf && r <= 0.05
}

/// Exact `⟨ν⟩ = Σ (N − m) P_m` for the single-channel model.
pub fn mean_nu_single_exact(params: &ModelParams) -> f64 {
    let big = params.n as i64;
    single_channel_distribution(params).expectation(|l| match l {
        Label::Index(m) => (big - m) as f64,
        Label::Pair(..) => unreachable!(),
    })
}

/// `⟨ν⟩`, the mean number of surviving molecules.
///
/// Uses `[ln(1−x) + ψ_x(1)]/ln x` when the Euler form is accurate and the
/// exact finite-N mean otherwise.
pub fn mean_nu_single(params: &ModelParams) -> f64 {
    digamma_mean(params, 1.0).unwrap_or_else(|| mean_nu_single_exact(params))
}

/// Leading asymptotic `Γ(ln Γ + γ_E)` with `Γ = β/(2πg²)`.
pub fn mean_nu_single_asymptotic(params: &ModelParams) -> f64 {
    let big_g = params.gamma_ratio();
    big_g * (big_g.ln() + EULER_GAMMA)
}

fn digamma_mean(params: &ModelParams, z: f64) -> Option<f64> {
    if !euler_regime(params) {
        return None;
    }
    let lx = params.ln_x();
    let x = lx.exp();
    let psi = q_digamma(x, z, SERIES_REL_TOL).ok()?;
    Some(((-lx.exp_m1()).ln() + psi) / lx)
}

/// Exact `⟨ν₊⟩ = Σ (N − n) P_n` over the two-channel total.
pub fn mean_nu_plus_exact(params: &ModelParams) -> f64 {
    let big = params.n as i64;
    two_channel_total_distribution(params).expectation(|l| match l {
        Label::Index(n) => (big - n) as f64,
        Label::Pair(..) => unreachable!(),
    })
}

/// `⟨ν₊⟩` via `[ln(1−x) + ψ_x(2)]/ln x`, falling back to the exact mean.
pub fn mean_nu_plus(params: &ModelParams) -> f64 {
    digamma_mean(params, 2.0).unwrap_or_else(|| mean_nu_plus_exact(params))
}

/// Leading asymptotic `Γ(ln Γ − ψ₁(2))`.
pub fn mean_nu_plus_asymptotic(params: &ModelParams) -> f64 {
    let big_g = params.gamma_ratio();
    big_g * (big_g.ln() - PSI_UNIT_TWO)
}

/// Exact `⟨n₁⟩`; its marginal is the single-channel distribution.
pub fn mean_n1_exact(params: &ModelParams) -> f64 {
    single_channel_distribution(params).mean()
}

/// Exact `⟨n⟩ = ⟨n₁ + n₂⟩`.
pub fn mean_n_exact(params: &ModelParams) -> f64 {
    two_channel_total_distribution(params).mean()
}

/// Exact `⟨n₂⟩ = ⟨ν⟩ − ⟨ν₊⟩`.
pub fn mean_n2_exact(params: &ModelParams) -> f64 {
    mean_nu_single_exact(params) - mean_nu_plus_exact(params)
}

/// Quasi-adiabatic `⟨n₂⟩ ≈ β/(2πg²)`, flagged outside its window.
pub fn mean_n2_quasiadiabatic(params: &ModelParams) -> Flagged<f64> {
    Flagged::new(params.gamma_ratio(), quasi_adiabatic(params))
}

/// `η = 2⟨n₁⟩/⟨n⟩ − 1` from the exact tables.
pub fn asymmetry_eta(params: &ModelParams) -> Result<f64> {
    let n = mean_n_exact(params);
    if n == 0.0 {
        return Err(MlzError::Domain("asymmetry undefined: no pairs are produced".into()));
    }
    Ok(2.0 * mean_n1_exact(params) / n - 1.0)
}

/// Fast-sweep means `(⟨n₁⟩, ⟨n⟩) = (1/p − 1, 2(1−p)/p)` with `p = x^N`,
/// flagged unless `p > 1/N`.
pub fn fast_regime_means(params: &ModelParams) -> Flagged<(f64, f64)> {
    let a = -(params.n as f64) * params.ln_x();
    let n1 = a.exp_m1();
    let p = (-a).exp();
    let valid = params.n == 0 || p > 1.0 / params.n as f64;
    Flagged::new((n1, 2.0 * n1), valid)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn digamma_form_matches_enumeration() {
        let beta = -2.0 * PI / 0.95f64.ln();
        let p = ModelParams::new(2000, 1.0, beta, 0.0).unwrap();
        assert!(euler_regime(&p));
        let a = mean_nu_single(&p);
        let b = mean_nu_single_exact(&p);
        assert!((a - b).abs() < 1e-9 * b, "{a} vs {b}");
    }

    #[test]
    fn nu_plus_matches_enumeration() {
        let beta = -2.0 * PI / 0.99f64.ln();
        let p = ModelParams::new(1000, 1.0, beta, 0.0).unwrap();
        let a = mean_nu_plus(&p);
        let b = mean_nu_plus_exact(&p);
        assert!((a - b).abs() < 1e-8 * b, "{a} vs {b}");
    }

    #[test]
    fn zero_coupling_means() {
        let p = ModelParams::new(9, 0.0, 1.0, 0.0).unwrap();
        assert_eq!(mean_nu_single(&p), 9.0);
        assert_eq!(mean_nu_plus(&p), 9.0);
        assert!(asymmetry_eta(&p).is_err());
        assert_eq!(fast_regime_means(&p).value, (0.0, 0.0));
    }

    #[test]
    fn fast_means_half_survival() {
        let n = 10;
        let beta = 2.0 * PI * n as f64 / 2f64.ln();
        let p = ModelParams::new(n, 1.0, beta, 0.0).unwrap();
        let f = fast_regime_means(&p);
        assert!(f.valid);
        assert!((f.value.0 - 1.0).abs() < 1e-14 && (f.value.1 - 2.0).abs() < 1e-14);
    }

    #[test]
    fn n2_quasiadiabatic_value() {
        let p = ModelParams::new(100_000, 1.0, 200.0, 0.0).unwrap();
        let f = mean_n2_quasiadiabatic(&p);
        assert!((f.value - 200.0 / (2.0 * PI)).abs() < 1e-12);
        assert!(f.valid);
        let p = ModelParams::new(10, 1.0, 2.0 * PI, 0.0).unwrap();
        assert!((mean_n2_quasiadiabatic(&p).value - 1.0).abs() < 1e-15);
        assert!(!mean_n2_quasiadiabatic(&p).valid);
    }

    #[test]
    fn exact_n2_tracks_gamma_at_large_n() {
        let p = ModelParams::new(1000, 1.0, 2.0 * PI * 20.0, 0.0).unwrap();
        let n2 = mean_n2_exact(&p);
        assert!((n2 / 20.0 - 1.0).abs() < 0.05, "{n2}");
    }

    #[test]
    fn psi_constant() {
        assert!((PSI_UNIT_TWO - 0.422_784).abs() < 1e-6);
    }
}
