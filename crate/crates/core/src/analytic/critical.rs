use super::tables::single_channel_distribution;
use crate::error::{domain, MlzError, Result};
use crate::numeric::ln_one_minus_exp;
use crate::params::ModelParams;
use crate::tolerance::{ROOT_ABS_TOL, ROOT_BRACKET, ROOT_MAX_ITER};
use std::f64::consts::PI;

/// Critical sweep rate where the single-channel peak leaves `m = 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CriticalRate {
    /// Root of `x = 1 − x^N`.
    pub x_c: f64,
    pub beta_exact: f64,
    /// `2πg²N / (ln N − ln(ln N − ln ln N))`.
    pub beta_asymptotic: f64,
}

/// Solves `x_c = 1 − x_c^N` by bisection and converts to `β_c`.
pub fn critical_beta(n: usize, g: f64) -> Result<CriticalRate> {
    if n < 2 {
        return domain(format!("critical rate needs N >= 2, got {n}"));
    }
    if !(g > 0.0) {
        return domain(format!("critical rate needs g > 0, got {g}"));
    }
    let nf = n as f64;
    let f = |x: f64| x - 1.0 + (nf * x.ln()).exp();
    let (mut lo, mut hi) = ROOT_BRACKET;
    if !(f(lo) < 0.0 && f(hi) > 0.0) {
        return Err(MlzError::Bracket(format!("x = 1 - x^{n} not bracketed")));
    }
    for _ in 0..ROOT_MAX_ITER {
        let mid = 0.5 * (lo + hi);
        if f(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo < ROOT_ABS_TOL {
            break;
        }
    }
    let x_c = 0.5 * (lo + hi);
    let two_pi_g2 = 2.0 * PI * g * g;
    let ln_n = nf.ln();
    Ok(CriticalRate {
        x_c,
        beta_exact: two_pi_g2 / (-x_c.ln()),
        beta_asymptotic: two_pi_g2 * nf / (ln_n - (ln_n - ln_n.ln()).ln()),
    })
}

/// `q_c = 2πg²N/(β_c ln N)` from the exact root; independent of `g`.
pub fn critical_q(n: usize) -> Result<f64> {
    let c = critical_beta(n, 1.0)?;
    let nf = n as f64;
    Ok(2.0 * PI * nf / (c.beta_exact * nf.ln()))
}

/// `n_ex = −Γ ln(1 − e^{−1/Γ})`.
pub fn n_excitations(params: &ModelParams) -> f64 {
    let lx = params.ln_x();
    ln_one_minus_exp(lx) / lx
}

/// Scaling form `n_ex ≈ Γ ln Γ`.
pub fn n_excitations_scaling(params: &ModelParams) -> f64 {
    let big_g = params.gamma_ratio();
    big_g * big_g.ln()
}

/// `m_max = ⌈N − n_ex⌉` clamped to `[0, N]`; zero above the critical rate.
///
/// `P_{m+1}/P_m = (1 − x^{N−m})/x ≥ 1` exactly when `m ≤ N − n_ex`, so the
/// ceiling is the table's argmax, with ties going to the smaller `m`.
pub fn peak_position(params: &ModelParams) -> usize {
    if params.g == 0.0 {
        return 0;
    }
    if params.n >= 2 {
        if let Ok(c) = critical_beta(params.n, params.g) {
            if params.beta > c.beta_exact {
                return 0;
            }
        }
    }
    let m = params.n as f64 - n_excitations(params);
    // absorb rounding in n_ex so an exact tie reports the smaller index
    (m - 1e-9 * m.abs().max(1.0)).ceil().clamp(0.0, params.n as f64) as usize
}

/// Argmax of the exact single-channel table; ties go to the smaller `m`.
pub fn argmax_single_channel(params: &ModelParams) -> usize {
    single_channel_distribution(params).argmax()
}
