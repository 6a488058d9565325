use crate::distribution::{Distribution, Label, Provenance};
use crate::error::{domain, MlzError, Result};
use crate::numeric::ln_one_minus_exp;
use crate::params::ModelParams;
use crate::specfun::{ln_q_pochhammer, QPochTable};
use std::f64::consts::PI;

/// Three-level Demkov-Osherov probabilities `(P₀₀, P₀₁, P₀₂)` from level 0.
pub fn do3_probabilities(g: f64, beta: f64) -> Result<(f64, f64, f64)> {
    if !(g >= 0.0 && beta > 0.0) {
        return domain(format!("need g >= 0 and beta > 0, got g = {g}, beta = {beta}"));
    }
    let lx = -2.0 * PI * g * g / beta;
    let x = lx.exp();
    let one_minus_x = -lx.exp_m1();
    Ok((x * x, one_minus_x, x * one_minus_x))
}

/// Two-level model with a `1/t` coupling: `(P₊₁, P₊₂)`.
pub fn decaying_coupling_probabilities(gamma: f64) -> Result<(f64, f64)> {
    if !(gamma >= 0.0) {
        return domain(format!("need gamma >= 0, got {gamma}"));
    }
    let e = (-2.0 * PI * gamma).exp();
    Ok((1.0 / (1.0 + e), e / (1.0 + e)))
}

fn check_index(index: usize, max: usize) -> Result<()> {
    if index > max {
        Err(MlzError::Index { index, max })
    } else {
        Ok(())
    }
}

/// `ln P_m` for the single-channel model.
pub fn ln_single_channel_pm(params: &ModelParams, m: usize) -> Result<f64> {
    check_index(m, params.n)?;
    let n = params.n;
    let lx = params.ln_x();
    Ok((n - m) as f64 * lx + ln_q_pochhammer((n - m + 1) as f64 * lx, lx, m))
}

/// Probability that `m` of `N` molecules dissociate:
/// `P_m = x^{N−m} (x^{N−m+1}, x)_m`.
pub fn single_channel_pm(params: &ModelParams, m: usize) -> Result<f64> {
    Ok(ln_single_channel_pm(params, m)?.exp())
}

fn single_logs(params: &ModelParams, table: &QPochTable) -> Vec<f64> {
    let n = params.n;
    let lx = params.ln_x();
    (0..=n)
        .map(|m| (n - m) as f64 * lx + table.ln_shifted(n - m + 1, m))
        .collect()
}

/// Full single-channel table over `m = 0..=N`.
pub fn single_channel_distribution(params: &ModelParams) -> Distribution {
    let table = QPochTable::new(params.ln_x(), params.n);
    let probs = single_logs(params, &table).into_iter().map(f64::exp).collect();
    let labels = (0..=params.n as i64).map(Label::Index).collect();
    Distribution::new(labels, probs, Provenance::Analytic, Some(*params))
}

/// `ln P_{n₁…n_s}` for channels ordered by increasing energy.
///
/// Each added channel contributes `x^{N − Σ₁^{s+1} n_k} (x^{N+1−Σ₁^{s+1} n_k}, x)_{n_{s+1}}`.
pub fn ln_multi_channel_prob(params: &ModelParams, occupations: &[usize]) -> Result<f64> {
    let total: usize = occupations.iter().sum();
    if total > params.n {
        return Err(MlzError::OccupationOverflow { total, n: params.n });
    }
    let lx = params.ln_x();
    let mut cumulative = 0;
    let mut acc = 0.0;
    for &k in occupations {
        cumulative += k;
        let remaining = (params.n - cumulative) as f64;
        acc += remaining * lx + ln_q_pochhammer((remaining + 1.0) * lx, lx, k);
    }
    Ok(acc)
}

pub fn multi_channel_prob(params: &ModelParams, occupations: &[usize]) -> Result<f64> {
    Ok(ln_multi_channel_prob(params, occupations)?.exp())
}

/// `ln P_{n₁,n₂}` for the two-channel model.
pub fn ln_two_channel_joint(params: &ModelParams, n1: usize, n2: usize) -> Result<f64> {
    ln_multi_channel_prob(params, &[n1, n2])
}

pub fn two_channel_joint(params: &ModelParams, n1: usize, n2: usize) -> Result<f64> {
    Ok(ln_two_channel_joint(params, n1, n2)?.exp())
}

/// Joint two-channel table in lexicographic `(n₁, n₂)` order.
pub fn two_channel_joint_distribution(params: &ModelParams) -> Distribution {
    let n = params.n;
    let lx = params.ln_x();
    let table = QPochTable::new(lx, n);
    let single = single_logs(params, &table);
    let mut labels = Vec::new();
    let mut probs = Vec::new();
    for n1 in 0..=n {
        for n2 in 0..=(n - n1) {
            let rest = n - n1 - n2;
            let lp = single[n1] + rest as f64 * lx + table.ln_shifted(rest + 1, n2);
            labels.push(Label::Pair(n1, n2));
            probs.push(lp.exp());
        }
    }
    Distribution::new(labels, probs, Provenance::Analytic, Some(*params))
}

fn ln_ratio_geometric(n: usize, lx: f64) -> f64 {
    // ln[(1 − x^{n+1}) / (1 − x)], with the x → 1 value ln(n+1)
    if lx == 0.0 {
        ((n + 1) as f64).ln()
    } else {
        ln_one_minus_exp((n + 1) as f64 * lx) - ln_one_minus_exp(lx)
    }
}

/// `ln P_n` for the total pair number in the two-channel model.
pub fn ln_two_channel_total(params: &ModelParams, n: usize) -> Result<f64> {
    check_index(n, params.n)?;
    let big = params.n;
    let lx = params.ln_x();
    Ok(2.0 * (big - n) as f64 * lx
        + ln_ratio_geometric(n, lx)
        + ln_q_pochhammer((big - n + 1) as f64 * lx, lx, n))
}

/// `P_n = x^{2(N−n)} (1 − x^{n+1})/(1 − x) · (x^{N−n+1}, x)_n`.
pub fn two_channel_total(params: &ModelParams, n: usize) -> Result<f64> {
    Ok(ln_two_channel_total(params, n)?.exp())
}

/// Table of the total pair number `n = n₁ + n₂`.
pub fn two_channel_total_distribution(params: &ModelParams) -> Distribution {
    let big = params.n;
    let lx = params.ln_x();
    let table = QPochTable::new(lx, big);
    let probs = (0..=big)
        .map(|n| {
            (2.0 * (big - n) as f64 * lx + ln_ratio_geometric(n, lx) + table.ln_shifted(big - n + 1, n))
                .exp()
        })
        .collect();
    let labels = (0..=big as i64).map(Label::Index).collect();
    Distribution::new(labels, probs, Provenance::Analytic, Some(*params))
}
