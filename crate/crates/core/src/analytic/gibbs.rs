use crate::distribution::{Distribution, Label, Provenance};
use crate::error::{MlzError, Result};
use crate::numeric::ln_sinh;
use crate::params::ModelParams;
use std::f64::consts::PI;

/// Thermal distribution of `δn = n₂ − n₁` in a sector of `n` pairs:
/// `P_{δn} = e^{−δn/k_BT}/Z`, `k_BT = β/(πg²)`,
/// `Z = sinh((1+n)/k_BT)/sinh(1/k_BT)`. Labels run over `δn = −n, −n+2, …, n`.
pub fn gibbs_delta_distribution(n: usize, g: f64, beta: f64) -> Result<Distribution> {
    let params = ModelParams::new(n, g, beta, 0.0)?;
    let labels: Vec<Label> = (0..=n).map(|n2| Label::Index(2 * n2 as i64 - n as i64)).collect();
    let probs = if g == 0.0 {
        vec![1.0 / (n + 1) as f64; n + 1]
    } else {
        let inv_kt = PI * g * g / beta;
        let ln_z = ln_sinh((n + 1) as f64 * inv_kt) - ln_sinh(inv_kt);
        labels
            .iter()
            .map(|l| match *l {
                Label::Index(d) => (-(d as f64) * inv_kt - ln_z).exp(),
                Label::Pair(..) => unreachable!(),
            })
            .collect()
    };
    Ok(Distribution::new(labels, probs, Provenance::Analytic, Some(params)))
}

/// Exact thermal `⟨n₂⟩ = (⟨δn⟩ + n)/2` in a sector of `n` pairs.
pub fn gibbs_mean_n2(n: usize, g: f64, beta: f64) -> Result<f64> {
    let d = gibbs_delta_distribution(n, g, beta)?;
    Ok(0.5 * (d.mean() + n as f64))
}

/// Large-sector value `⟨n₂⟩ ≈ ½ coth(πg²/β) − ½`.
pub fn gibbs_mean_n2_leading(g: f64, beta: f64) -> f64 {
    0.5 / (PI * g * g / beta).tanh() - 0.5
}

/// `P(a)/P(b) = x^{Σ k a_k − Σ k b_k}` for equidistant channels (`k` counted
/// from one) at equal total occupation.
pub fn gibbs_multichannel_ratio(params: &ModelParams, a: &[usize], b: &[usize]) -> Result<f64> {
    let (ta, tb): (usize, usize) = (a.iter().sum(), b.iter().sum());
    if ta != tb {
        return Err(MlzError::Domain(format!(
            "configurations hold {ta} and {tb} pairs; the ratio is Boltzmann only at equal totals"
        )));
    }
    if ta > params.n {
        return Err(MlzError::OccupationOverflow { total: ta, n: params.n });
    }
    let weight = |c: &[usize]| -> i64 {
        c.iter().enumerate().map(|(k, &v)| (k as i64 + 1) * v as i64).sum()
    };
    let exponent = (weight(a) - weight(b)) as f64;
    Ok((exponent * params.ln_x()).exp())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn adjacent_ratio_is_x() {
        let d = gibbs_delta_distribution(50, 1.0, 50.0).unwrap();
        let x = (-2.0 * PI / 50.0f64).exp();
        for w in d.probs.windows(2) {
            assert!((w[1] / w[0] - x).abs() < 1e-12);
        }
        assert!((d.total() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn closed_form_partition_matches_sum() {
        let (n, g, beta) = (12usize, 0.8, 3.0);
        let inv_kt = PI * g * g / beta;
        let z: f64 = (0..=n).map(|k| (-((2 * k) as f64 - n as f64) * inv_kt).exp()).sum();
        let closed = ((n + 1) as f64 * inv_kt).sinh() / inv_kt.sinh();
        assert!((z / closed - 1.0).abs() < 1e-13);
    }

    #[test]
    fn large_sector_mean() {
        let m = gibbs_mean_n2(400, 1.0, 50.0).unwrap();
        assert!((m - gibbs_mean_n2_leading(1.0, 50.0)).abs() < 1e-9);
    }

    #[test]
    fn ratio_examples() {
        let p = ModelParams::new(20, 1.0, 5.0, 1.0).unwrap();
        assert_eq!(gibbs_multichannel_ratio(&p, &[1, 2, 3], &[1, 2, 3]).unwrap(), 1.0);
        let r = gibbs_multichannel_ratio(&p, &[2, 1, 3], &[1, 2, 3]).unwrap();
        assert!((r - 1.0 / p.x()).abs() < 1e-12);
        assert!(gibbs_multichannel_ratio(&p, &[1], &[2]).is_err());
    }
}
