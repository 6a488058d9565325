//! Small numerical helpers shared across modules.

/// Neumaier-compensated running sum.
#[derive(Debug, Clone, Copy, Default)]
pub struct KahanSum {
    sum: f64,
    comp: f64,
}

impl KahanSum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, v: f64) {
        let t = self.sum + v;
        if self.sum.abs() >= v.abs() {
            self.comp += (self.sum - t) + v;
        } else {
            self.comp += (v - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

impl FromIterator<f64> for KahanSum {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut s = KahanSum::new();
        for v in iter {
            s.add(v);
        }
        s
    }
}

/// Compensated sum of an iterator.
pub fn kahan_sum<I: IntoIterator<Item = f64>>(iter: I) -> f64 {
    iter.into_iter().collect::<KahanSum>().value()
}

/// `ln(1 - e^u)` for `u <= 0`, accurate at both ends.
pub fn ln_one_minus_exp(u: f64) -> f64 {
    if u > -std::f64::consts::LN_2 {
        (-u.exp_m1()).ln()
    } else {
        (-u.exp()).ln_1p()
    }
}

/// `ln(sinh(y))` for `y > 0` without overflow.
pub fn ln_sinh(y: f64) -> f64 {
    if y > 20.0 {
        y - std::f64::consts::LN_2 + (-(-2.0 * y).exp()).ln_1p()
    } else {
        y.sinh().ln()
    }
}

/// Log of a sum of exponentials.
pub fn log_sum_exp(values: &[f64]) -> f64 {
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return max;
    }
    max + kahan_sum(values.iter().map(|v| (v - max).exp())).ln()
}

/// Wrap an angle into (-π, π].
pub fn wrap_angle(a: f64) -> f64 {
    let two_pi = std::f64::consts::TAU;
    let mut r = a.rem_euclid(two_pi);
    if r > std::f64::consts::PI {
        r -= two_pi;
    }
    r
}

/// Gauss-Legendre nodes and weights on `[-1, 1]`, by Newton iteration on `P_n`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, z);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * z * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (z * p1 - p0) / (z * z - 1.0);
            let dz = p1 / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        w[i] = 2.0 / ((1.0 - z * z) * dp * dp);
        w[n - 1 - i] = w[i];
    }
    (x, w)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn compensated_sum_recovers_small_terms() {
        let mut v = vec![1.0];
        v.extend(std::iter::repeat(1e-16).take(10_000));
        assert!((kahan_sum(v) - (1.0 + 1e-12)).abs() < 1e-15);
    }

    #[test]
    fn ln_one_minus_exp_matches_naive_in_safe_range() {
        for &u in &[-0.01, -0.5, -1.0, -5.0] {
            let naive = (1.0 - f64::exp(u)).ln();
            assert!((ln_one_minus_exp(u) - naive).abs() < 1e-12 * naive.abs().max(1e-300));
        }
        assert_eq!(ln_one_minus_exp(0.0), f64::NEG_INFINITY);
    }

    #[test]
    fn ln_sinh_is_continuous_at_switch() {
        let a = ln_sinh(20.0 - 1e-12);
        let b = ln_sinh(20.0 + 1e-12);
        assert!((a - b).abs() < 1e-10);
        assert!((ln_sinh(800.0) - (800.0 - std::f64::consts::LN_2)).abs() < 1e-12);
    }

    #[test]
    fn wrap_angle_range() {
        assert!((wrap_angle(3.0 * std::f64::consts::PI) - std::f64::consts::PI).abs() < 1e-12);
        assert!((wrap_angle(-0.5) + 0.5).abs() < 1e-15);
    }

    #[test]
    fn gauss_legendre_integrates_polynomials() {
        let (x, w) = gauss_legendre(30);
        assert!((w.iter().sum::<f64>() - 2.0).abs() < 1e-14);
        let m58: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(58)).sum();
        assert!((m58 - 2.0 / 59.0).abs() < 1e-14);
        let (x1, w1) = gauss_legendre(1);
        assert_eq!((x1[0], w1[0]), (0.0, 2.0));
        let (x3, _) = gauss_legendre(3);
        assert!((x3[2] - 0.6f64.sqrt()).abs() < 1e-15);
    }
}
