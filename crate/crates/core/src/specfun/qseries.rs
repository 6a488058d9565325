use crate::distribution::{Distribution, Label, Provenance};
use crate::error::{domain, MlzError, Result};
use crate::numeric::{kahan_sum, ln_one_minus_exp, KahanSum};
use crate::tolerance::{SERIES_ABS_FLOOR, SERIES_MAX_TERMS, SERIES_REL_TOL};

/// `(a, x)_q` stored as its logarithm.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QPochhammerValue {
    /// Natural log of the product; `−∞` encodes an exact zero.
    pub log_value: f64,
    /// `+1`, or `0` when a factor vanishes.
    pub sign: i8,
}

impl QPochhammerValue {
    const ONE: Self = Self { log_value: 0.0, sign: 1 };
    const ZERO: Self = Self { log_value: f64::NEG_INFINITY, sign: 0 };

    fn from_log(log_value: f64) -> Self {
        if log_value == f64::NEG_INFINITY {
            Self::ZERO
        } else {
            Self { log_value, sign: 1 }
        }
    }

    pub fn value(&self) -> f64 {
        if self.sign == 0 {
            0.0
        } else {
            self.log_value.exp()
        }
    }
}

/// `(a, x)_q = Π_{k<q} (1 − a x^k)`.
///
/// `x = 1` is accepted and gives `(1 − a)^q`.
pub fn q_pochhammer(a: f64, x: f64, q: usize) -> Result<QPochhammerValue> {
    if !(0.0..=1.0).contains(&a) {
        return domain(format!("q-Pochhammer needs 0 <= a <= 1, got a = {a}"));
    }
    if !(0.0..=1.0).contains(&x) {
        return domain(format!("q-Pochhammer needs 0 <= x <= 1, got x = {x}"));
    }
    if q == 0 || a == 0.0 {
        return Ok(QPochhammerValue::ONE);
    }
    if x == 1.0 {
        return Ok(QPochhammerValue::from_log(q as f64 * (-a).ln_1p()));
    }
    if x == 0.0 {
        return Ok(QPochhammerValue::from_log((-a).ln_1p()));
    }
    Ok(QPochhammerValue::from_log(ln_q_pochhammer(a.ln(), x.ln(), q)))
}

/// `ln (a, x)_q` from `ln a ≤ 0` and `ln x ≤ 0`, avoiding the round trip
/// through `a = e^{ln a}` when `a` underflows.
pub fn ln_q_pochhammer(ln_a: f64, ln_x: f64, q: usize) -> f64 {
    if q == 0 || ln_a == f64::NEG_INFINITY {
        return 0.0;
    }
    let floor = SERIES_ABS_FLOOR.ln();
    let mut s = KahanSum::new();
    for k in 0..q {
        let u = ln_a + k as f64 * ln_x;
        if u < floor {
            break;
        }
        let f = ln_one_minus_exp(u);
        if f == f64::NEG_INFINITY {
            return f;
        }
        s.add(f);
    }
    s.value()
}

/// Prefix sums `S(j) = Σ_{i=1}^{j} ln(1 − x^i)` for `j = 0..=n`.
///
/// Any `(x^{j+1}, x)_m` with `j + m ≤ n` is then `S(j+m) − S(j)`, which makes
/// whole probability tables `O(N)` instead of `O(N²)`.
#[derive(Debug, Clone)]
pub struct QPochTable {
    ln_x: f64,
    prefix: Vec<f64>,
}

impl QPochTable {
    /// Table for `ln x = ln_x ≤ 0`. `ln_x = 0` (x = 1) makes every factor zero.
    pub fn new(ln_x: f64, n: usize) -> Self {
        let mut prefix = Vec::with_capacity(n + 1);
        prefix.push(0.0);
        let mut s = KahanSum::new();
        for i in 1..=n {
            let f = ln_one_minus_exp(i as f64 * ln_x);
            if f == f64::NEG_INFINITY {
                prefix.resize(n + 1, f64::NEG_INFINITY);
                break;
            }
            s.add(f);
            prefix.push(s.value());
        }
        Self { ln_x, prefix }
    }

    pub fn ln_x(&self) -> f64 {
        self.ln_x
    }

    pub fn len(&self) -> usize {
        self.prefix.len() - 1
    }

    pub fn is_empty(&self) -> bool {
        self.prefix.len() == 1
    }

    /// `ln (x^{start}, x)_m` for `start ≥ 1`; equals `S(start+m−1) − S(start−1)`.
    pub fn ln_shifted(&self, start: usize, m: usize) -> f64 {
        if m == 0 {
            return 0.0;
        }
        debug_assert!(start >= 1 && start + m - 1 <= self.len());
        let hi = self.prefix[start + m - 1];
        let lo = self.prefix[start - 1];
        if hi == f64::NEG_INFINITY {
            f64::NEG_INFINITY
        } else {
            hi - lo
        }
    }

    /// `ln (x, x)_ν`.
    pub fn ln_x_factorial(&self, nu: usize) -> f64 {
        self.prefix[nu]
    }
}

/// `Σ_{n≥0} 1/(e^{c(n+y0)} − 1)` with `c > 0`, `y0 > 0`.
///
/// This is the Lambert-type series behind both the q-digamma function
/// (`c = −ln q`, `y0 = z`) and the Euler mean (`c = −ln x`, `α = e^{−c y0}`).
/// Summed directly when that converges within the term budget, otherwise by
/// Euler–Maclaurin on the tail.
fn lambert_sum(c: f64, y0: f64, tol: f64) -> Result<f64> {
    let tol = tol.max(SERIES_REL_TOL);
    // Terms decay like e^{-cn}; estimate how many are needed.
    let needed = (1.0 / tol).ln() / c + y0;
    if needed < 0.5 * SERIES_MAX_TERMS as f64 {
        direct_lambert(c, y0, tol)
    } else {
        Ok(euler_maclaurin_lambert(c, y0))
    }
}

fn direct_lambert(c: f64, y0: f64, tol: f64) -> Result<f64> {
    let mut s = KahanSum::new();
    for n in 0..SERIES_MAX_TERMS {
        let term = 1.0 / (c * (n as f64 + y0)).exp_m1();
        s.add(term);
        let total = s.value();
        if term <= tol * total.abs() || term < SERIES_ABS_FLOOR {
            return Ok(total);
        }
    }
    Err(MlzError::Convergence { terms: SERIES_MAX_TERMS })
}

/// Bernoulli numbers `B_2, B_4, …, B_16`.
const BERNOULLI: [f64; 8] = [
    1.0 / 6.0,
    -1.0 / 30.0,
    1.0 / 42.0,
    -1.0 / 30.0,
    5.0 / 66.0,
    -691.0 / 2730.0,
    7.0 / 6.0,
    -3617.0 / 510.0,
];

fn euler_maclaurin_lambert(c: f64, y0: f64) -> f64 {
    const HEAD: usize = 16;
    let mut s = KahanSum::new();
    for n in 0..HEAD {
        s.add(1.0 / (c * (n as f64 + y0)).exp_m1());
    }
    let y = HEAD as f64 + y0;
    let u = c * y;
    let h = 1.0 / u.exp_m1();
    // ∫_y^∞ dn / (e^{cn} − 1)
    s.add(-ln_one_minus_exp(-u) / c);
    s.add(0.5 * h);
    // Derivatives of h(u) = 1/(e^u − 1) as polynomials in h:
    // P_0 = h, P_{k+1}(h) = P_k'(h) · (−h − h²).
    let mut poly: Vec<f64> = vec![0.0, 1.0];
    let mut fact = 1.0; // (2j)!
    for (j, b) in BERNOULLI.iter().enumerate() {
        let order = 2 * j + 1;
        while poly.len() < order + 2 {
            poly = derive_poly(&poly);
        }
        let deriv = eval_poly(&poly, h) * c.powi(order as i32);
        fact *= ((2 * j + 1) * (2 * j + 2)) as f64;
        s.add(-b / fact * deriv);
        poly = derive_poly(&poly);
    }
    s.value()
}

fn derive_poly(p: &[f64]) -> Vec<f64> {
    // d/du P(h(u)) = P'(h) · (−h − h²)
    let mut out = vec![0.0; p.len() + 1];
    for (k, &a) in p.iter().enumerate().skip(1) {
        let d = a * k as f64;
        out[k] -= d;
        out[k + 1] -= d;
    }
    out
}

fn eval_poly(p: &[f64], h: f64) -> f64 {
    p.iter().rev().fold(0.0, |acc, &a| acc * h + a)
}

/// `ψ_q(z) = −ln(1−q) + ln q · Σ_{n≥0} q^{n+z}/(1 − q^{n+z})`.
pub fn q_digamma(q: f64, z: f64, tol: f64) -> Result<f64> {
    if !(q > 0.0 && q < 1.0) {
        return domain(format!("q-digamma needs 0 < q < 1, got q = {q}"));
    }
    if !(z > 0.0 && z.is_finite()) {
        return domain(format!("q-digamma needs z > 0, got z = {z}"));
    }
    let c = -q.ln();
    let s = lambert_sum(c, z, tol)?;
    Ok(-(1.0 - q).ln() - c * s)
}

/// `lim_{q→1⁻} ψ_q(z)` by Richardson extrapolation from `q = 1 − 1e-8`
/// and `q = 1 − 2e-8`.
pub fn q_digamma_unit_limit(z: f64) -> Result<f64> {
    let h = 1e-8;
    let a = q_digamma(1.0 - h, z, SERIES_REL_TOL)?;
    let b = q_digamma(1.0 - 2.0 * h, z, SERIES_REL_TOL)?;
    Ok(2.0 * a - b)
}

/// `Σ_{j≥0} α x^j / (1 − α x^j)`, the mean of the Euler distribution.
pub fn euler_mean(alpha: f64, x: f64) -> Result<f64> {
    if !(x > 0.0 && x < 1.0) {
        return domain(format!("Euler mean needs 0 < x < 1, got x = {x}"));
    }
    if !(0.0..1.0).contains(&alpha) {
        return domain(format!("Euler mean diverges unless 0 <= alpha < 1, got {alpha}"));
    }
    if alpha == 0.0 {
        return Ok(0.0);
    }
    let c = -x.ln();
    lambert_sum(c, -alpha.ln() / c, SERIES_REL_TOL)
}

/// Parameters of the Euler distribution `P(ν) ∝ α^ν / (x, x)_ν`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EulerDistributionParams {
    pub alpha: f64,
    pub x: f64,
    pub cutoff: usize,
}

impl EulerDistributionParams {
    const TAIL_BUDGET: f64 = 1e-14;

    /// Checks the ranges and that the discarded tail is below `1e-14`.
    pub fn new(alpha: f64, x: f64, cutoff: usize) -> Result<Self> {
        let p = Self { alpha, x, cutoff };
        p.validate()?;
        Ok(p)
    }

    /// Smallest cutoff meeting the tail budget.
    pub fn with_auto_cutoff(alpha: f64, x: f64) -> Result<Self> {
        let mut p = Self { alpha, x, cutoff: 0 };
        p.check_ranges()?;
        while p.tail_bound() >= Self::TAIL_BUDGET {
            p.cutoff += 1;
            if p.cutoff > SERIES_MAX_TERMS {
                return Err(MlzError::Convergence { terms: SERIES_MAX_TERMS });
            }
        }
        Ok(p)
    }

    fn check_ranges(&self) -> Result<()> {
        if !(0.0..1.0).contains(&self.alpha) {
            return domain(format!("Euler distribution needs 0 <= alpha < 1, got {}", self.alpha));
        }
        if !(self.x > 0.0 && self.x < 1.0) {
            return domain(format!("Euler distribution needs 0 < x < 1, got {}", self.x));
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        self.check_ranges()?;
        let tail = self.tail_bound();
        if tail >= Self::TAIL_BUDGET {
            return domain(format!(
                "cutoff {} leaves tail mass up to {tail:e}",
                self.cutoff
            ));
        }
        Ok(())
    }

    /// Upper bound on the mass beyond `cutoff`, relative to the kept mass.
    ///
    /// The term ratio `α/(1 − x^{ν+1})` decreases in ν, so the tail is
    /// dominated by a geometric series from the last kept term.
    pub fn tail_bound(&self) -> f64 {
        if self.alpha == 0.0 {
            return 0.0;
        }
        let nu = self.cutoff;
        let r = self.alpha / (-((nu + 1) as f64 * self.x.ln()).exp_m1());
        if r >= 1.0 {
            return f64::INFINITY;
        }
        let logs = euler_log_weights(self.alpha, self.x, nu);
        let norm = crate::numeric::log_sum_exp(&logs);
        (logs[nu] - norm).exp() * r / (1.0 - r)
    }
}

fn euler_log_weights(alpha: f64, x: f64, cutoff: usize) -> Vec<f64> {
    let table = QPochTable::new(x.ln(), cutoff);
    let la = if alpha == 0.0 { f64::NEG_INFINITY } else { alpha.ln() };
    (0..=cutoff)
        .map(|nu| {
            if nu == 0 {
                0.0
            } else {
                nu as f64 * la - table.ln_x_factorial(nu)
            }
        })
        .collect()
}

/// Normalized Euler distribution over `ν = 0..=cutoff`.
pub fn euler_distribution(params: EulerDistributionParams) -> Result<Distribution> {
    params.validate()?;
    let logs = euler_log_weights(params.alpha, params.x, params.cutoff);
    let norm = crate::numeric::log_sum_exp(&logs);
    let probs: Vec<f64> = logs.iter().map(|l| (l - norm).exp()).collect();
    let total = kahan_sum(probs.iter().copied());
    let probs = probs.into_iter().map(|p| p / total).collect();
    let labels = (0..=params.cutoff as i64).map(Label::Index).collect();
    Ok(Distribution::new(labels, probs, Provenance::Analytic, None))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::specfun::EULER_GAMMA;

    fn direct_product(a: f64, x: f64, q: usize) -> f64 {
        (0..q).map(|k| 1.0 - a * x.powi(k as i32)).product()
    }

    #[test]
    fn pochhammer_small_cases() {
        assert_eq!(q_pochhammer(0.3, 0.5, 0).unwrap().value(), 1.0);
        assert!((q_pochhammer(0.3, 0.5, 1).unwrap().value() - 0.7).abs() < 1e-15);
        assert!((q_pochhammer(0.5, 0.5, 2).unwrap().value() - 0.375).abs() < 1e-15);
    }

    #[test]
    fn pochhammer_matches_direct_product() {
        for &a in &[0.0, 0.1, 0.5, 0.9] {
            for &x in &[0.0, 0.2, 0.5, 0.9] {
                for q in [0, 1, 5, 20, 50] {
                    let v = q_pochhammer(a, x, q).unwrap().value();
                    let d = direct_product(a, x, q);
                    assert!((v - d).abs() <= 1e-12 * d, "a={a} x={x} q={q}: {v} vs {d}");
                }
            }
        }
    }

    #[test]
    fn pochhammer_edges() {
        let z = q_pochhammer(1.0, 0.5, 3).unwrap();
        assert_eq!(z.sign, 0);
        assert_eq!(z.value(), 0.0);
        let one = q_pochhammer(0.25, 1.0, 3).unwrap();
        assert!((one.value() - 0.75f64.powi(3)).abs() < 1e-15);
        assert!(q_pochhammer(1.1, 0.5, 2).is_err());
        assert!(q_pochhammer(0.5, 1.5, 2).is_err());
    }

    #[test]
    fn table_matches_pochhammer() {
        let x: f64 = 0.93;
        let t = QPochTable::new(x.ln(), 60);
        for (start, m) in [(1usize, 0usize), (1, 10), (5, 20), (30, 31)] {
            let a = x.powi(start as i32);
            let v = q_pochhammer(a, x, m).unwrap().log_value;
            assert!((t.ln_shifted(start, m) - v).abs() < 1e-12);
        }
    }

    fn brute_digamma(q: f64, z: f64, terms: usize) -> f64 {
        let s: f64 = (0..terms)
            .map(|n| {
                let p = q.powf(n as f64 + z);
                p / (1.0 - p)
            })
            .sum();
        -(1.0 - q).ln() + q.ln() * s
    }

    #[test]
    fn digamma_half_matches_brute_force() {
        let v = q_digamma(0.5, 1.0, 1e-16).unwrap();
        assert!((v - brute_digamma(0.5, 1.0, 200)).abs() < 1e-14);
    }

    #[test]
    fn digamma_unit_limits() {
        let a = q_digamma_unit_limit(1.0).unwrap();
        let b = q_digamma_unit_limit(2.0).unwrap();
        assert!((a + EULER_GAMMA).abs() < 1e-7, "{a}");
        assert!((b - 0.422_784_335_098_467_1).abs() < 1e-7, "{b}");
    }

    #[test]
    fn euler_maclaurin_agrees_with_direct_where_both_work() {
        for &(c, y0) in &[(1e-3, 1.0), (3e-4, 2.0), (1e-4, 0.5)] {
            let d = direct_lambert(c, y0, 1e-16).unwrap();
            let e = euler_maclaurin_lambert(c, y0);
            assert!((d - e).abs() < 1e-12 * d, "c={c} y0={y0}: {d} vs {e}");
        }
    }

    #[test]
    fn euler_mean_forms_agree() {
        let x: f64 = 0.9;
        let series = euler_mean(x, x).unwrap();
        let dig = ((1.0 - x).ln() + q_digamma(x, 1.0, 1e-16).unwrap()) / x.ln();
        assert!((series - dig).abs() < 1e-10);
        assert_eq!(euler_mean(0.0, 0.5).unwrap(), 0.0);
        assert!(euler_mean(1.0, 0.5).is_err());
    }

    #[test]
    fn euler_distribution_mean_matches_closed_form() {
        let p = EulerDistributionParams::new(0.5, 0.5, 200).unwrap();
        let d = euler_distribution(p).unwrap();
        assert!((d.total() - 1.0).abs() < 1e-12);
        let brute: f64 = {
            let mut w = vec![1.0f64];
            for nu in 1..=200usize {
                let prev = w[nu - 1];
                w.push(prev * 0.5 / (1.0 - 0.5f64.powi(nu as i32)));
            }
            let z: f64 = w.iter().sum();
            w.iter().enumerate().map(|(i, v)| i as f64 * v / z).sum()
        };
        assert!((d.mean() - brute).abs() < 1e-12);
        assert!((d.mean() - euler_mean(0.5, 0.5).unwrap()).abs() < 1e-10);
    }

    #[test]
    fn euler_distribution_alpha_zero_is_point_mass() {
        let p = EulerDistributionParams::with_auto_cutoff(0.0, 0.3).unwrap();
        let d = euler_distribution(p).unwrap();
        assert_eq!(d.probs[0], 1.0);
    }

    #[test]
    fn short_cutoff_is_rejected() {
        assert!(EulerDistributionParams::new(0.9, 0.9, 5).is_err());
        let p = EulerDistributionParams::with_auto_cutoff(0.9, 0.9).unwrap();
        assert!(p.tail_bound() < 1e-14);
    }
}
