use crate::error::{MlzError, Result};
use num_complex::Complex64;
use std::f64::consts::PI;

/// Coefficients `B_{2k} / (2k(2k−1))` of the Stirling series.
const STIRLING: [f64; 8] = [
    1.0 / 12.0,
    -1.0 / 360.0,
    1.0 / 1260.0,
    -1.0 / 1680.0,
    1.0 / 1188.0,
    -691.0 / 360_360.0,
    1.0 / 156.0,
    -3617.0 / 122_400.0,
];

/// Real part above which the Stirling series is used directly.
const STIRLING_MIN_RE: f64 = 15.0;

/// Principal branch of `ln Γ(z)`.
///
/// Shifts `z` right with `ln Γ(z) = ln Γ(z+n) − Σ ln(z+k)` and evaluates the
/// Stirling series there. Summing principal logs keeps the imaginary part
/// continuous off the negative real axis, unlike `ln` of the product.
pub fn ln_gamma(z: Complex64) -> Result<Complex64> {
    if !(z.re.is_finite() && z.im.is_finite()) {
        return Err(MlzError::Domain(format!("ln Gamma of non-finite {z}")));
    }
    if z.im == 0.0 && z.re <= 0.0 && z.re == z.re.round() {
        return Err(MlzError::Pole(z.re));
    }
    let shift = if z.re < STIRLING_MIN_RE {
        (STIRLING_MIN_RE - z.re).ceil() as usize
    } else {
        0
    };
    let mut correction = Complex64::new(0.0, 0.0);
    for k in 0..shift {
        correction += (z + k as f64).ln();
    }
    let w = z + shift as f64;
    let inv = 1.0 / w;
    let inv2 = inv * inv;
    let mut series = Complex64::new(0.0, 0.0);
    let mut pow = inv;
    for c in STIRLING {
        series += pow * c;
        pow *= inv2;
    }
    let stirling = (w - 0.5) * w.ln() - w + 0.5 * (2.0 * PI).ln() + series;
    Ok(stirling - correction)
}

/// Continuous argument of `Γ(z)`, i.e. `Im ln Γ(z)` on the principal branch.
pub fn arg_gamma(z: Complex64) -> Result<f64> {
    Ok(ln_gamma(z)?.im)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn real_values() {
        assert!(arg_gamma(Complex64::new(1.0, 0.0)).unwrap().abs() < 1e-15);
        assert!(arg_gamma(Complex64::new(2.0, 0.0)).unwrap().abs() < 1e-15);
        let l = ln_gamma(Complex64::new(0.5, 0.0)).unwrap();
        assert!((l.re - 0.5 * PI.ln()).abs() < 1e-14);
        let l = ln_gamma(Complex64::new(10.0, 0.0)).unwrap();
        assert!((l.re - 362_880f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn poles_are_rejected() {
        for r in [0.0, -1.0, -7.0] {
            assert!(matches!(ln_gamma(Complex64::new(r, 0.0)), Err(MlzError::Pole(_))));
        }
    }

    #[test]
    fn modulus_on_imaginary_axis() {
        // |Γ(iy)|² = π / (y sinh(πy))
        for y in [0.3, 1.0, 2.5, 7.0] {
            let l = ln_gamma(Complex64::new(0.0, y)).unwrap();
            let expect = 0.5 * (PI / (y * (PI * y).sinh())).ln();
            assert!((l.re - expect).abs() < 1e-13, "y={y}");
        }
    }

    #[test]
    fn recurrence_holds() {
        let z = Complex64::new(0.3, 1.7);
        let a = ln_gamma(z + 1.0).unwrap();
        let b = ln_gamma(z).unwrap() + z.ln();
        assert!((a - b).norm() < 1e-13);
    }
}
