//! Readout bases at the window edges.

use super::config::Readout;
use crate::error::{MlzError, Result};
use crate::model::HamiltonianSpec;
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

/// Columns indexed by basis label: the vector that continues basis state `m`.
#[derive(Debug, Clone, PartialEq)]
pub struct Frame {
    pub vectors: DMatrix<Complex64>,
    /// Instantaneous energies by label (diagonal entries for the diabatic frame).
    pub energies: Vec<f64>,
}

/// Eigen-decomposition of a real symmetric matrix with eigenvectors matched to
/// basis labels by largest component and signed so that component is positive.
pub(crate) fn labelled_eigen(h: &DMatrix<f64>, at: f64) -> Result<(DMatrix<f64>, Vec<f64>)> {
    let n = h.nrows();
    let eig = h.clone().symmetric_eigen();
    let mut vectors = DMatrix::zeros(n, n);
    let mut energies = vec![f64::NAN; n];
    let mut taken = vec![false; n];
    for k in 0..n {
        let col = eig.eigenvectors.column(k);
        let (m, v) = col.iter().enumerate().fold((0, 0.0f64), |best, (i, &x)| {
            if x.abs() > best.1.abs() { (i, x) } else { best }
        });
        if taken[m] || v * v < 0.5 {
            return Err(MlzError::Labelling(at));
        }
        taken[m] = true;
        vectors.set_column(m, &(col * v.signum()));
        energies[m] = eig.eigenvalues[k];
    }
    Ok((vectors, energies))
}

impl Frame {
    pub fn diabatic(spec: &HamiltonianSpec, t: f64, tau: f64) -> Result<Self> {
        let h = spec.materialize(t, tau)?;
        Ok(Self {
            vectors: DMatrix::identity(spec.dim, spec.dim),
            energies: h.diagonal().iter().copied().collect(),
        })
    }

    pub fn adiabatic(spec: &HamiltonianSpec, t: f64, tau: f64) -> Result<Self> {
        let (v, e) = labelled_eigen(&spec.materialize(t, tau)?, t)?;
        Ok(Self { vectors: v.map(|x| Complex64::new(x, 0.0)), energies: e })
    }

    /// `w_m = v_m − i Σ_{k≠m} v_k ⟨v_k|∂ₜH|v_m⟩ / (E_k − E_m)²`.
    pub fn superadiabatic(spec: &HamiltonianSpec, t: f64, tau: f64) -> Result<Self> {
        let (v, e) = labelled_eigen(&spec.materialize(t, tau)?, t)?;
        let hdot = spec.d_dt(t, tau)?;
        let n = spec.dim;
        let proj = v.transpose() * &hdot * &v;
        let mut w = v.map(|x| Complex64::new(x, 0.0));
        for m in 0..n {
            for k in 0..n {
                if k == m {
                    continue;
                }
                let gap = e[k] - e[m];
                let c = Complex64::new(0.0, -proj[(k, m)] / (gap * gap));
                for i in 0..n {
                    w[(i, m)] += c * v[(i, k)];
                }
            }
        }
        Ok(Self { vectors: w, energies: e })
    }

    pub fn for_readout(spec: &HamiltonianSpec, t: f64, tau: f64, readout: Readout) -> Result<Self> {
        match readout {
            Readout::Diabatic => Self::diabatic(spec, t, tau),
            Readout::Adiabatic => Self::adiabatic(spec, t, tau),
            Readout::Superadiabatic => Self::superadiabatic(spec, t, tau),
        }
    }

    /// Normalized frame vector for label `m`.
    pub fn state(&self, m: usize) -> DVector<Complex64> {
        let c = self.vectors.column(m);
        c / Complex64::new(c.norm(), 0.0)
    }

    /// `⟨w_m|ψ⟩ / ‖w_m‖` for every label.
    pub fn amplitudes(&self, psi: &DVector<Complex64>) -> DVector<Complex64> {
        DVector::from_iterator(
            self.vectors.ncols(),
            (0..self.vectors.ncols()).map(|m| {
                let c = self.vectors.column(m);
                c.dotc(psi) / c.norm()
            }),
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn labels_follow_diabatic_states() {
        let spec = HamiltonianSpec::lz2(1.0, 1.0).unwrap();
        let f = Frame::adiabatic(&spec, -50.0, 1.0).unwrap();
        assert!(f.vectors[(0, 0)].re > 0.99 && f.vectors[(1, 1)].re > 0.99);
        assert!((f.energies[0] - (-50.0 - 1.0 / 50.0)).abs() < 1e-5);
    }

    #[test]
    fn ambiguous_labels_rejected() {
        let spec = HamiltonianSpec::lz2(1.0, 1.0).unwrap();
        assert!(matches!(Frame::adiabatic(&spec, 0.0, 1.0), Err(MlzError::Labelling(_))));
    }

    #[test]
    fn superadiabatic_is_small_correction() {
        let spec = HamiltonianSpec::lz2(1.0, 1.0).unwrap();
        let a = Frame::adiabatic(&spec, 30.0, 1.0).unwrap();
        let s = Frame::superadiabatic(&spec, 30.0, 1.0).unwrap();
        let d = (&a.vectors - &s.vectors).norm();
        // g β / (βt)³ scale
        assert!(d > 1e-6 && d < 1e-4, "{d}");
    }
}
