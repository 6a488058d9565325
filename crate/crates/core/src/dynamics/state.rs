use crate::error::{MlzError, Result};
use crate::model::{BasisLabel, HamiltonianSpec};
use nalgebra::DVector;
use num_complex::Complex64;

/// Amplitudes over a model basis at a point `(t, τ)` of the time plane.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    pub amplitudes: DVector<Complex64>,
    pub basis: Vec<BasisLabel>,
    pub t: f64,
    pub tau: f64,
}

impl StateVector {
    pub fn new(amplitudes: DVector<Complex64>, basis: Vec<BasisLabel>, t: f64, tau: f64) -> Result<Self> {
        if amplitudes.len() != basis.len() {
            return Err(MlzError::Domain(format!(
                "{} amplitudes for a basis of {}",
                amplitudes.len(),
                basis.len()
            )));
        }
        Ok(Self { amplitudes, basis, t, tau })
    }

    /// Basis state `index` of `spec` at `(t, τ)`.
    pub fn basis_state(spec: &HamiltonianSpec, index: usize, t: f64, tau: f64) -> Result<Self> {
        if index >= spec.dim {
            return Err(MlzError::Index { index, max: spec.dim.saturating_sub(1) });
        }
        let mut a = DVector::zeros(spec.dim);
        a[index] = Complex64::new(1.0, 0.0);
        Self::new(a, spec.basis.clone(), t, tau)
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes.norm()
    }

    pub fn probabilities(&self) -> Vec<f64> {
        self.amplitudes.iter().map(|z| z.norm_sqr()).collect()
    }

    /// `|⟨self|other⟩|`.
    pub fn overlap(&self, other: &Self) -> f64 {
        self.amplitudes.dotc(&other.amplitudes).norm()
    }
}
