//! Numerical laboratory for the driven bosonic Tavis-Cummings model and
//! related multistate Landau-Zener problems.
//!
//! - [`specfun`]: q-series special functions and the complex Gamma argument.
//! - [`analytic`]: closed-form probabilities, means, phases and critical rates.
//! - [`model`]: dense Hamiltonian builders over documented Fock bases.
//! - [`dynamics`]: Schrödinger propagation, probability and phase extraction.
//! - [`integrability`]: commutator and path-deformation certificates.
//! - [`semiclassical`]: classical Hamiltonian flow and mean-field limits.

pub mod analytic;
pub mod distribution;
pub mod dynamics;
pub mod error;
pub mod integrability;
pub mod model;
pub mod numeric;
pub mod params;
pub mod semiclassical;
pub mod specfun;
pub mod tolerance;

pub use distribution::{Distribution, Flagged, Label, Provenance};
pub use error::{MlzError, Result};
pub use params::ModelParams;

/// Crate version, recorded in experiment metadata.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
