//! Classical limit of the two-channel model.
//!
//! Occupations `n₁, n₂` are momenta conjugate to the angles `φ₁, φ₂`
//! (`dφ/dt = ∂H/∂n`, `dn/dt = −∂H/∂φ`). The module provides the flow, its
//! commuting partner, the mean-field order parameter of the thermalization
//! stage and the quartic normal form near the first critical point.

mod certificate;
mod classical;
mod mean_field;
mod quartic;

pub use certificate::{
    classical_certificate, hamiltonian_d_epsilon, partner_d_t, random_states, ClassicalCertificate,
};
pub use classical::{
    classical_gradient, classical_hamiltonian, classical_partner, integrate_trajectory, partner_gradient,
    poisson_bracket, ClassicalState, Gradient, Trajectory, TrajectoryConfig,
};
pub use mean_field::{mean_field_crossing, mean_field_delta12, mean_field_delta12_squared, MeanFieldState};
pub use quartic::{canonical_from_actions, canonical_to_actions, quartic_normal_form, QuarticNormalForm, QuarticState};
