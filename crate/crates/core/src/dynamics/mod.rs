//! Time-dependent Schrödinger propagation and scattering readout.
//!
//! Every evolution runs along straight segments of the `(t, τ)` plane with an
//! adaptive Dormand-Prince 5(4) stepper. In the default interaction gauge the
//! diagonal phase is integrated in closed form from the term structure of the
//! model, so the stepper only resolves the couplings. Final amplitudes are
//! projected on instantaneous eigenvectors matched to basis labels.

mod config;
mod frame;
mod generator;
pub mod ode;
mod path;
mod phases;
mod propagate;
mod state;

pub use config::{default_window, Gauge, IntegrationConfig, Readout};
pub use frame::Frame;
pub use path::{two_time_evolve, TimePath};
pub use phases::{asymptotic_phase, extract_phases, log_phase_coefficient, tail_phase_correction, PhaseEntry};
pub use propagate::{
    distribution_label, propagate, propagate_observed, sweep, thermalization_run, transition_probabilities,
    Observer, Propagation, SweepResult, ThermalizationRun,
};
pub use state::StateVector;
