//! Numerical thresholds used across the crate, kept in one place.

/// Relative stopping criterion for q-series.
pub const SERIES_REL_TOL: f64 = 1e-15;
/// Absolute floor below which series terms are dropped.
pub const SERIES_ABS_FLOOR: f64 = 1e-300;
/// Term budget for directly summed series.
pub const SERIES_MAX_TERMS: usize = 1_000_000;

/// Bisection bracket for the critical-rate root.
pub const ROOT_BRACKET: (f64, f64) = (1e-12, 1.0 - 1e-12);
pub const ROOT_MAX_ITER: usize = 200;
pub const ROOT_ABS_TOL: f64 = 1e-14;

/// Normalization tolerance for closed-form tables.
pub const ANALYTIC_NORM_TOL: f64 = 1e-8;

/// Certification threshold for `[H, H']` and the mixed-derivative residual,
/// relative to `‖H‖‖H'‖`.
pub const CONSISTENCY_REL_TOL: f64 = 1e-11;
/// Minimum distance of a grid point from a `1/t` or `1/τ` pole.
pub const POLE_PROXIMITY: f64 = 1e-6;

/// Phases are not reported for amplitudes with `|S|²` below this.
pub const PHASE_AMPLITUDE_FLOOR: f64 = 1e-10;

/// Allowed overshoot of `n1 + n2` past `N` in classical trajectories.
pub const BOUNDARY_SLACK: f64 = 1e-9;

/// Start of `1/t` evolutions as a fraction of `min(1/ε, β/g²)`.
pub const INVERSE_TIME_START_FRACTION: f64 = 1e-6;
