//! Special functions behind the closed-form results: the q-Pochhammer
//! symbol, the q-digamma function, the Euler distribution and the argument
//! of the complex Gamma function.
//!
//! Products over `(1 − a x^k)` are carried in log space because the
//! quasi-adiabatic regime pushes `x` towards one with `N` up to `10⁵`.

mod gamma;
mod qseries;

pub use gamma::{arg_gamma, ln_gamma};
pub use qseries::{
    euler_distribution, euler_mean, ln_q_pochhammer, q_digamma, q_digamma_unit_limit, q_pochhammer,
    EulerDistributionParams, QPochhammerValue, QPochTable,
};

/// Euler–Mascheroni constant.
pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;
