//! Closed-form transition probabilities, means, phases and critical
//! quantities as pure functions of `(N, g, β)` and channel occupations.
//!
//! Probabilities are assembled in log space and exponentiated only when a
//! value or table is returned.

mod critical;
mod gibbs;
mod means;
mod phases;
mod tables;

pub use critical::{
    argmax_single_channel, critical_beta, critical_q, n_excitations, n_excitations_scaling,
    peak_position, CriticalRate,
};
pub use gibbs::{
    gibbs_delta_distribution, gibbs_mean_n2, gibbs_mean_n2_leading, gibbs_multichannel_ratio,
};
pub use means::{
    asymmetry_eta, euler_regime, fast_regime_means, mean_n1_exact, mean_n2_exact,
    mean_n2_quasiadiabatic, mean_n_exact, mean_nu_plus, mean_nu_plus_asymptotic,
    mean_nu_plus_exact, mean_nu_single, mean_nu_single_asymptotic, mean_nu_single_exact,
    quasi_adiabatic, PSI_UNIT_TWO,
};
pub use phases::{scattering_phases, scattering_phases_printed, scattering_phases_weak_limit};
pub use tables::{
    decaying_coupling_probabilities, do3_probabilities, ln_multi_channel_prob,
    ln_single_channel_pm, ln_two_channel_joint, ln_two_channel_total, multi_channel_prob,
    single_channel_distribution, single_channel_pm, two_channel_joint,
    two_channel_joint_distribution, two_channel_total, two_channel_total_distribution,
};
