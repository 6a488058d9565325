use mlzlab_core::analytic::{decaying_coupling_probabilities, do3_probabilities, single_channel_pm};
use mlzlab_core::dynamics::*;
use mlzlab_core::model::HamiltonianSpec;
use mlzlab_core::{MlzError, ModelParams};
use nalgebra::DVector;
use num_complex::Complex64;
use std::f64::consts::PI;

fn probs(psi: &DVector<Complex64>) -> Vec<f64> {
    psi.iter().map(|z| z.norm_sqr()).collect()
}

#[test]
fn zero_hamiltonian_leaves_state_unchanged() {
    let spec = HamiltonianSpec::decaying_coupling(0.0, 0.0).unwrap();
    let psi0 = StateVector::new(
        DVector::from_vec(vec![Complex64::new(0.6, 0.0), Complex64::new(0.0, 0.8)]),
        spec.basis.clone(),
        1.0,
        1.0,
    )
    .unwrap();
    let out = propagate(&spec, &psi0, 1.0, 7.0, &IntegrationConfig::default()).unwrap();
    assert!((&out.state.amplitudes - &psi0.amplitudes).norm() < 1e-15);
    assert_eq!(out.state.t, 7.0);
}

#[test]
fn landau_zener_survival() {
    for &g in &[0.3, 0.5] {
        let spec = HamiltonianSpec::lz2(2f64.sqrt() * g, 1.0).unwrap();
        let d = transition_probabilities(&spec, &IntegrationConfig::for_spec(&spec)).unwrap();
        let exact = (-4.0 * PI * g * g).exp();
        assert!((d.probs[0] - exact).abs() < 1e-4, "g={g}: {} vs {exact}", d.probs[0]);
        assert!((d.total() - 1.0).abs() < 1e-8);
    }
}

#[test]
fn do3_matches_closed_form_and_conserves_norm() {
    let spec = HamiltonianSpec::do3(1.0, 4.0 * PI, 1.0).unwrap();
    let r = sweep(&spec, &IntegrationConfig::for_spec(&spec)).unwrap();
    let (a, b, c) = do3_probabilities(1.0, 4.0 * PI).unwrap();
    let p = probs(&r.amplitudes);
    assert!((p[0] - a).abs() < 2e-3 && (p[1] - b).abs() < 2e-3 && (p[2] - c).abs() < 2e-3);
    assert!(r.max_norm_drift < 1e-9, "{}", r.max_norm_drift);
}

#[test]
fn single_channel_small_n() {
    let p = ModelParams::new(4, 1.0, 10.0, 0.0).unwrap();
    let spec = HamiltonianSpec::tc_single(&p).unwrap();
    let d = transition_probabilities(&spec, &IntegrationConfig::for_spec(&spec)).unwrap();
    for m in 0..=4 {
        assert!((d.probs[m] - single_channel_pm(&p, m).unwrap()).abs() < 5e-3);
    }
}

#[test]
fn gauges_agree() {
    let spec = HamiltonianSpec::do3(0.7, 5.0, 1.0).unwrap();
    let cfg = IntegrationConfig::for_spec(&spec).with_window(12.0).with_tolerances(1e-11, 1e-13);
    let a = transition_probabilities(&spec, &cfg).unwrap();
    let b = transition_probabilities(&spec, &cfg.with_gauge(Gauge::Lab)).unwrap();
    assert!(a.max_abs_diff(&b) < 10.0 * cfg.rel_tol, "{}", a.max_abs_diff(&b));
}

#[test]
fn fixed_step_convergence_order() {
    // smooth segment around the crossing
    let spec = HamiltonianSpec::lz2(1.0, 1.0).unwrap();
    let psi0 = StateVector::basis_state(&spec, 0, -3.0, 1.0).unwrap();
    let run = |h: f64| {
        let cfg = IntegrationConfig { fixed_step: Some(h), ..IntegrationConfig::default() };
        probs(&propagate(&spec, &psi0, -3.0, 3.0, &cfg).unwrap().state.amplitudes)[0]
    };
    let reference = run(1e-3);
    let e1 = (run(0.2) - reference).abs();
    let e2 = (run(0.1) - reference).abs();
    assert!(e1 / e2 >= 16.0, "ratio {}", e1 / e2);
}

#[test]
fn two_channel_epsilon_invariance_small() {
    let mut tables = Vec::new();
    for &eps in &[0.5, 2.0] {
        let p = ModelParams::new(2, 1.0, 10.0, eps).unwrap();
        let spec = HamiltonianSpec::tc_two_channel(&p).unwrap();
        tables.push(transition_probabilities(&spec, &IntegrationConfig::for_spec(&spec)).unwrap());
    }
    assert!(tables[0].max_abs_diff(&tables[1]) < 3e-3);
}

#[test]
fn phases_self_converge_under_window_doubling() {
    let p = ModelParams::new(2, 0.8, 1.0, 0.0).unwrap();
    let cfg = IntegrationConfig::default().with_readout(Readout::Superadiabatic).with_tolerances(1e-11, 1e-13);
    let a = extract_phases(&p, &cfg.with_window(40.0)).unwrap();
    let b = extract_phases(&p, &cfg.with_window(80.0)).unwrap();
    assert_eq!(a[0].phase, Some(0.0));
    for (x, y) in a.iter().zip(&b) {
        let d = mlzlab_core::numeric::wrap_angle(x.value().unwrap() - y.value().unwrap());
        assert!(d.abs() < 1e-2, "m={}: {d}", x.m);
    }
}

#[test]
fn tiny_amplitude_has_no_phase() {
    let p = ModelParams::new(3, 2.0, 1.0, 0.0).unwrap();
    let cfg = IntegrationConfig::default().with_readout(Readout::Superadiabatic);
    let ph = extract_phases(&p, &cfg).unwrap();
    assert!(matches!(ph[0].value(), Err(MlzError::AmplitudeTooSmall(_))));
    assert!(ph[3].value().is_ok());
}

#[test]
fn decaying_coupling_probabilities_and_rescaling() {
    let gamma = 0.1;
    let (p0, p1) = decaying_coupling_probabilities(gamma).unwrap();
    let mut seen = Vec::new();
    for &eps in &[1.0, 3.0] {
        let spec = HamiltonianSpec::decaying_coupling(eps, gamma).unwrap();
        let r = thermalization_run(&spec, &IntegrationConfig::for_spec(&spec)).unwrap();
        let d = r.distribution;
        assert!((d.probs[0] - p0).abs() < 2e-3 && (d.probs[1] - p1).abs() < 2e-3, "{:?} vs {p0} {p1}", d.probs);
        assert!(r.t_start_sensitivity < 1e-3);
        seen.push(d);
    }
    assert!(seen[0].max_abs_diff(&seen[1]) < 1e-3);
}

#[test]
fn inverse_time_segment_cannot_cross_pole() {
    let spec = HamiltonianSpec::decaying_coupling(1.0, 0.5).unwrap();
    let psi0 = StateVector::basis_state(&spec, 0, -1.0, 1.0).unwrap();
    let err = propagate(&spec, &psi0, -1.0, 1.0, &IntegrationConfig::default()).unwrap_err();
    assert!(matches!(err, MlzError::Singularity(_)));
}

#[test]
fn degenerate_two_time_path_matches_propagate() {
    let h = HamiltonianSpec::do3(1.0, 4.0, 1.0).unwrap();
    let hp = HamiltonianSpec::do3_partner(1.0, 4.0, 1.0).unwrap();
    let cfg = IntegrationConfig::default().with_tolerances(1e-11, 1e-13);
    let psi0 = StateVector::basis_state(&h, 0, -6.0, 1.0).unwrap();
    let a = propagate(&h, &psi0, -6.0, 6.0, &cfg).unwrap().state;
    let path = TimePath::straight((-6.0, 1.0), (6.0, 1.0)).unwrap();
    let b = two_time_evolve(&h, &hp, &path, &psi0, &cfg).unwrap();
    assert!((&a.amplitudes - &b.amplitudes).norm() < 1e-7);
}

#[test]
fn reversed_path_is_identity() {
    let h = HamiltonianSpec::do3(1.0, 4.0, 1.0).unwrap();
    let hp = HamiltonianSpec::do3_partner(1.0, 4.0, 1.0).unwrap();
    let path = TimePath::detour((-5.0, 1.0), (5.0, 1.0), 3.0).unwrap();
    let cfg = IntegrationConfig::default().with_tolerances(1e-11, 1e-13);
    let psi0 = StateVector::basis_state(&h, 0, -5.0, 1.0).unwrap();
    let mid = two_time_evolve(&h, &hp, &path, &psi0, &cfg).unwrap();
    let back = two_time_evolve(&h, &hp, &path.reversed(), &mid, &cfg).unwrap();
    assert!((&back.amplitudes - &psi0.amplitudes).norm() < 1e-6);
}

#[test]
fn inconsistent_pair_rejected() {
    let h = HamiltonianSpec::do3(1.0, 4.0, 1.0).unwrap();
    let hp = HamiltonianSpec::do3_partner(1.0, 4.0, 1.0).unwrap().perturbed(3, 0, 1, 1e-3);
    let path = TimePath::straight((-5.0, 1.0), (5.0, 1.0)).unwrap();
    let psi0 = StateVector::basis_state(&h, 0, -5.0, 1.0).unwrap();
    let err = two_time_evolve(&h, &hp, &path, &psi0, &IntegrationConfig::default()).unwrap_err();
    assert!(matches!(err, MlzError::Consistency(_)));
}

#[test]
fn path_rejects_nonpositive_tau() {
    assert!(TimePath::new(vec![(0.0, 1.0), (1.0, 0.0)]).is_err());
}

#[test]
fn observer_receives_lab_amplitudes() {
    let spec = HamiltonianSpec::lz2(0.5, 1.0).unwrap();
    let psi0 = StateVector::basis_state(&spec, 0, -5.0, 1.0).unwrap();
    let mut last = None;
    let mut count = 0;
    let mut obs = |t: f64, _tau: f64, psi: &DVector<Complex64>| {
        count += 1;
        last = Some((t, psi.clone()));
    };
    let out = propagate_observed(&spec, &psi0, -5.0, 5.0, &IntegrationConfig::default(), Some(&mut obs)).unwrap();
    let (t, psi) = last.unwrap();
    assert_eq!(t, 5.0);
    assert!(count > 10);
    assert!((psi - out.state.amplitudes).norm() < 1e-14);
}
