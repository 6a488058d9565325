use mlzlab_core::dynamics::{IntegrationConfig, TimePath};
use mlzlab_core::integrability::{check_consistency, path_invariance_suite, sample_grid};
use mlzlab_core::model::HamiltonianSpec;
use mlzlab_core::ModelParams;

fn paths(t: f64) -> Vec<TimePath> {
    vec![
        TimePath::straight((-t, 1.0), (t, 1.0)).unwrap(),
        TimePath::detour((-t, 1.0), (t, 1.0), 5.0).unwrap(),
        TimePath::detour((-t, 1.0), (t, 1.0), 0.4).unwrap(),
    ]
}

#[test]
fn do3_path_deformation() {
    let h = HamiltonianSpec::do3(1.0, 4.0, 1.0).unwrap();
    let hp = HamiltonianSpec::do3_partner(1.0, 4.0, 1.0).unwrap();
    let cfg = IntegrationConfig::for_spec(&h).with_tolerances(1e-11, 1e-13);
    let r = path_invariance_suite(&h, &hp, &paths(cfg.window), &cfg, None).unwrap();
    assert!(r.pass, "{r}");
    // the sweep itself produces nontrivial populations
    assert!(r.probabilities[0].iter().all(|&p| p > 1e-3));
}

#[test]
fn two_channel_path_deformation() {
    let p = ModelParams::new(3, 1.0, 4.0, 1.0).unwrap();
    let h = HamiltonianSpec::tc_two_channel(&p).unwrap();
    let hp = HamiltonianSpec::tc_two_channel_partner(&p).unwrap();
    let cfg = IntegrationConfig::for_spec(&h).with_tolerances(1e-11, 1e-13);
    let r = path_invariance_suite(&h, &hp, &paths(cfg.window), &cfg, None).unwrap();
    assert!(r.pass, "{r}");
}

#[test]
fn identical_paths_agree_exactly() {
    let h = HamiltonianSpec::do3(0.5, 2.0, 1.0).unwrap();
    let hp = HamiltonianSpec::do3_partner(0.5, 2.0, 1.0).unwrap();
    let cfg = IntegrationConfig::for_spec(&h);
    let p = TimePath::detour((-cfg.window, 1.0), (cfg.window, 1.0), 5.0).unwrap();
    let r = path_invariance_suite(&h, &hp, &[p.clone(), p], &cfg, None).unwrap();
    assert_eq!(r.max_discrepancy, 0.0);
}

#[test]
fn mismatched_endpoints_rejected() {
    let h = HamiltonianSpec::do3(0.5, 2.0, 1.0).unwrap();
    let hp = HamiltonianSpec::do3_partner(0.5, 2.0, 1.0).unwrap();
    let a = TimePath::straight((-5.0, 1.0), (5.0, 1.0)).unwrap();
    let b = TimePath::straight((-5.0, 1.0), (6.0, 1.0)).unwrap();
    assert!(path_invariance_suite(&h, &hp, &[a, b], &IntegrationConfig::default(), None).is_err());
}

#[test]
fn grid_is_deterministic() {
    assert_eq!(sample_grid(5, 3.0, (0.5, 2.0), 11), sample_grid(5, 3.0, (0.5, 2.0), 11));
    assert!(sample_grid(100, 3.0, (0.5, 2.0), 11).iter().all(|&(t, tau)| t.abs() <= 3.0 && (0.5..=2.0).contains(&tau)));
    let h = HamiltonianSpec::do3(0.5, 2.0, 1.0).unwrap();
    let hp = HamiltonianSpec::do3_partner(0.5, 2.0, 1.0).unwrap();
    assert!(check_consistency(&h, &hp, &sample_grid(20, 3.0, (0.5, 2.0), 11)).unwrap().pass);
}
