use mlzlab_core::analytic::*;
use mlzlab_core::dynamics::{transition_probabilities, IntegrationConfig};
use mlzlab_core::model::{BasisLabel, HamiltonianSpec};
use mlzlab_core::specfun::*;
use mlzlab_core::ModelParams;
use proptest::prelude::*;

fn params(n: usize, g: f64, beta: f64) -> ModelParams {
    ModelParams::new(n, g, beta, 0.0).unwrap()
}

proptest! {
    #[test]
    fn q_pochhammer_recurrence(a in 0.0f64..0.999, x in 0.0f64..0.999, q in 0usize..200) {
        let lhs = q_pochhammer(a, x, q + 1).unwrap().log_value;
        let rhs = q_pochhammer(a, x, q).unwrap().log_value + (1.0 - a * x.powi(q as i32)).ln();
        prop_assert!((lhs - rhs).abs() <= 1e-14 * lhs.abs().max(1.0), "{lhs} vs {rhs}");
    }

    #[test]
    fn q_pochhammer_positive_below_one(a in 0.0f64..0.999_999, x in 0.0f64..=1.0, q in 0usize..500) {
        let v = q_pochhammer(a, x, q).unwrap();
        prop_assert_eq!(v.sign, 1);
        prop_assert!(v.value() > 0.0);
    }

    #[test]
    fn euler_table_normalized_and_mean_consistent(alpha in 0.01f64..0.9, x in 0.05f64..0.95) {
        let p = EulerDistributionParams::with_auto_cutoff(alpha, x).unwrap();
        let d = euler_distribution(p).unwrap();
        prop_assert!((d.total() - 1.0).abs() < 1e-12);
        let m = euler_mean(alpha, x).unwrap();
        prop_assert!((d.mean() - m).abs() < 1e-10 * m.max(1.0), "{} vs {m}", d.mean());
    }

    #[test]
    fn q_digamma_increases_in_z(q in 0.05f64..0.95, z in 0.1f64..20.0, dz in 0.01f64..5.0) {
        let a = q_digamma(q, z, 1e-15).unwrap();
        let b = q_digamma(q, z + dz, 1e-15).unwrap();
        // the z-dependent part decays like q^z and can drop below one ulp
        prop_assert!(b >= a);
        if z < 5.0 && q > 0.3 {
            prop_assert!(b > a);
        }
    }

    #[test]
    fn single_channel_normalized(n in 1usize..2000, xi in 0usize..4) {
        let x: f64 = [0.01, 0.5, 0.9, 0.999][xi];
        let beta = -2.0 * std::f64::consts::PI / x.ln();
        let d = single_channel_distribution(&params(n, 1.0, beta));
        prop_assert!((d.total() - 1.0).abs() < 1e-8);
    }

    #[test]
    fn joint_marginalizes_to_total(n in 1usize..200, beta in 0.5f64..200.0, frac in 0.0f64..=1.0) {
        let p = params(n, 1.0, beta);
        let k = (frac * n as f64).round() as usize;
        let sum: f64 = (0..=k).map(|n1| two_channel_joint(&p, n1, k - n1).unwrap()).sum();
        let total = two_channel_total(&p, k).unwrap();
        prop_assert!((sum - total).abs() <= 1e-10 * total.max(1e-300) + 1e-300, "{sum} vs {total}");
    }

    #[test]
    fn conditional_detailed_balance(n in 2usize..200, beta in 0.5f64..200.0, a in 0.0f64..1.0, b in 0.0f64..1.0) {
        let p = params(n, 1.0, beta);
        let total = 1 + (a * (n - 1) as f64) as usize;
        let n2 = 1 + (b * (total - 1) as f64) as usize;
        let n1 = total - n2;
        let lhs = ln_two_channel_joint(&p, n1, n2).unwrap() - ln_two_channel_joint(&p, n1 + 1, n2 - 1).unwrap();
        prop_assert!((lhs - p.ln_x()).abs() < 1e-12 * lhs.abs().max(1.0), "{lhs} vs {}", p.ln_x());
    }

    #[test]
    fn adding_an_empty_channel(n in 1usize..100, beta in 0.5f64..100.0, occ in proptest::collection::vec(0usize..10, 1..4)) {
        let p = params(n, 1.0, beta);
        prop_assume!(occ.iter().sum::<usize>() <= n);
        let rest = (n - occ.iter().sum::<usize>()) as f64;
        let mut longer = occ.clone();
        longer.push(0);
        let lhs = ln_multi_channel_prob(&p, &longer).unwrap();
        let rhs = ln_multi_channel_prob(&p, &occ).unwrap() + rest * p.ln_x();
        prop_assert!((lhs - rhs).abs() < 1e-12 * lhs.abs().max(1.0));
    }

    #[test]
    fn do3_probabilities_sum_to_one(g in 0.0f64..5.0, beta in 0.01f64..100.0) {
        let (a, b, c) = do3_probabilities(g, beta).unwrap();
        prop_assert!((a + b + c - 1.0).abs() < 1e-15);
    }

    #[test]
    fn materialized_matrices_are_hermitian(
        n in 1usize..7, g in 0.1f64..2.0, beta in 0.5f64..10.0, eps in 0.1f64..3.0,
        t in -20.0f64..20.0, tau in 0.1f64..5.0,
    ) {
        let p = ModelParams::new(n, g, beta, eps).unwrap();
        let specs = [
            HamiltonianSpec::do3(g, beta, eps).unwrap(),
            HamiltonianSpec::do3_partner(g, beta, eps).unwrap(),
            HamiltonianSpec::tc_single(&p).unwrap(),
            HamiltonianSpec::tc_two_channel(&p).unwrap(),
            HamiltonianSpec::tc_two_channel_partner(&p).unwrap(),
        ];
        for s in &specs {
            let h = s.materialize(t, tau).unwrap();
            prop_assert!((&h - h.transpose()).amax() <= 1e-14 * h.amax().max(1.0));
        }
        let heff = HamiltonianSpec::eff_thermalization(&p).unwrap().materialize(t.abs() + 0.1, 1.0).unwrap();
        prop_assert!((&heff - heff.transpose()).amax() <= 1e-14 * heff.amax().max(1.0));
    }

    #[test]
    fn two_channel_couplings_stay_local(n in 1usize..8, t in -5.0f64..5.0, tau in 0.2f64..5.0) {
        // the basis is the fixed-N sector; entries only join states one
        // molecule apart, or trade a pair between channels in the partner
        let p = ModelParams::new(n, 1.0, 2.0, 0.7).unwrap();
        for (spec, trade) in [
            (HamiltonianSpec::tc_two_channel(&p).unwrap(), false),
            (HamiltonianSpec::tc_two_channel_partner(&p).unwrap(), true),
        ] {
            prop_assert_eq!(spec.dim, (n + 1) * (n + 2) / 2);
            let h = spec.materialize(t, tau).unwrap();
            for i in 0..spec.dim {
                for j in 0..spec.dim {
                    if i == j || h[(i, j)] == 0.0 {
                        continue;
                    }
                    let (BasisLabel::Pair { n1: a1, n2: a2 }, BasisLabel::Pair { n1: b1, n2: b2 }) =
                        (spec.basis[i], spec.basis[j]) else { unreachable!() };
                    let d1 = a1 as i64 - b1 as i64;
                    let d2 = a2 as i64 - b2 as i64;
                    let one_molecule = d1.abs() + d2.abs() == 1;
                    let swap = trade && d1 == -d2 && d1.abs() == 1;
                    prop_assert!(one_molecule || swap, "({a1},{a2}) <-> ({b1},{b2})");
                }
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(6))]

    #[test]
    fn do3_sweep_norm_and_epsilon_scaling(g in 0.4f64..1.2, beta in 2.0f64..12.0) {
        let mut tables = Vec::new();
        for lambda in [0.3, 1.0, 3.0] {
            let spec = HamiltonianSpec::do3(g, beta, lambda).unwrap();
            let d = transition_probabilities(&spec, &IntegrationConfig::for_spec(&spec)).unwrap();
            prop_assert!((d.total() - 1.0).abs() < 1e-7);
            tables.push(d);
        }
        prop_assert!(tables[0].max_abs_diff(&tables[1]) < 3e-3);
        prop_assert!(tables[2].max_abs_diff(&tables[1]) < 3e-3);
    }
}
