use super::{integration, par_map, Ctx, Experiment, RunResult, INTEGRATION};
use crate::config::{ConfigError, KeySpec};
use crate::report::{normalization, Check, Panel, Report};
use mlzlab_core::analytic::{do3_probabilities, single_channel_distribution, two_channel_joint_distribution};
use mlzlab_core::distribution::Label;
use mlzlab_core::dynamics::{transition_probabilities, TimePath};
use mlzlab_core::integrability::{pair_residuals, path_invariance_suite, sample_grid};
use mlzlab_core::model::HamiltonianSpec;
use mlzlab_core::semiclassical::*;
use mlzlab_core::{Distribution, ModelParams};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::PI;

fn spread(tables: &[Distribution]) -> f64 {
    let mut worst = 0.0f64;
    for a in tables {
        for b in tables {
            worst = worst.max(a.max_abs_diff(b));
        }
    }
    worst
}

// verify-do3

const DO3_KEYS: &[KeySpec] = &[
    KeySpec { key: "grid.g", default: "[1.0, 1.0, 0.5]", help: "couplings, paired with grid.beta" },
    KeySpec {
        key: "grid.beta",
        default: "[12.566370614359172, 6.283185307179586, 10.0]",
        help: "sweep rates, paired with grid.g",
    },
    KeySpec { key: "grid.epsilon", default: "[0.3, 1.0, 3.0]", help: "band splittings" },
];

pub const VERIFY_DO3: Experiment = Experiment {
    name: "verify-do3",
    about: "three-level Demkov-Osherov sweep against its closed form and across epsilon",
    keys: &[DO3_KEYS, INTEGRATION],
    run: verify_do3,
};

fn verify_do3(ctx: &Ctx) -> RunResult<Report> {
    let s = &ctx.settings;
    let (gs, betas, epss) = (s.f64_list("grid.g")?, s.f64_list("grid.beta")?, s.f64_list("grid.epsilon")?);
    if gs.len() != betas.len() {
        return Err(ConfigError("`grid.g` and `grid.beta` must have equal length".into()).into());
    }
    let points: Vec<(f64, f64, f64)> =
        gs.iter().zip(&betas).flat_map(|(&g, &b)| epss.iter().map(move |&e| (g, b, e))).collect();
    let tables = par_map(&points, |&(g, b, e)| {
        let spec = HamiltonianSpec::do3(g, b, e)?;
        Ok(transition_probabilities(&spec, &integration(ctx, &spec)?)?)
    })?;
    let mut panel = Panel::new(
        "do3",
        &["g", "beta", "epsilon", "p00", "p01", "p02", "p00_exact", "p01_exact", "p02_exact", "max_abs_err"],
    );
    let mut rep = Report::default();
    let (mut err, mut worst_spread) = (0.0f64, 0.0f64);
    for (pair, chunk) in points.chunks(epss.len()).zip(tables.chunks(epss.len())) {
        worst_spread = worst_spread.max(spread(chunk));
        for (&(g, b, e), d) in pair.iter().zip(chunk) {
            let (a0, a1, a2) = do3_probabilities(g, b)?;
            let e_max = [a0, a1, a2].iter().zip(&d.probs).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
            err = err.max(e_max);
            rep.checks.push(normalization(format!("P at g={g}, beta={b}, eps={e}"), d.total(), false));
            panel.push([g, b, e, d.probs[0], d.probs[1], d.probs[2], a0, a1, a2, e_max]);
        }
    }
    rep.checks.push(Check::at_most("max |P - closed form|", err, 2e-3));
    rep.checks.push(Check::at_most("spread across epsilon", worst_spread, 1e-3));
    rep.panels.push(panel);
    Ok(rep)
}

// verify-single

const SINGLE_KEYS: &[KeySpec] = &[
    KeySpec { key: "model.n", default: "8", help: "molecule number N" },
    KeySpec { key: "model.g", default: "1.0", help: "coupling g" },
    KeySpec { key: "grid.beta", default: "[5.0, 20.0, 100.0]", help: "sweep rates" },
];

pub const VERIFY_SINGLE: Experiment = Experiment {
    name: "verify-single",
    about: "single-channel sweep against the closed-form P_m",
    keys: &[SINGLE_KEYS, INTEGRATION],
    run: verify_single,
};

fn verify_single(ctx: &Ctx) -> RunResult<Report> {
    let s = &ctx.settings;
    let (n, g) = (s.usize("model.n")?, s.positive("model.g")?);
    let betas = s.f64_list("grid.beta")?;
    let tables = par_map(&betas, |&b| {
        let p = ModelParams::new(n, g, b, 0.0)?;
        let spec = HamiltonianSpec::tc_single(&p)?;
        Ok((transition_probabilities(&spec, &integration(ctx, &spec)?)?, single_channel_distribution(&p)))
    })?;
    let mut panel = Panel::new("single", &["beta", "m", "p_numeric", "p_exact", "abs_diff"]);
    let mut rep = Report::default();
    let mut err = 0.0f64;
    for (&b, (num, exact)) in betas.iter().zip(&tables) {
        for (m, (&x, &y)) in num.probs.iter().zip(&exact.probs).enumerate() {
            err = err.max((x - y).abs());
            panel.push([b, m as f64, x, y, (x - y).abs()]);
        }
        rep.checks.push(normalization(format!("numeric P_m at beta={b}"), num.total(), false));
        rep.checks.push(normalization(format!("exact P_m at beta={b}"), exact.total(), true));
    }
    rep.checks.push(Check::at_most("max |P_m - closed form|", err, 5e-3));
    rep.panels.push(panel);
    Ok(rep)
}

// verify-two-channel

const TWO_KEYS: &[KeySpec] = &[
    KeySpec { key: "model.n", default: "6", help: "molecule number N" },
    KeySpec { key: "model.g", default: "1.0", help: "coupling g" },
    KeySpec { key: "model.beta", default: "10.0", help: "sweep rate" },
    KeySpec { key: "grid.epsilon", default: "[0.3, 1.0, 3.0]", help: "channel splittings" },
];

pub const VERIFY_TWO_CHANNEL: Experiment = Experiment {
    name: "verify-two-channel",
    about: "two-channel joint table against its closed form and across epsilon",
    keys: &[TWO_KEYS, INTEGRATION],
    run: verify_two_channel,
};

fn verify_two_channel(ctx: &Ctx) -> RunResult<Report> {
    let s = &ctx.settings;
    let (n, g, beta) = (s.usize("model.n")?, s.positive("model.g")?, s.positive("model.beta")?);
    let epss = s.f64_list("grid.epsilon")?;
    let tables = par_map(&epss, |&e| {
        let p = ModelParams::new(n, g, beta, e)?;
        let spec = HamiltonianSpec::tc_two_channel(&p)?;
        Ok(transition_probabilities(&spec, &integration(ctx, &spec)?)?)
    })?;
    let exact = two_channel_joint_distribution(&ModelParams::new(n, g, beta, 0.0)?);
    let mut panel = Panel::new("two_channel", &["epsilon", "n1", "n2", "p_numeric", "p_exact", "abs_diff"]);
    let mut rep = Report::default();
    let mut err = 0.0f64;
    for (&e, num) in epss.iter().zip(&tables) {
        for (l, &y) in exact.labels.iter().zip(&exact.probs) {
            let Label::Pair(n1, n2) = *l else { unreachable!("joint table uses pair labels") };
            let x = num.get(*l).unwrap_or(0.0);
            err = err.max((x - y).abs());
            panel.push([e, n1 as f64, n2 as f64, x, y, (x - y).abs()]);
        }
        rep.checks.push(normalization(format!("numeric P at eps={e}"), num.total(), false));
    }
    rep.checks.push(normalization("exact joint table", exact.total(), true));
    rep.checks.push(Check::at_most("max |P_n1n2 - closed form|", err, 3e-3));
    rep.checks.push(Check::at_most("spread across epsilon", spread(&tables), 3e-3));
    rep.panels.push(panel);
    Ok(rep)
}

// verify-integrability

const INTEGRABILITY_KEYS: &[KeySpec] = &[
    KeySpec { key: "do3.g", default: "1.0", help: "DO3 coupling" },
    KeySpec { key: "do3.beta", default: "4.0", help: "DO3 sweep rate" },
    KeySpec { key: "do3.epsilon", default: "1.0", help: "DO3 band splitting" },
    KeySpec { key: "tc.n", default: "4", help: "two-channel molecule number" },
    KeySpec { key: "tc.g", default: "1.0", help: "two-channel coupling" },
    KeySpec { key: "tc.beta", default: "4.0", help: "two-channel sweep rate" },
    KeySpec { key: "tc.epsilon", default: "1.0", help: "two-channel splitting" },
    KeySpec { key: "grid.samples", default: "200", help: "random (t, tau) points per pair" },
    KeySpec { key: "grid.t_max", default: "20.0", help: "t range [-t_max, t_max]" },
    KeySpec { key: "grid.tau_min", default: "0.1", help: "lower tau bound" },
    KeySpec { key: "grid.tau_max", default: "10.0", help: "upper tau bound" },
    KeySpec { key: "paths.tau0", default: "[5.0, 0.4]", help: "tau levels of the detour paths" },
];

const INTEGRABILITY_INTEGRATION: &[KeySpec] = &[
    KeySpec { key: "integration.rel_tol", default: "1e-11", help: "relative tolerance of the stepper" },
    KeySpec { key: "integration.abs_tol", default: "1e-13", help: "absolute tolerance of the stepper" },
    KeySpec { key: "integration.window", default: "0", help: "half-width T; 0 selects it from the parameters" },
];

pub const VERIFY_INTEGRABILITY: Experiment = Experiment {
    name: "verify-integrability",
    about: "commutator and mixed-derivative residuals, and path-deformation invariance",
    keys: &[INTEGRABILITY_KEYS, INTEGRABILITY_INTEGRATION],
    run: verify_integrability,
};

fn verify_integrability(ctx: &Ctx) -> RunResult<Report> {
    let s = &ctx.settings;
    let (dg, db, de) = (s.positive("do3.g")?, s.positive("do3.beta")?, s.f64("do3.epsilon")?);
    let tp = ModelParams::new(s.usize("tc.n")?, s.positive("tc.g")?, s.positive("tc.beta")?, s.f64("tc.epsilon")?)?;
    let pairs = vec![
        ("do3", HamiltonianSpec::do3(dg, db, de)?, HamiltonianSpec::do3_partner(dg, db, de)?),
        ("tc_two_channel", HamiltonianSpec::tc_two_channel(&tp)?, HamiltonianSpec::tc_two_channel_partner(&tp)?),
    ];
    let (tau_lo, tau_hi) = (s.positive("grid.tau_min")?, s.positive("grid.tau_max")?);
    if tau_lo > tau_hi {
        return Err(ConfigError("`grid.tau_min` exceeds `grid.tau_max`".into()).into());
    }
    let grid = sample_grid(s.usize("grid.samples")?, s.positive("grid.t_max")?, (tau_lo, tau_hi), ctx.seed);
    let tau0s = s.f64_list("paths.tau0")?;
    let results = par_map(&pairs, |(_, h, hp)| {
        let residuals = grid
            .iter()
            .map(|&(t, tau)| {
                h.check_pole_proximity(t, tau)?;
                Ok((t, tau, pair_residuals(h, hp, t, tau)?))
            })
            .collect::<mlzlab_core::Result<Vec<_>>>()?;
        let cfg = integration(ctx, h)?;
        let t = cfg.window;
        let mut paths = vec![TimePath::straight((-t, 1.0), (t, 1.0))?];
        for &tau0 in &tau0s {
            paths.push(TimePath::detour((-t, 1.0), (t, 1.0), tau0)?);
        }
        let inv = path_invariance_suite(h, hp, &paths, &cfg, Some(1e-3))?;
        Ok((residuals, inv))
    })?;
    let mut res_panel = Panel::new("residuals", &["pair", "t", "tau", "commutator", "mixed_derivative"]);
    let mut path_panel = Panel::new("paths", &["pair", "path", "tau0", "state", "probability"]);
    let mut rep = Report::default();
    for ((name, ..), (residuals, inv)) in pairs.iter().zip(&results) {
        let (mut comm, mut mixed) = (0.0f64, 0.0f64);
        for &(t, tau, r) in residuals {
            comm = comm.max(r.commutator);
            mixed = mixed.max(r.mixed_derivative);
            res_panel.push([name.to_string(), t.to_string(), tau.to_string(), r.commutator.to_string(), r.mixed_derivative.to_string()]);
        }
        for (k, probs) in inv.probabilities.iter().enumerate() {
            let tau0 = if k == 0 { 1.0 } else { tau0s[k - 1] };
            for (m, p) in probs.iter().enumerate() {
                path_panel.push([name.to_string(), k.to_string(), tau0.to_string(), m.to_string(), p.to_string()]);
            }
        }
        rep.checks.push(Check::at_most(format!("{name} commutator (rel)"), comm, 1e-11));
        rep.checks.push(Check::at_most(format!("{name} mixed derivative (rel)"), mixed, 1e-11));
        rep.checks.push(Check::at_most(format!("{name} path discrepancy"), inv.max_discrepancy, 1e-3));
    }
    rep.panels.push(res_panel);
    rep.panels.push(path_panel);
    Ok(rep)
}

// verify-semiclassical

const SEMICLASSICAL_KEYS: &[KeySpec] = &[
    KeySpec { key: "model.n", default: "40", help: "molecule number N" },
    KeySpec { key: "model.g", default: "1.0", help: "coupling g" },
    KeySpec { key: "model.beta", default: "2.0", help: "sweep rate" },
    KeySpec { key: "model.epsilon", default: "0.5", help: "channel splitting" },
    KeySpec { key: "certificate.samples", default: "1000", help: "random phase-space states" },
    KeySpec { key: "trajectory.count", default: "4", help: "trajectories in the ensemble" },
    KeySpec {
        key: "trajectory.seed_magnitude",
        default: "1.0",
        help: "initial pair numbers are drawn uniformly from [0, seed_magnitude]; a runner choice",
    },
    KeySpec { key: "trajectory.t_start", default: "-20.0", help: "initial time" },
    KeySpec { key: "trajectory.t_end", default: "20.0", help: "final time" },
    KeySpec { key: "trajectory.record_interval", default: "0.1", help: "sampling interval of the CSV" },
    KeySpec { key: "mean_field.points", default: "41", help: "time samples on (0, 2 t_c]" },
];

pub const VERIFY_SEMICLASSICAL: Experiment = Experiment {
    name: "verify-semiclassical",
    about: "classical certificate, trajectories with the energy identity, and the mean-field crossing",
    keys: &[SEMICLASSICAL_KEYS],
    run: verify_semiclassical,
};

fn verify_semiclassical(ctx: &Ctx) -> RunResult<Report> {
    let s = &ctx.settings;
    let p = ModelParams::new(s.usize("model.n")?, s.positive("model.g")?, s.positive("model.beta")?, s.f64("model.epsilon")?)?;
    let cert = classical_certificate(&p, s.usize("certificate.samples")?, ctx.seed)?;
    let mut rep = Report::default();
    let mut cp = Panel::new("certificate", &["quantity", "value", "tolerance"]);
    for (name, v, tol) in [
        ("poisson_bracket", cert.max_bracket, ClassicalCertificate::BRACKET_TOL),
        ("mixed_derivative", cert.max_mixed, ClassicalCertificate::BRACKET_TOL),
        ("mean_field_crossing", cert.crossing_offset, ClassicalCertificate::CROSSING_TOL),
        ("quartic_gradient", cert.quartic_gradient_error, ClassicalCertificate::GRADIENT_TOL),
    ] {
        cp.push([name.to_string(), v.to_string(), tol.to_string()]);
        rep.checks.push(Check::at_most(format!("{name} (rel)"), v, tol));
    }
    rep.panels.push(cp);

    let count = s.usize("trajectory.count")?;
    let mag = s.f64("trajectory.seed_magnitude")?;
    let (t0, t1) = (s.f64("trajectory.t_start")?, s.f64("trajectory.t_end")?);
    if !(mag >= 0.0 && 2.0 * mag <= p.n as f64) {
        return Err(ConfigError(format!("`trajectory.seed_magnitude` must lie in [0, N/2], got {mag}")).into());
    }
    let mut rng = ChaCha8Rng::seed_from_u64(ctx.seed);
    let starts: Vec<ClassicalState> = (0..count)
        .map(|_| {
            let n1 = mag * rng.random::<f64>();
            let n2 = mag * rng.random::<f64>();
            ClassicalState::new(n1, n2, rng.random_range(0.0..2.0 * PI), rng.random_range(0.0..2.0 * PI), t0)
        })
        .collect();
    let cfg = TrajectoryConfig { record_interval: Some(s.positive("trajectory.record_interval")?), ..TrajectoryConfig::default() };
    let trajectories = par_map(&starts, |st| Ok(integrate_trajectory(st, &p, t1, &cfg)?))?;
    let mut identity = 0.0f64;
    for (k, tr) in trajectories.iter().enumerate() {
        let scale = tr.energies.iter().fold(1.0f64, |m, e| m.max(e.abs()));
        let mut panel = Panel::new(format!("trajectory_{k:03}"), &["t", "n1", "n2", "phi1", "phi2", "H_cl"]);
        for ((st, e), w) in tr.states.iter().zip(&tr.energies).zip(&tr.work) {
            identity = identity.max((e - tr.energies[0] - w).abs() / scale);
            panel.push([st.time, st.n1, st.n2, st.phi1, st.phi2, *e]);
        }
        rep.panels.push(panel);
    }
    rep.checks.push(Check::at_most("energy change minus explicit-time work (rel)", identity, 1e-8));

    let points = s.usize("mean_field.points")?.max(2);
    let t_c = mean_field_delta12(p.n, &p, 1.0)?.t_c;
    if t_c.is_finite() {
        let mut mf = Panel::new("mean_field", &["t", "delta12", "delta2", "delta12_squared"]);
        for k in 1..=points {
            let t = 2.0 * t_c * k as f64 / points as f64;
            let m = mean_field_delta12(p.n, &p, t)?;
            mf.push([t, m.delta12, m.delta2, mean_field_delta12_squared(p.n, &p, t)]);
        }
        rep.panels.push(mf);
        rep.note("t_c_sector", t_c);
        rep.note("t_c_total", mean_field_delta12(p.n, &p, 1.0)?.t_c_total);
    }
    Ok(rep)
}
