use super::{integration, par_map, Ctx, Experiment, RunResult, INTEGRATION};
use crate::config::KeySpec;
use crate::report::{normalization, Check, Panel, Report};
use mlzlab_core::analytic::*;
use mlzlab_core::distribution::Label;
use mlzlab_core::dynamics::{extract_phases, thermalization_run, Readout};
use mlzlab_core::model::HamiltonianSpec;
use mlzlab_core::numeric::wrap_angle;
use mlzlab_core::ModelParams;
use std::f64::consts::PI;

fn label_index(l: Label) -> i64 {
    match l {
        Label::Index(i) => i,
        Label::Pair(a, b) => (a + b) as i64,
    }
}

// fig-pn

const PN_KEYS: &[KeySpec] = &[
    KeySpec { key: "model.n", default: "1000", help: "molecule number N" },
    KeySpec { key: "model.g", default: "1.0", help: "coupling g" },
    KeySpec { key: "grid.q", default: "[0.3, 0.5, 0.7, 0.8, 1.0, 1.5, 2.0, 5.0]", help: "values of q = 2πg²N/(β ln N)" },
];

pub const FIG_PN: Experiment = Experiment {
    name: "fig-pn",
    about: "single-channel distribution P_m across the q axis and the critical rate",
    keys: &[PN_KEYS],
    run: fig_pn,
};

fn fig_pn(ctx: &Ctx) -> RunResult<Report> {
    let s = &ctx.settings;
    let n = s.usize("model.n")?;
    let g = s.positive("model.g")?;
    let qs = s.f64_list("grid.q")?;
    let tables = par_map(&qs, |&q| {
        let p = ModelParams::new(n, g, ModelParams::beta_for_q(n, g, q), 0.0)?;
        Ok((p, single_channel_distribution(&p)))
    })?;
    let mut rep = Report::default();
    let mut dist = Panel::new("distribution", &["q", "beta", "m", "P_m"]);
    let mut peaks = Panel::new("peaks", &["q", "beta", "argmax", "peak_position", "n_ex", "P_0"]);
    let mut gap = 0usize;
    for (&q, (p, d)) in qs.iter().zip(&tables) {
        for (l, &pm) in d.labels.iter().zip(&d.probs) {
            dist.push([q, p.beta, label_index(*l) as f64, pm]);
        }
        let (a, b) = (d.argmax(), peak_position(p));
        gap = gap.max(a.abs_diff(b));
        peaks.push([q, p.beta, a as f64, b as f64, n_excitations(p), d.probs[0]]);
        rep.checks.push(normalization(format!("P_m at q = {q}"), d.total(), true));
    }
    rep.checks.push(Check::at_most("argmax vs peak position", gap as f64, 1.0));
    if n >= 2 {
        let c = critical_beta(n, g)?;
        let q_c = critical_q(n)?;
        let mut crit = Panel::new("critical", &["n", "q_c", "beta_c_exact", "beta_c_asymptotic"]);
        crit.push([n as f64, q_c, c.beta_exact, c.beta_asymptotic]);
        rep.panels.push(crit);
        rep.note("q_c", q_c);
        if n == 1000 {
            rep.checks.push(Check::in_range("q_c at N = 1000", q_c, 0.75, 0.85));
        }
    }
    rep.panels.insert(0, peaks);
    rep.panels.insert(0, dist);
    Ok(rep)
}

// fig-phases

const PHASE_KEYS: &[KeySpec] = &[
    KeySpec { key: "model.n", default: "3", help: "molecule number N" },
    KeySpec { key: "model.beta", default: "1.0", help: "sweep rate" },
    KeySpec {
        key: "grid.g",
        default: "[0.2, 0.4, 0.6, 0.8, 1.0, 1.2, 1.4, 1.6, 1.8, 2.0]",
        help: "coupling values",
    },
];

const PHASE_INTEGRATION: &[KeySpec] = &[
    KeySpec { key: "integration.rel_tol", default: "1e-12", help: "relative tolerance of the stepper" },
    KeySpec { key: "integration.abs_tol", default: "1e-14", help: "absolute tolerance of the stepper" },
    KeySpec { key: "integration.window", default: "100", help: "half-width T of the sweep" },
];

pub const FIG_PHASES: Experiment = Experiment {
    name: "fig-phases",
    about: "scattering phases of the single-channel model, simulated and closed form",
    keys: &[PHASE_KEYS, PHASE_INTEGRATION],
    run: fig_phases,
};

fn fig_phases(ctx: &Ctx) -> RunResult<Report> {
    let s = &ctx.settings;
    let n = s.usize("model.n")?;
    let beta = s.positive("model.beta")?;
    let gs = s.f64_list("grid.g")?;
    let rows = par_map(&gs, |&g| {
        let p = ModelParams::new(n, g, beta, 0.0)?;
        let cfg = integration(ctx, &HamiltonianSpec::tc_single(&p)?)?.with_readout(Readout::Superadiabatic);
        Ok((extract_phases(&p, &cfg)?, scattering_phases(&p)?))
    })?;
    let weak = scattering_phases_weak_limit(n);
    let mut panel = Panel::new(
        "phases",
        &["g", "m", "probability", "phase_numeric", "phase_closed_form", "normalized_numeric", "normalized_closed_form", "error"],
    );
    let (mut worst, mut resolved) = (0.0f64, 0usize);
    for (&g, (numeric, exact)) in gs.iter().zip(&rows) {
        for e in numeric {
            let closed = wrap_angle(exact[e.m]);
            let norm_closed = wrap_angle(exact[e.m] - weak[e.m]);
            let row: Vec<String> = match e.phase {
                Some(v) => {
                    let err = wrap_angle(v - exact[e.m]).abs();
                    worst = worst.max(err);
                    resolved += 1;
                    [g, e.m as f64, e.probability, v, closed, wrap_angle(v - weak[e.m]), norm_closed, err]
                        .iter()
                        .map(|x| format!("{x}"))
                        .collect()
                }
                None => vec![
                    format!("{g}"),
                    format!("{}", e.m),
                    format!("{}", e.probability),
                    String::new(),
                    format!("{closed}"),
                    String::new(),
                    format!("{norm_closed}"),
                    String::new(),
                ],
            };
            panel.push(row);
        }
    }
    let mut rep = Report { panels: vec![panel], ..Report::default() };
    rep.checks.push(Check::at_most("phase error (rad)", worst, 2e-2));
    rep.checks.push(Check::holds("some phases resolved", resolved > 0));
    rep.note("resolved_entries", resolved as f64);
    Ok(rep)
}

// fig-averages and fig-eta

const AVERAGE_KEYS: &[KeySpec] = &[
    KeySpec { key: "model.n", default: "100000", help: "molecule number N" },
    KeySpec { key: "model.g", default: "1.0", help: "coupling g" },
    KeySpec {
        key: "grid.axis",
        default: "[0.005, 0.01, 0.02, 0.05, 0.1, 0.15, 0.2, 0.3, 0.5, 1.0, 2.0, 5.0, 10.0, 20.0, 50.0]",
        help: "values of Ng²/(β ln N)",
    },
];

pub const FIG_AVERAGES: Experiment = Experiment {
    name: "fig-averages",
    about: "mean pair numbers <n1>/N and <n>/N with their asymptotic forms",
    keys: &[AVERAGE_KEYS],
    run: fig_averages,
};

pub const FIG_ETA: Experiment = Experiment {
    name: "fig-eta",
    about: "channel asymmetry eta across the sweep-rate axis",
    keys: &[AVERAGE_KEYS],
    run: fig_eta,
};

struct AxisPoint {
    axis: f64,
    p: ModelParams,
}

fn axis_points(ctx: &Ctx) -> RunResult<Vec<AxisPoint>> {
    let s = &ctx.settings;
    let n = s.usize("model.n")?;
    let g = s.positive("model.g")?;
    if n < 2 {
        return Err(crate::config::ConfigError("`model.n` must be >= 2 for the ln N axis".into()).into());
    }
    let ln_n = (n as f64).ln();
    s.f64_list("grid.axis")?
        .into_iter()
        .map(|a| {
            if !(a > 0.0) {
                return Err(crate::config::ConfigError(format!("axis values must be > 0, got {a}")).into());
            }
            Ok(AxisPoint { axis: a, p: ModelParams::new(n, g, n as f64 * g * g / (a * ln_n), 0.0)? })
        })
        .collect()
}

fn fig_averages(ctx: &Ctx) -> RunResult<Report> {
    let pts = axis_points(ctx)?;
    let rows = par_map(&pts, |pt| {
        let p = &pt.p;
        let single = single_channel_distribution(p);
        let total = two_channel_total_distribution(p);
        let nu = mean_nu_single_exact(p);
        let nu_plus = mean_nu_plus_exact(p);
        Ok((single.total(), total.total(), mean_n1_exact(p), mean_n_exact(p), nu, nu_plus))
    })?;
    let nf = pts[0].p.n as f64;
    let mut panel = Panel::new(
        "averages",
        &[
            "axis", "beta", "n1_over_n", "n_over_n", "n2", "nu", "nu_asymptotic", "nu_plus", "nu_plus_asymptotic",
            "n2_asymptotic", "quasi_adiabatic",
        ],
    );
    let mut rep = Report::default();
    let (mut asym, mut window) = (0.0f64, 0usize);
    let rel = |a: f64, b: f64| (a - b).abs() / b.abs();
    for (pt, &(ts, tt, n1, nn, nu, nu_plus)) in pts.iter().zip(&rows) {
        let p = &pt.p;
        let qa = quasi_adiabatic(p);
        let (nu_a, nup_a, n2_a) = (mean_nu_single_asymptotic(p), mean_nu_plus_asymptotic(p), p.gamma_ratio());
        if qa {
            window += 1;
            asym = asym.max(rel(nu, nu_a)).max(rel(nu_plus, nup_a)).max(rel(nu - nu_plus, n2_a));
        }
        rep.checks.push(normalization(format!("P_m at axis {}", pt.axis), ts, true));
        rep.checks.push(normalization(format!("P_n at axis {}", pt.axis), tt, true));
        panel.push([
            pt.axis,
            p.beta,
            n1 / nf,
            nn / nf,
            nn - n1,
            nu,
            nu_a,
            nu_plus,
            nup_a,
            n2_a,
            if qa { 1.0 } else { 0.0 },
        ]);
    }
    let mut sorted: Vec<(f64, f64, f64)> = pts.iter().zip(&rows).map(|(pt, r)| (pt.axis, r.2, r.3)).collect();
    sorted.sort_by(|a, b| a.0.total_cmp(&b.0));
    let monotone = sorted.windows(2).all(|w| w[1].1 >= w[0].1 - 1e-9 && w[1].2 >= w[0].2 - 1e-9);
    let ordered = sorted.iter().all(|&(_, n1, nn)| n1 <= nn + 1e-9 && nn <= nf * (1.0 + 1e-12));
    rep.checks.push(Check::holds("<n1> and <n> increase along the axis", monotone));
    rep.checks.push(Check::holds("<n1> <= <n> <= N", ordered));
    if window > 0 {
        rep.checks.push(Check::at_most("asymptotic means in the quasi-adiabatic window (rel)", asym, 0.03));
    }
    rep.note("window_points", window as f64);
    rep.panels.push(panel);
    Ok(rep)
}

fn fig_eta(ctx: &Ctx) -> RunResult<Report> {
    let pts = axis_points(ctx)?;
    let rows = par_map(&pts, |pt| Ok((asymmetry_eta(&pt.p)?, mean_n2_exact(&pt.p))))?;
    let nf = pts[0].p.n as f64;
    let bound = 10.0 * nf.ln() / nf;
    let mut panel = Panel::new("eta", &["axis", "beta", "eta", "eta_quasi_adiabatic", "quasi_adiabatic", "fast"]);
    let mut rep = Report::default();
    let (mut qa_err, mut fast_err, mut range_ok) = (0.0f64, 0.0f64, true);
    let (mut n_qa, mut n_fast) = (0, 0);
    for (pt, &(eta, n2)) in pts.iter().zip(&rows) {
        let p = &pt.p;
        let qa = quasi_adiabatic(p);
        // β ≥ 5·2πg²N/ln N
        let fast = p.q() <= 0.2;
        let eta_qa = 1.0 - 2.0 * n2 / nf;
        range_ok &= (-1e-12..=1.0 + 1e-12).contains(&eta);
        if qa {
            n_qa += 1;
            qa_err = qa_err.max((eta - eta_qa).abs());
        }
        if fast {
            n_fast += 1;
            fast_err = fast_err.max(eta.abs());
        }
        panel.push([pt.axis, p.beta, eta, eta_qa, f64::from(u8::from(qa)), f64::from(u8::from(fast))]);
    }
    rep.checks.push(Check::holds("eta in [0, 1]", range_ok));
    if n_qa > 0 {
        rep.checks.push(Check::at_most("|eta - (1 - 2<n2>/N)| in the quasi-adiabatic window", qa_err, 1e-3));
    }
    if n_fast > 0 {
        rep.checks.push(Check::at_most("|eta| for fast sweeps", fast_err, bound));
    }
    rep.panels.push(panel);
    Ok(rep)
}

// fig-gibbs and fig-n2

const GIBBS_KEYS: &[KeySpec] = &[
    KeySpec { key: "model.n", default: "50", help: "pairs in the sector" },
    KeySpec { key: "model.g", default: "1.0", help: "coupling g" },
    KeySpec { key: "model.beta", default: "50.0", help: "sweep rate" },
    KeySpec { key: "model.epsilon", default: "1.0", help: "channel splitting" },
];

pub const FIG_GIBBS: Experiment = Experiment {
    name: "fig-gibbs",
    about: "late-time distribution of n2 - n1 against the Gibbs form",
    keys: &[GIBBS_KEYS, INTEGRATION],
    run: fig_gibbs,
};

fn heff_run(
    ctx: &Ctx,
    p: &ModelParams,
) -> RunResult<(mlzlab_core::dynamics::ThermalizationRun, mlzlab_core::Distribution)> {
    let spec = HamiltonianSpec::eff_thermalization(p)?;
    let run = thermalization_run(&spec, &integration(ctx, &spec)?)?;
    let d = &run.distribution;
    // basis label n2 ↦ δn = 2n2 − n
    let labels = d.labels.iter().map(|&l| Label::Index(2 * label_index(l) - p.n as i64)).collect();
    let relabelled = mlzlab_core::Distribution::new(labels, d.probs.clone(), d.provenance, d.params);
    Ok((run, relabelled))
}

fn fig_gibbs(ctx: &Ctx) -> RunResult<Report> {
    let s = &ctx.settings;
    let p = ModelParams::new(s.usize("model.n")?, s.positive("model.g")?, s.positive("model.beta")?, s.f64("model.epsilon")?)?;
    let (run, numeric) = heff_run(ctx, &p)?;
    let exact = gibbs_delta_distribution(p.n, p.g, p.beta)?;
    let mut panel = Panel::new("gibbs", &["delta_n", "p_numeric", "p_gibbs", "abs_diff"]);
    for ((l, &a), &b) in numeric.labels.iter().zip(&numeric.probs).zip(&exact.probs) {
        panel.push([label_index(*l) as f64, a, b, (a - b).abs()]);
    }
    let tv = numeric.total_variation(&exact);
    let mut rep = Report { panels: vec![panel], ..Report::default() };
    rep.checks.push(Check::at_most("total variation to the Gibbs form", tv, 1e-2));
    rep.checks.push(normalization("numeric P_dn", numeric.total(), false));
    rep.checks.push(normalization("Gibbs P_dn", exact.total(), true));
    rep.note("max_abs_diff", numeric.max_abs_diff(&exact));
    rep.note("total_variation", tv);
    rep.note("t_start", run.t_start);
    rep.note("t_start_sensitivity", run.t_start_sensitivity);
    Ok(rep)
}

const N2_KEYS: &[KeySpec] = &[
    KeySpec { key: "model.n", default: "50", help: "pairs in the sector" },
    KeySpec { key: "model.g", default: "1.0", help: "coupling g" },
    KeySpec { key: "model.epsilon", default: "1.0", help: "channel splitting" },
    KeySpec { key: "grid.ratio", default: "[0.5, 1.0, 2.0, 4.0, 8.0]", help: "values of β/(2πg²)" },
];

pub const FIG_N2: Experiment = Experiment {
    name: "fig-n2",
    about: "late-time <n2> against the thermal coth form",
    keys: &[N2_KEYS, INTEGRATION],
    run: fig_n2,
};

fn fig_n2(ctx: &Ctx) -> RunResult<Report> {
    let s = &ctx.settings;
    let (n, g, eps) = (s.usize("model.n")?, s.positive("model.g")?, s.f64("model.epsilon")?);
    let ratios = s.f64_list("grid.ratio")?;
    let rows = par_map(&ratios, |&r| {
        let p = ModelParams::new(n, g, 2.0 * PI * g * g * r, eps)?;
        let (run, numeric) = heff_run(ctx, &p)?;
        let n2 = 0.5 * (numeric.mean() + n as f64);
        Ok((p, n2, numeric.total(), run.t_start_sensitivity))
    })?;
    let mut panel = Panel::new(
        "n2",
        &["ratio", "beta", "n2_numeric", "n2_gibbs_sector", "n2_coth", "rel_err_coth", "t_start_sensitivity"],
    );
    let mut rep = Report::default();
    let mut worst = 0.0f64;
    for (&r, &(p, n2, total, sens)) in ratios.iter().zip(&rows) {
        let sector = gibbs_mean_n2(n, g, p.beta)?;
        let coth = gibbs_mean_n2_leading(g, p.beta);
        let rel = (n2 - coth).abs() / coth;
        if r >= 1.0 {
            worst = worst.max(rel);
        }
        rep.checks.push(normalization(format!("numeric P at ratio {r}"), total, false));
        panel.push([r, p.beta, n2, sector, coth, rel, sens]);
    }
    rep.checks.push(Check::at_most("<n2> vs coth form for ratio >= 1 (rel)", worst, 0.05));
    rep.panels.push(panel);
    Ok(rep)
}
