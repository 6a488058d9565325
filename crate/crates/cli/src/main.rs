//! `mlzlab`: runs named experiments and writes CSV panels with JSON sidecars.
//!
//! Exit status is 0 when every embedded check passes, 1 when a check fails
//! or a computation errors, and 2 for usage errors (nothing is written).

mod config;
mod experiments;
mod output;
mod report;

use clap::Parser;
use config::Settings;
use experiments::{Ctx, Experiment, RunError};
use output::RunInfo;
use report::{check_table, Report};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

const USAGE_ERROR: u8 = 2;
const CHECK_FAILURE: u8 = 1;
const DEFAULT_OUT: &str = "mlzlab-out";

#[derive(Parser, Debug)]
#[command(name = "mlzlab", version, about = "Run multistate Landau-Zener and Tavis-Cummings experiments")]
struct Args {
    /// Experiment name, `verify-all`, or `list` to show experiments and keys.
    experiment: String,
    /// Settings file of `key = value` lines with `[section]` headers.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Override one setting, e.g. `--set model.n=60`. Repeatable.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
    /// Output directory; falls back to $MLZLAB_OUT, then `mlzlab-out`.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads for grid points (default: all cores).
    #[arg(long, value_parser = clap::value_parser!(u32).range(1..))]
    workers: Option<u32>,
    /// Seed for randomized grids and initial conditions.
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

fn out_dir(args: &Args) -> PathBuf {
    args.out
        .clone()
        .or_else(|| std::env::var_os("MLZLAB_OUT").filter(|v| !v.is_empty()).map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from(DEFAULT_OUT))
}

fn list() {
    for e in experiments::EXPERIMENTS {
        println!("{}: {}", e.name, e.about);
        for k in e.schema() {
            println!("    {} = {}    # {}", k.key, k.default, k.help);
        }
    }
    println!("verify-all: every verify-* experiment at its defaults, summarized in one table");
}

fn usage(msg: impl std::fmt::Display) -> ExitCode {
    eprintln!("usage error: {msg}");
    ExitCode::from(USAGE_ERROR)
}

/// Runs one experiment and writes its outputs; `Err` carries a usage error.
fn execute(e: &Experiment, settings: Settings, seed: u64, out: &Path) -> Result<Option<Report>, String> {
    let info_settings = settings.to_json();
    let ctx = Ctx { settings, seed };
    let start = Instant::now();
    let report = match (e.run)(&ctx) {
        Ok(r) => r,
        Err(RunError::Config(c)) => return Err(c.to_string()),
        Err(RunError::Model(m)) => {
            eprintln!("{}: computation failed: {m}", e.name);
            return Ok(None);
        }
    };
    let info = RunInfo { experiment: e.name, settings: info_settings, seed };
    match output::write_report(out, &info, &report) {
        Ok(paths) => {
            for p in paths {
                println!("wrote {}", p.display());
            }
        }
        Err(err) => {
            eprintln!("{}: cannot write output: {err}", e.name);
            return Ok(None);
        }
    }
    println!("{}: {} checks in {:.2} s", e.name, report.checks.len(), start.elapsed().as_secs_f64());
    Ok(Some(report))
}

fn run_single(e: &Experiment, args: &Args) -> ExitCode {
    let settings = match Settings::load(&e.schema(), args.config.as_deref(), &args.set) {
        Ok(s) => s,
        Err(err) => return usage(err),
    };
    match execute(e, settings, args.seed, &out_dir(args)) {
        Err(msg) => usage(msg),
        Ok(None) => ExitCode::from(CHECK_FAILURE),
        Ok(Some(report)) => {
            let rows: Vec<(String, &report::Check)> = report.checks.iter().map(|c| (c.name.clone(), c)).collect();
            print!("{}", check_table(&rows));
            let failures: Vec<_> = report.failures().collect();
            if failures.is_empty() {
                ExitCode::SUCCESS
            } else {
                for f in failures {
                    eprintln!("FAIL {}: observed {:e}, required {}", f.name, f.observed, f.tolerance);
                }
                ExitCode::from(CHECK_FAILURE)
            }
        }
    }
}

fn run_all(args: &Args) -> ExitCode {
    if args.config.is_some() || !args.set.is_empty() {
        return usage("verify-all runs every suite at its defaults; --config and --set are not accepted");
    }
    let out = out_dir(args);
    let mut reports = Vec::new();
    let mut broken = Vec::new();
    for e in experiments::verification_suites() {
        let settings = Settings::resolve(&e.schema(), None, &[]).expect("defaults parse");
        match execute(e, settings, args.seed, &out) {
            Ok(Some(r)) => reports.push((e.name, r)),
            Ok(None) | Err(_) => broken.push(e.name),
        }
    }
    let rows: Vec<(String, &report::Check)> = reports
        .iter()
        .flat_map(|(name, r)| r.checks.iter().map(move |c| (format!("{name}: {}", c.name), c)))
        .collect();
    println!();
    print!("{}", check_table(&rows));
    let mut summary = report::Panel::new("summary", &["check", "tolerance", "observed", "pass"]);
    for (name, c) in &rows {
        summary.push([name.clone(), c.tolerance.clone(), c.observed.to_string(), c.pass.to_string()]);
    }
    let combined = Report { panels: vec![summary], checks: rows.iter().map(|(_, c)| (*c).clone()).collect(), ..Report::default() };
    let info = RunInfo { experiment: "verify-all", settings: serde_json::json!({}), seed: args.seed };
    if let Err(err) = output::write_report(&out, &info, &combined) {
        eprintln!("verify-all: cannot write output: {err}");
        return ExitCode::from(CHECK_FAILURE);
    }
    for name in &broken {
        eprintln!("FAIL {name}: did not complete");
    }
    let failed = rows.iter().filter(|(_, c)| !c.pass).count();
    if failed == 0 && broken.is_empty() {
        println!("all {} checks passed", rows.len());
        ExitCode::SUCCESS
    } else {
        println!("{failed} checks failed, {} suites did not complete", broken.len());
        ExitCode::from(CHECK_FAILURE)
    }
}

fn main() -> ExitCode {
    let args = Args::parse();
    if args.experiment == "list" {
        list();
        return ExitCode::SUCCESS;
    }
    let all = matches!(args.experiment.as_str(), "verify-all" | "verify_all");
    let experiment = experiments::find(&args.experiment);
    if !all && experiment.is_none() {
        let names: Vec<&str> = experiments::EXPERIMENTS.iter().map(|e| e.name).collect();
        return usage(format!("unknown experiment `{}`; expected one of {}, verify-all", args.experiment, names.join(", ")));
    }
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(k) = args.workers {
        pool = pool.num_threads(k as usize);
    }
    let pool = match pool.build() {
        Ok(p) => p,
        Err(e) => {
            eprintln!("cannot start worker pool: {e}");
            return ExitCode::from(CHECK_FAILURE);
        }
    };
    pool.install(|| match experiment {
        Some(e) if !all => run_single(e, &args),
        _ => run_all(&args),
    })
}
