//! Named experiments: figure reproductions and verification suites.

mod figures;
mod verify;

use crate::config::{ConfigError, KeySpec, Settings};
use crate::report::Report;
use mlzlab_core::dynamics::IntegrationConfig;
use mlzlab_core::model::HamiltonianSpec;
use mlzlab_core::MlzError;
use rayon::prelude::*;
use std::fmt;

/// Why an experiment could not produce a report.
#[derive(Debug)]
pub enum RunError {
    Config(ConfigError),
    Model(MlzError),
}

impl fmt::Display for RunError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RunError::Config(e) => write!(f, "{e}"),
            RunError::Model(e) => write!(f, "{e}"),
        }
    }
}

impl From<ConfigError> for RunError {
    fn from(e: ConfigError) -> Self {
        RunError::Config(e)
    }
}

impl From<MlzError> for RunError {
    fn from(e: MlzError) -> Self {
        RunError::Model(e)
    }
}

pub type RunResult<T> = Result<T, RunError>;

/// Inputs shared by every experiment.
pub struct Ctx {
    pub settings: Settings,
    pub seed: u64,
}

pub struct Experiment {
    pub name: &'static str,
    pub about: &'static str,
    /// Declared keys, in groups.
    pub keys: &'static [&'static [KeySpec]],
    pub run: fn(&Ctx) -> RunResult<Report>,
}

pub const EXPERIMENTS: &[Experiment] = &[
    figures::FIG_PN,
    figures::FIG_PHASES,
    figures::FIG_AVERAGES,
    figures::FIG_ETA,
    figures::FIG_GIBBS,
    figures::FIG_N2,
    verify::VERIFY_DO3,
    verify::VERIFY_SINGLE,
    verify::VERIFY_TWO_CHANNEL,
    verify::VERIFY_INTEGRABILITY,
    verify::VERIFY_SEMICLASSICAL,
];

impl Experiment {
    pub fn schema(&self) -> Vec<KeySpec> {
        self.keys.iter().flat_map(|g| g.iter().copied()).collect()
    }
}

pub fn find(name: &str) -> Option<&'static Experiment> {
    EXPERIMENTS.iter().find(|e| e.name == name)
}

/// The verification suites run by `verify-all`.
pub fn verification_suites() -> impl Iterator<Item = &'static Experiment> {
    EXPERIMENTS.iter().filter(|e| e.name.starts_with("verify-"))
}

/// Maps `f` over `items` on the current pool, keeping input order.
pub(crate) fn par_map<T, R, F>(items: &[T], f: F) -> RunResult<Vec<R>>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> RunResult<R> + Sync + Send,
{
    items.par_iter().map(f).collect()
}

/// Integration keys shared by simulation experiments.
pub(crate) const INTEGRATION: &[KeySpec] = &[
    KeySpec { key: "integration.rel_tol", default: "1e-10", help: "relative tolerance of the stepper" },
    KeySpec { key: "integration.abs_tol", default: "1e-12", help: "absolute tolerance of the stepper" },
    KeySpec { key: "integration.window", default: "0", help: "half-width T of the sweep; 0 selects it from the parameters" },
];

/// Stepper settings for `spec` from the `integration.*` keys.
pub(crate) fn integration(ctx: &Ctx, spec: &HamiltonianSpec) -> RunResult<IntegrationConfig> {
    let s = &ctx.settings;
    let mut cfg = IntegrationConfig::for_spec(spec)
        .with_tolerances(s.positive("integration.rel_tol")?, s.positive("integration.abs_tol")?);
    let window = s.f64("integration.window")?;
    if window < 0.0 {
        return Err(ConfigError(format!("`integration.window` must be >= 0, got {window}")).into());
    }
    if window > 0.0 {
        cfg = cfg.with_window(window);
    }
    Ok(cfg)
}
