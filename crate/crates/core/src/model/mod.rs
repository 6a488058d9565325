//! Dense Hamiltonian builders over documented, fixed basis orderings.
//!
//! Every model is stored as a short sum `H(t, τ) = Σ_k c_k(t, τ) M_k` of
//! constant real symmetric matrices with scalar coefficients drawn from
//! `{1, t, τ, 1/t, 1/τ}`. That structure gives analytic derivatives for the
//! integrability checks and closed-form diagonal phases for the propagator.
//!
//! Basis orderings:
//! - three-level and two-level models: levels `0, 1, 2` as written.
//! - single channel: `m = 0..=N` dissociated molecules.
//! - two channels: pairs `(n₁, n₂)` with `n₁ + n₂ ≤ N`, lexicographic.
//! - thermalization model: `n₂ = 0..=n` inside a sector of `n` pairs.

mod builders;
mod dump;

pub use builders::{
    do3_hamiltonian, do3_partner, heff2_hamiltonian, heff_thermalization, tc_single_hamiltonian,
    tc_two_channel_hamiltonian, tc_two_channel_partner,
};
pub use dump::{parse_dump, MatrixDump};

use crate::error::{MlzError, Result};
use crate::params::ModelParams;
use crate::tolerance::POLE_PROXIMITY;
use nalgebra::DMatrix;
use std::fmt;

/// Which Hamiltonian a [`HamiltonianSpec`] generates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ModelKind {
    DO3,
    LZ2,
    DecayingCoupling2,
    TCSingle,
    TCTwoChannel,
    EffThermalization,
    DO3Partner,
    TCTwoChannelPartner,
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            ModelKind::DO3 => "DO3",
            ModelKind::LZ2 => "LZ2",
            ModelKind::DecayingCoupling2 => "DecayingCoupling2",
            ModelKind::TCSingle => "TCSingle",
            ModelKind::TCTwoChannel => "TCTwoChannel",
            ModelKind::EffThermalization => "EffThermalization",
            ModelKind::DO3Partner => "DO3Partner",
            ModelKind::TCTwoChannelPartner => "TCTwoChannelPartner",
        };
        f.write_str(s)
    }
}

impl std::str::FromStr for ModelKind {
    type Err = MlzError;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "DO3" => ModelKind::DO3,
            "LZ2" => ModelKind::LZ2,
            "DecayingCoupling2" => ModelKind::DecayingCoupling2,
            "TCSingle" => ModelKind::TCSingle,
            "TCTwoChannel" => ModelKind::TCTwoChannel,
            "EffThermalization" => ModelKind::EffThermalization,
            "DO3Partner" => ModelKind::DO3Partner,
            "TCTwoChannelPartner" => ModelKind::TCTwoChannelPartner,
            other => return Err(MlzError::Domain(format!("unknown model kind {other}"))),
        })
    }
}

/// Label of one basis vector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum BasisLabel {
    /// Plain level index of the few-level models.
    Level(usize),
    /// Number of dissociated molecules in the single-channel model.
    Split(usize),
    /// Pair occupations `(n₁, n₂)` of the two-channel model.
    Pair { n1: usize, n2: usize },
    /// Occupation of mode 2 inside a fixed-`n` sector.
    ModeTwo(usize),
}

impl fmt::Display for BasisLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BasisLabel::Level(k) => write!(f, "{k}"),
            BasisLabel::Split(m) => write!(f, "m={m}"),
            BasisLabel::Pair { n1, n2 } => write!(f, "({n1},{n2})"),
            BasisLabel::ModeTwo(k) => write!(f, "n2={k}"),
        }
    }
}

impl std::str::FromStr for BasisLabel {
    type Err = MlzError;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || MlzError::Domain(format!("bad basis label {s}"));
        let num = |v: &str| v.parse::<usize>().map_err(|_| bad());
        if let Some(v) = s.strip_prefix("m=") {
            Ok(BasisLabel::Split(num(v)?))
        } else if let Some(v) = s.strip_prefix("n2=") {
            Ok(BasisLabel::ModeTwo(num(v)?))
        } else if let Some(v) = s.strip_prefix('(').and_then(|v| v.strip_suffix(')')) {
            let (a, b) = v.split_once(',').ok_or_else(bad)?;
            Ok(BasisLabel::Pair { n1: num(a)?, n2: num(b)? })
        } else {
            Ok(BasisLabel::Level(num(s)?))
        }
    }
}

/// Scalar time dependence of one term.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Coefficient {
    One,
    T,
    Tau,
    InvT,
    InvTau,
}

impl Coefficient {
    pub fn eval(self, t: f64, tau: f64) -> f64 {
        match self {
            Coefficient::One => 1.0,
            Coefficient::T => t,
            Coefficient::Tau => tau,
            Coefficient::InvT => 1.0 / t,
            Coefficient::InvTau => 1.0 / tau,
        }
    }

    pub fn d_dt(self, t: f64, _tau: f64) -> f64 {
        match self {
            Coefficient::T => 1.0,
            Coefficient::InvT => -1.0 / (t * t),
            _ => 0.0,
        }
    }

    pub fn d_dtau(self, _t: f64, tau: f64) -> f64 {
        match self {
            Coefficient::Tau => 1.0,
            Coefficient::InvTau => -1.0 / (tau * tau),
            _ => 0.0,
        }
    }

    /// `∫_0^λ c(t₀ + s·dt, τ₀ + s·dτ) ds` along a straight segment.
    pub fn integral_along(self, t0: f64, tau0: f64, dt: f64, dtau: f64, lambda: f64) -> f64 {
        let inv = |x0: f64, dx: f64| {
            if dx == 0.0 {
                lambda / x0
            } else {
                (lambda * dx / x0).ln_1p() / dx
            }
        };
        match self {
            Coefficient::One => lambda,
            Coefficient::T => t0 * lambda + 0.5 * dt * lambda * lambda,
            Coefficient::Tau => tau0 * lambda + 0.5 * dtau * lambda * lambda,
            Coefficient::InvT => inv(t0, dt),
            Coefficient::InvTau => inv(tau0, dtau),
        }
    }
}

/// One structural term `c(t, τ) · M`.
#[derive(Debug, Clone, PartialEq)]
pub struct Term {
    pub coefficient: Coefficient,
    pub matrix: DMatrix<f64>,
}

/// Time-parameterized real symmetric Hamiltonian for one named model.
#[derive(Debug, Clone, PartialEq)]
pub struct HamiltonianSpec {
    pub kind: ModelKind,
    pub params: ModelParams,
    pub dim: usize,
    pub basis: Vec<BasisLabel>,
    pub terms: Vec<Term>,
}

impl HamiltonianSpec {
    pub fn basis_index(&self, label: BasisLabel) -> Option<usize> {
        self.basis.iter().position(|&l| l == label)
    }

    fn has(&self, c: Coefficient) -> bool {
        self.terms.iter().any(|term| term.coefficient == c)
    }

    /// True if some term carries `1/t`.
    pub fn singular_in_t(&self) -> bool {
        self.has(Coefficient::InvT)
    }

    /// True if some term carries `1/τ`.
    pub fn singular_in_tau(&self) -> bool {
        self.has(Coefficient::InvTau)
    }

    /// Rejects non-finite points and points on a `1/t` or `1/τ` pole.
    pub fn check_point(&self, t: f64, tau: f64) -> Result<()> {
        self.check_pole_distance(t, tau, 0.0)
    }

    /// Rejects points within `min_distance` of a `1/t` or `1/τ` pole
    /// (inclusive, so `0` rejects only the pole itself).
    pub fn check_pole_distance(&self, t: f64, tau: f64, min_distance: f64) -> Result<()> {
        if !(t.is_finite() && tau.is_finite()) {
            return Err(MlzError::Domain(format!("non-finite point ({t}, {tau})")));
        }
        if self.singular_in_t() && t.abs() <= min_distance {
            return Err(MlzError::Singularity(format!("{} has a 1/t pole; t = {t}", self.kind)));
        }
        if self.singular_in_tau() && tau.abs() <= min_distance {
            return Err(MlzError::Singularity(format!(
                "{} has a 1/tau pole; tau = {tau}",
                self.kind
            )));
        }
        Ok(())
    }

    /// Rejects points within [`POLE_PROXIMITY`] of a pole.
    pub fn check_pole_proximity(&self, t: f64, tau: f64) -> Result<()> {
        self.check_pole_distance(t, tau, POLE_PROXIMITY)
    }

    fn combine(&self, t: f64, tau: f64, weight: impl Fn(Coefficient) -> f64) -> Result<DMatrix<f64>> {
        self.check_point(t, tau)?;
        let mut out = DMatrix::zeros(self.dim, self.dim);
        for term in &self.terms {
            let w = weight(term.coefficient);
            if w != 0.0 {
                out += &term.matrix * w;
            }
        }
        Ok(out)
    }

    /// `H(t, τ)`.
    pub fn materialize(&self, t: f64, tau: f64) -> Result<DMatrix<f64>> {
        self.combine(t, tau, |c| c.eval(t, tau))
    }

    /// `∂H/∂t` at `(t, τ)`.
    pub fn d_dt(&self, t: f64, tau: f64) -> Result<DMatrix<f64>> {
        self.combine(t, tau, |c| c.d_dt(t, tau))
    }

    /// `∂H/∂τ` at `(t, τ)`.
    pub fn d_dtau(&self, t: f64, tau: f64) -> Result<DMatrix<f64>> {
        self.combine(t, tau, |c| c.d_dtau(t, tau))
    }

    /// Copy with one matrix entry (and its mirror) shifted; for detector tests.
    pub fn perturbed(&self, term: usize, i: usize, j: usize, delta: f64) -> Self {
        let mut out = self.clone();
        out.terms[term].matrix[(i, j)] += delta;
        if i != j {
            out.terms[term].matrix[(j, i)] += delta;
        }
        out
    }
}
