use super::{BasisLabel, Coefficient, HamiltonianSpec, ModelKind, Term};
use crate::error::{domain, Result};
use crate::params::ModelParams;
use nalgebra::DMatrix;

fn term(coefficient: Coefficient, matrix: DMatrix<f64>) -> Term {
    Term { coefficient, matrix }
}

fn set_sym(m: &mut DMatrix<f64>, i: usize, j: usize, v: f64) {
    m[(i, j)] = v;
    m[(j, i)] = v;
}

fn levels(n: usize) -> Vec<BasisLabel> {
    (0..n).map(BasisLabel::Level).collect()
}

/// Lexicographic `(n₁, n₂)` pairs with `n₁ + n₂ ≤ N`.
pub(crate) fn pair_basis(n: usize) -> Vec<BasisLabel> {
    let mut out = Vec::with_capacity((n + 1) * (n + 2) / 2);
    for n1 in 0..=n {
        for n2 in 0..=(n - n1) {
            out.push(BasisLabel::Pair { n1, n2 });
        }
    }
    out
}

/// Index of `(n₁, n₂)` in [`pair_basis`].
pub(crate) fn pair_index(n: usize, n1: usize, n2: usize) -> usize {
    // rows n1' < n1 contribute (n - n1' + 1) entries each
    n1 * (n + 1) - n1 * (n1.saturating_sub(1)) / 2 + n2
}

impl HamiltonianSpec {
    /// Three-level model `[[βt, g, g], [g, −τε, 0], [g, 0, τε]]`.
    pub fn do3(g: f64, beta: f64, eps: f64) -> Result<Self> {
        let params = ModelParams::new(1, g, beta, eps)?;
        let mut b = DMatrix::zeros(3, 3);
        b[(0, 0)] = beta;
        let mut b0 = DMatrix::zeros(3, 3);
        b0[(1, 1)] = -eps;
        b0[(2, 2)] = eps;
        let mut a = DMatrix::zeros(3, 3);
        set_sym(&mut a, 0, 1, g);
        set_sym(&mut a, 0, 2, g);
        Ok(Self {
            kind: ModelKind::DO3,
            params,
            dim: 3,
            basis: levels(3),
            terms: vec![term(Coefficient::T, b), term(Coefficient::Tau, b0), term(Coefficient::One, a)],
        })
    }

    /// Commuting partner of [`HamiltonianSpec::do3`]:
    /// `[[ε²τ/β − g²/(βτ), εg/β, −εg/β], [εg/β, −εt, −g²/(βτ)], [−εg/β, −g²/(βτ), εt]]`.
    pub fn do3_partner(g: f64, beta: f64, eps: f64) -> Result<Self> {
        let params = ModelParams::new(1, g, beta, eps)?;
        let mut tau = DMatrix::zeros(3, 3);
        tau[(0, 0)] = eps * eps / beta;
        let mut inv_tau = DMatrix::zeros(3, 3);
        inv_tau[(0, 0)] = -g * g / beta;
        set_sym(&mut inv_tau, 1, 2, -g * g / beta);
        let mut t = DMatrix::zeros(3, 3);
        t[(1, 1)] = -eps;
        t[(2, 2)] = eps;
        let mut one = DMatrix::zeros(3, 3);
        set_sym(&mut one, 0, 1, eps * g / beta);
        set_sym(&mut one, 0, 2, -eps * g / beta);
        Ok(Self {
            kind: ModelKind::DO3Partner,
            params,
            dim: 3,
            basis: levels(3),
            terms: vec![
                term(Coefficient::Tau, tau),
                term(Coefficient::InvTau, inv_tau),
                term(Coefficient::T, t),
                term(Coefficient::One, one),
            ],
        })
    }

    /// Two-level Landau-Zener model `[[βt, g], [g, 0]]`.
    pub fn lz2(g: f64, beta: f64) -> Result<Self> {
        let params = ModelParams::new(1, g, beta, 0.0)?;
        let mut b = DMatrix::zeros(2, 2);
        b[(0, 0)] = beta;
        let mut a = DMatrix::zeros(2, 2);
        set_sym(&mut a, 0, 1, g);
        Ok(Self {
            kind: ModelKind::LZ2,
            params,
            dim: 2,
            basis: levels(2),
            terms: vec![term(Coefficient::T, b), term(Coefficient::One, a)],
        })
    }

    /// Two-level model with decaying coupling `[[−ε, −γ/t], [−γ/t, ε]]`.
    ///
    /// Stored with `g = √γ`, `β = 1` so that `γ = g²/β`.
    pub fn decaying_coupling(eps: f64, gamma: f64) -> Result<Self> {
        if !(gamma >= 0.0) {
            return domain(format!("gamma must be >= 0, got {gamma}"));
        }
        let params = ModelParams::new(1, gamma.sqrt(), 1.0, eps)?;
        let mut one = DMatrix::zeros(2, 2);
        one[(0, 0)] = -eps;
        one[(1, 1)] = eps;
        let mut inv_t = DMatrix::zeros(2, 2);
        set_sym(&mut inv_t, 0, 1, -gamma);
        Ok(Self {
            kind: ModelKind::DecayingCoupling2,
            params,
            dim: 2,
            basis: levels(2),
            terms: vec![term(Coefficient::One, one), term(Coefficient::InvT, inv_t)],
        })
    }

    /// Single-channel model: diagonal `βt(N − m)`, `⟨m+1|H|m⟩ = g(m+1)√(N−m)`.
    pub fn tc_single(params: &ModelParams) -> Result<Self> {
        params.validate()?;
        let n = params.n;
        let dim = n + 1;
        let mut b = DMatrix::zeros(dim, dim);
        let mut a = DMatrix::zeros(dim, dim);
        for m in 0..=n {
            b[(m, m)] = params.beta * (n - m) as f64;
            if m < n {
                set_sym(&mut a, m + 1, m, params.g * (m + 1) as f64 * ((n - m) as f64).sqrt());
            }
        }
        Ok(Self {
            kind: ModelKind::TCSingle,
            params: *params,
            dim,
            basis: (0..=n).map(BasisLabel::Split).collect(),
            terms: vec![term(Coefficient::T, b), term(Coefficient::One, a)],
        })
    }

    /// Two-channel model in the `(n₁, n₂)` basis: diagonal
    /// `βt(N − n₁ − n₂) + τε(n₂ − n₁)`, couplings
    /// `⟨n₁−1, n₂|H|n₁, n₂⟩ = g n₁ √(N − n₁ − n₂ + 1)` and the same with `n₂`.
    pub fn tc_two_channel(params: &ModelParams) -> Result<Self> {
        params.validate()?;
        let n = params.n;
        let basis = pair_basis(n);
        let dim = basis.len();
        let mut b = DMatrix::zeros(dim, dim);
        let mut b0 = DMatrix::zeros(dim, dim);
        let mut a = DMatrix::zeros(dim, dim);
        for (i, label) in basis.iter().enumerate() {
            let BasisLabel::Pair { n1, n2 } = *label else { unreachable!() };
            let free = n - n1 - n2;
            b[(i, i)] = params.beta * free as f64;
            b0[(i, i)] = params.epsilon * (n2 as f64 - n1 as f64);
            let amp = |k: usize| params.g * k as f64 * ((free + 1) as f64).sqrt();
            if n1 > 0 {
                set_sym(&mut a, pair_index(n, n1 - 1, n2), i, amp(n1));
            }
            if n2 > 0 {
                set_sym(&mut a, pair_index(n, n1, n2 - 1), i, amp(n2));
            }
        }
        Ok(Self {
            kind: ModelKind::TCTwoChannel,
            params: *params,
            dim,
            basis,
            terms: vec![
                term(Coefficient::T, b),
                term(Coefficient::Tau, b0),
                term(Coefficient::One, a),
            ],
        })
    }

    /// Commuting partner of [`HamiltonianSpec::tc_two_channel`] with channel
    /// energies `ε₁ = −ε`, `ε₂ = +ε`:
    ///
    /// - diagonal `t ε(n₂ − n₁) − τ(ε²/β)(n₁ + n₂) + (g²/βτ)(2n₁+1)(2n₂+1)/2`;
    /// - the pair-creation couplings of `H` scaled by `−ε_k/β`;
    /// - hopping `−(g²/βτ)(n₁+1)n₂` between `(n₁, n₂)` and `(n₁+1, n₂−1)`.
    pub fn tc_two_channel_partner(params: &ModelParams) -> Result<Self> {
        params.validate()?;
        if params.epsilon == 0.0 {
            // the partner degenerates to a pure 1/τ exchange term; still valid
        }
        let n = params.n;
        let basis = pair_basis(n);
        let dim = basis.len();
        let (g, beta, eps) = (params.g, params.beta, params.epsilon);
        let mut t = DMatrix::zeros(dim, dim);
        let mut tau = DMatrix::zeros(dim, dim);
        let mut inv_tau = DMatrix::zeros(dim, dim);
        let mut one = DMatrix::zeros(dim, dim);
        for (i, label) in basis.iter().enumerate() {
            let BasisLabel::Pair { n1, n2 } = *label else { unreachable!() };
            let free = n - n1 - n2;
            t[(i, i)] = eps * (n2 as f64 - n1 as f64);
            tau[(i, i)] = -eps * eps / beta * (n1 + n2) as f64;
            inv_tau[(i, i)] = g * g / beta * ((2 * n1 + 1) * (2 * n2 + 1)) as f64 / 2.0;
            let amp = |k: usize| g * k as f64 * ((free + 1) as f64).sqrt();
            if n1 > 0 {
                set_sym(&mut one, pair_index(n, n1 - 1, n2), i, eps / beta * amp(n1));
            }
            if n2 > 0 {
                set_sym(&mut one, pair_index(n, n1, n2 - 1), i, -eps / beta * amp(n2));
                set_sym(
                    &mut inv_tau,
                    pair_index(n, n1 + 1, n2 - 1),
                    i,
                    -g * g / beta * ((n1 + 1) * n2) as f64,
                );
            }
        }
        Ok(Self {
            kind: ModelKind::TCTwoChannelPartner,
            params: *params,
            dim,
            basis,
            terms: vec![
                term(Coefficient::T, t),
                term(Coefficient::Tau, tau),
                term(Coefficient::InvTau, inv_tau),
                term(Coefficient::One, one),
            ],
        })
    }

    /// Effective thermalization model inside a sector of `n = params.n` pairs:
    /// diagonal `ε(2n₂ − n) − g²[n₂² + (n − n₂)²]/(βt)`, off-diagonal
    /// `−g²(n − n₂)(n₂ + 1)/(βt)` between `n₂` and `n₂ + 1`.
    pub fn eff_thermalization(params: &ModelParams) -> Result<Self> {
        params.validate()?;
        let n = params.n;
        let dim = n + 1;
        let c = params.g * params.g / params.beta;
        let mut one = DMatrix::zeros(dim, dim);
        let mut inv_t = DMatrix::zeros(dim, dim);
        for k in 0..=n {
            one[(k, k)] = params.epsilon * (2.0 * k as f64 - n as f64);
            inv_t[(k, k)] = -c * ((k * k + (n - k) * (n - k)) as f64);
            if k < n {
                set_sym(&mut inv_t, k, k + 1, -c * ((n - k) * (k + 1)) as f64);
            }
        }
        Ok(Self {
            kind: ModelKind::EffThermalization,
            params: *params,
            dim,
            basis: (0..=n).map(BasisLabel::ModeTwo).collect(),
            terms: vec![term(Coefficient::One, one), term(Coefficient::InvT, inv_t)],
        })
    }
}

/// Three-level matrix at `(t, τ)`.
pub fn do3_hamiltonian(g: f64, beta: f64, eps: f64, t: f64, tau: f64) -> Result<DMatrix<f64>> {
    HamiltonianSpec::do3(g, beta, eps)?.materialize(t, tau)
}

/// Commuting partner of the three-level matrix at `(t, τ)`; `τ ≠ 0`.
pub fn do3_partner(g: f64, beta: f64, eps: f64, t: f64, tau: f64) -> Result<DMatrix<f64>> {
    HamiltonianSpec::do3_partner(g, beta, eps)?.materialize(t, tau)
}

/// Single-channel matrix at time `t`.
pub fn tc_single_hamiltonian(params: &ModelParams, t: f64) -> Result<DMatrix<f64>> {
    HamiltonianSpec::tc_single(params)?.materialize(t, 1.0)
}

/// Two-channel matrix at time `t` (`τ = 1`).
pub fn tc_two_channel_hamiltonian(params: &ModelParams, t: f64) -> Result<DMatrix<f64>> {
    HamiltonianSpec::tc_two_channel(params)?.materialize(t, 1.0)
}

/// Two-channel partner at `(t, τ)`; `τ ≠ 0`.
pub fn tc_two_channel_partner(params: &ModelParams, t: f64, tau: f64) -> Result<DMatrix<f64>> {
    HamiltonianSpec::tc_two_channel_partner(params)?.materialize(t, tau)
}

/// Effective thermalization matrix for a sector of `n` pairs; `t > 0`.
pub fn heff_thermalization(n: usize, g: f64, beta: f64, eps: f64, t: f64) -> Result<DMatrix<f64>> {
    if !(t > 0.0) {
        return Err(crate::error::MlzError::Singularity(format!("need t > 0, got {t}")));
    }
    HamiltonianSpec::eff_thermalization(&ModelParams::new(n, g, beta, eps)?)?.materialize(t, 1.0)
}

/// Two-level decaying-coupling matrix; `t > 0`.
pub fn heff2_hamiltonian(eps: f64, gamma: f64, t: f64) -> Result<DMatrix<f64>> {
    if !(t > 0.0) {
        return Err(crate::error::MlzError::Singularity(format!("need t > 0, got {t}")));
    }
    HamiltonianSpec::decaying_coupling(eps, gamma)?.materialize(t, 1.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::MlzError;

    fn commutator_norm(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
        (a * b - b * a).norm()
    }

    #[test]
    fn pair_index_matches_basis() {
        for n in 0..8 {
            for (i, l) in pair_basis(n).iter().enumerate() {
                let BasisLabel::Pair { n1, n2 } = *l else { unreachable!() };
                assert_eq!(pair_index(n, n1, n2), i);
            }
        }
    }

    #[test]
    fn do3_structure() {
        let h = do3_hamiltonian(0.7, 2.0, 1.3, 0.4, 1.0).unwrap();
        assert!((h.trace() - 0.8).abs() < 1e-15);
        assert_eq!(h[(1, 2)], 0.0);
        assert_eq!(h, h.transpose());
        let e = do3_hamiltonian(1.0, 2.0, 0.0, 0.0, 1.0).unwrap().symmetric_eigenvalues();
        let mut v: Vec<f64> = e.iter().copied().collect();
        v.sort_by(f64::total_cmp);
        let s = 2f64.sqrt();
        assert!((v[0] + s).abs() < 1e-14 && v[1].abs() < 1e-14 && (v[2] - s).abs() < 1e-14);
    }

    #[test]
    fn do3_partner_commutes_and_matches_mixed_derivative() {
        let (g, beta, eps) = (0.8, 3.0, 1.7);
        let h = HamiltonianSpec::do3(g, beta, eps).unwrap();
        let hp = HamiltonianSpec::do3_partner(g, beta, eps).unwrap();
        for &(t, tau) in &[(0.3, 1.0), (-2.0, 0.5), (5.0, 3.0)] {
            let a = h.materialize(t, tau).unwrap();
            let b = hp.materialize(t, tau).unwrap();
            assert!(commutator_norm(&a, &b) < 1e-13);
            let mixed = h.d_dtau(t, tau).unwrap() - hp.d_dt(t, tau).unwrap();
            assert_eq!(mixed.norm(), 0.0);
        }
        let d = hp.materialize(0.0, 1.0).unwrap();
        assert!((d[(0, 0)] - (eps * eps - g * g) / beta).abs() < 1e-15);
        assert_eq!(d[(1, 1)], 0.0);
        assert_eq!(d[(2, 2)], 0.0);
        assert!(matches!(hp.materialize(1.0, 0.0), Err(MlzError::Singularity(_))));
    }

    #[test]
    fn tc_single_reduces_to_lz() {
        let p = ModelParams::new(1, 0.6, 2.0, 0.0).unwrap();
        let a = tc_single_hamiltonian(&p, 1.5).unwrap();
        let b = HamiltonianSpec::lz2(0.6, 2.0).unwrap().materialize(1.5, 1.0).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn tc_single_spectrum_symmetric_at_origin() {
        let p = ModelParams::new(3, 1.0, 1.0, 0.0).unwrap();
        let e = tc_single_hamiltonian(&p, 0.0).unwrap().symmetric_eigenvalues();
        let mut v: Vec<f64> = e.iter().copied().collect();
        v.sort_by(f64::total_cmp);
        for k in 0..v.len() {
            assert!((v[k] + v[v.len() - 1 - k]).abs() < 1e-13);
        }
    }

    #[test]
    fn two_channel_matches_single_at_empty_second_mode() {
        let p = ModelParams::new(5, 0.9, 1.5, 0.4).unwrap();
        let h2 = tc_two_channel_hamiltonian(&p, 0.7).unwrap();
        let h1 = tc_single_hamiltonian(&p, 0.7).unwrap();
        for n1 in 1..=5 {
            let a = h2[(pair_index(5, n1 - 1, 0), pair_index(5, n1, 0))];
            assert!((a - h1[(n1 - 1, n1)]).abs() < 1e-15);
        }
    }

    #[test]
    fn two_channel_n2_hand_enumeration() {
        let p = ModelParams::new(2, 1.0, 1.0, 0.5).unwrap();
        let h = tc_two_channel_hamiltonian(&p, 0.0).unwrap();
        assert_eq!(h.nrows(), 6);
        // basis: (0,0) (0,1) (0,2) (1,0) (1,1) (2,0)
        let s2 = 2f64.sqrt();
        assert!((h[(0, 1)] - s2).abs() < 1e-15); // (0,0)-(0,1): g·1·√2
        assert!((h[(1, 2)] - 2.0).abs() < 1e-15); // (0,1)-(0,2): g·2·√1
        assert!((h[(0, 3)] - s2).abs() < 1e-15);
        assert!((h[(1, 4)] - 1.0).abs() < 1e-15); // (0,1)-(1,1): g·1·√1
        assert!((h[(3, 4)] - 1.0).abs() < 1e-15);
        assert!((h[(3, 5)] - 2.0).abs() < 1e-15);
        assert_eq!(h[(0, 4)], 0.0);
        assert!((h[(2, 2)] - 1.0).abs() < 1e-15); // ε(n2 − n1) = 0.5·2
        assert!((h[(5, 5)] + 1.0).abs() < 1e-15);
    }

    #[test]
    fn two_channel_partner_commutes() {
        let p = ModelParams::new(4, 0.9, 2.3, 0.7).unwrap();
        let h = HamiltonianSpec::tc_two_channel(&p).unwrap();
        let hp = HamiltonianSpec::tc_two_channel_partner(&p).unwrap();
        for &(t, tau) in &[(0.2, 1.0), (-1.3, 2.5), (4.0, 0.3)] {
            let a = h.materialize(t, tau).unwrap();
            let b = hp.materialize(t, tau).unwrap();
            let rel = commutator_norm(&a, &b) / (a.norm() * b.norm());
            assert!(rel < 1e-14, "{rel}");
            let mixed = h.d_dtau(t, tau).unwrap() - hp.d_dt(t, tau).unwrap();
            assert_eq!(mixed.norm(), 0.0);
        }
    }

    #[test]
    fn heff_uniform_state_is_eigenvector_of_inverse_t_part() {
        let n = 6;
        let (g, beta) = (1.0, 2.0);
        let spec = HamiltonianSpec::eff_thermalization(&ModelParams::new(n, g, beta, 0.0).unwrap()).unwrap();
        let h = spec.materialize(0.5, 1.0).unwrap();
        let u = nalgebra::DVector::from_element(n + 1, 1.0);
        let hu = &h * &u;
        let e = -g * g * (n * (n + 1)) as f64 / (beta * 0.5);
        assert!((hu - u * e).norm() < 1e-12);
        assert!(heff_thermalization(n, g, beta, 1.0, 0.0).is_err());
    }

    #[test]
    fn heff_single_pair_eigenvalues() {
        let h = heff_thermalization(1, 1.0, 1.0, 0.0, 1.0).unwrap();
        let mut v: Vec<f64> = h.symmetric_eigenvalues().iter().copied().collect();
        v.sort_by(f64::total_cmp);
        assert!((v[0] + 2.0).abs() < 1e-14 && v[1].abs() < 1e-14);
    }

    #[test]
    fn heff2_entries() {
        let h = heff2_hamiltonian(0.5, 2.0, 4.0).unwrap();
        assert_eq!(h[(0, 0)], -0.5);
        assert_eq!(h[(1, 1)], 0.5);
        assert_eq!(h[(0, 1)], -0.5);
        assert!(heff2_hamiltonian(0.5, 2.0, 0.0).is_err());
    }

    #[test]
    fn particle_structure_of_two_channel_couplings() {
        let p = ModelParams::new(4, 1.0, 1.0, 1.0).unwrap();
        let spec = HamiltonianSpec::tc_two_channel(&p).unwrap();
        let h = spec.materialize(0.3, 1.0).unwrap();
        for i in 0..spec.dim {
            for j in 0..spec.dim {
                if i != j && h[(i, j)] != 0.0 {
                    let (BasisLabel::Pair { n1: a1, n2: a2 }, BasisLabel::Pair { n1: b1, n2: b2 }) =
                        (spec.basis[i], spec.basis[j])
                    else {
                        unreachable!()
                    };
                    let dn = (a1 + a2) as i64 - (b1 + b2) as i64;
                    assert_eq!(dn.abs(), 1);
                    assert_eq!((a1 as i64 - b1 as i64).abs() + (a2 as i64 - b2 as i64).abs(), 1);
                }
            }
        }
    }
}
