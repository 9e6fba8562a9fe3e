use alloc::vec::Vec;

use crate::algebra::MajoranaSet;
use crate::error::{bail, Result};
use crate::linalg::{self, CMat, C64, IM};

/// exp(θ γ_aγ_b) for distinct Majoranas.
fn exp_pair(set: &MajoranaSet, a: usize, b: usize, theta: f64) -> CMat {
    let g = set.product(&[a, b]);
    linalg::identity(set.dim()) * linalg::re(libm::cos(theta)) + g * linalg::re(libm::sin(theta))
}

/// Orthonormal basis of the states annihilated by γ_4 + iγ_5 on six Majoranas γ_0 … γ_5.
pub fn bk_valid_states(set: &MajoranaSet) -> Result<CMat> {
    if set.count() != 6 {
        bail!(Argument, "the expansion needs 6 Majoranas, got {}", set.count());
    }
    let m = set.gamma(4) + set.gamma(5) * IM;
    let e = linalg::eigh(&(m.adjoint() * &m));
    let k = e.values.iter().take_while(|&&v| v.abs() < 1e-10).count();
    Ok(e.vectors.columns(0, k).into_owned())
}

/// One outcome branch of the four-Majorana expansion.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BkBranch {
    pub p1: i8,
    pub p2: i8,
    /// Largest ‖LHS ψ - e^{iθ} RHS ψ‖ over the supplied states, at the best common phase θ;
    /// `None` for a branch of zero probability.
    pub discrepancy: Option<f64>,
    /// Mean probability of the branch over the supplied states.
    pub probability: f64,
}

/// Compares exp(iπ/4 γ_0γ_1γ_2γ_3)|ψ⟩ with
/// 2 exp(π/4 (1-p_1p_2) γ_0γ_1) exp(π/4 (1-p_1p_2) γ_2γ_3) exp(-π/4 p_2 γ_2γ_5)
/// ½(1 + p_2 iγ_2γ_4) ½(1 - p_1 γ_0γ_1γ_3γ_4)|ψ⟩ on the columns of `states`.
pub fn bravyi_kitaev_check(set: &MajoranaSet, states: &CMat, p1: i8, p2: i8) -> Result<BkBranch> {
    if set.count() != 6 {
        bail!(Argument, "the expansion needs 6 Majoranas, got {}", set.count());
    }
    if ![p1, p2].iter().all(|p| *p == 1 || *p == -1) {
        bail!(Argument, "outcomes must be ±1");
    }
    let id = linalg::identity(set.dim());
    let (f1, f2) = (p1 as f64, p2 as f64);
    let four = set.product(&[0, 1, 2, 3]);
    let lhs = linalg::exp_involution(&four, core::f64::consts::FRAC_PI_4) * states;
    let proj1 = (&id - set.product(&[0, 1, 3, 4]) * linalg::re(f1)) * linalg::re(0.5);
    let proj2 = (&id + set.product(&[2, 4]) * C64::new(0.0, f2)) * linalg::re(0.5);
    let q = core::f64::consts::FRAC_PI_4 * (1.0 - f1 * f2);
    let rotation = exp_pair(set, 0, 1, q) * exp_pair(set, 2, 3, q) * exp_pair(set, 2, 5, -core::f64::consts::FRAC_PI_4 * f2);
    let projected = proj2 * proj1 * states;
    let k = states.ncols().max(1);
    let probability = projected.iter().map(|z| z.norm_sqr()).sum::<f64>() / k as f64;
    if probability < super::register::IMPOSSIBLE_BRANCH {
        return Ok(BkBranch { p1, p2, discrepancy: None, probability });
    }
    let rhs = rotation * projected * linalg::re(2.0);
    let phase = linalg::optimal_phase(&lhs, &rhs);
    let diff = lhs - rhs * phase;
    let discrepancy = (0..diff.ncols())
        .map(|j| linalg::vec_norm(&diff.column(j).into_owned()))
        .fold(0.0, f64::max);
    Ok(BkBranch { p1, p2, discrepancy: Some(discrepancy), probability })
}

/// Runs [`bravyi_kitaev_check`] on all four outcome branches over the valid initial states.
pub fn bravyi_kitaev_all_branches() -> Result<Vec<BkBranch>> {
    let set = MajoranaSet::new(6)?;
    let states = bk_valid_states(&set)?;
    let mut out = Vec::with_capacity(4);
    for p1 in [1, -1] {
        for p2 in [1, -1] {
            out.push(bravyi_kitaev_check(&set, &states, p1, p2)?);
        }
    }
    Ok(out)
}

/// U_z = exp(-iπ/4 σ_z) and U_x = exp(-iπ/4 σ_x) on one qubit.
pub fn braid_generators() -> [CMat; 2] {
    let q = -core::f64::consts::FRAC_PI_4;
    [linalg::exp_involution(&linalg::pauli_z(), q), linalg::exp_involution(&linalg::pauli_x(), q)]
}

/// All products of `generators`, modulo a global phase.
pub fn group_closure(generators: &[CMat], limit: usize) -> Result<Vec<CMat>> {
    let Some(first) = generators.first() else {
        bail!(Argument, "no generators");
    };
    let mut elements = alloc::vec![linalg::identity(first.nrows())];
    let mut frontier = elements.clone();
    while !frontier.is_empty() {
        let mut next = Vec::new();
        for g in &frontier {
            for h in generators {
                let c = h * g;
                if !elements.iter().any(|e| linalg::phase_distance(e, &c) < 1e-9) {
                    if elements.len() >= limit {
                        bail!(Convergence, "group has more than {limit} elements");
                    }
                    elements.push(c.clone());
                    next.push(c);
                }
            }
        }
        frontier = next;
    }
    Ok(elements)
}

/// Output error after one 15-to-1 distillation round, 35 ε³.
pub fn distillation_error(eps_in: f64) -> Result<f64> {
    if !(0.0..0.14).contains(&eps_in) {
        bail!(Argument, "input error {eps_in} outside [0, 0.14)");
    }
    Ok(35.0 * eps_in * eps_in * eps_in)
}

/// Errors after successive distillation rounds, starting with `eps_in`, until one is ≤ `target`.
pub fn distillation_sequence(eps_in: f64, target: f64) -> Result<Vec<f64>> {
    if !(target > 0.0) {
        bail!(Argument, "target must be positive");
    }
    let mut seq = alloc::vec![eps_in];
    let mut eps = eps_in;
    while eps > target {
        if seq.len() > 64 {
            bail!(Convergence, "distillation not below {target} after 64 rounds");
        }
        eps = distillation_error(eps)?;
        seq.push(eps);
    }
    Ok(seq)
}
