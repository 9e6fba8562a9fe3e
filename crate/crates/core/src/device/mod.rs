//! Device physics: flux-tunable Coulomb couplings, effective and microscopic Majorana
//! Hamiltonians, transmon spectra and the parameter-regime inequalities.

mod coulomb;
mod pi;
mod ramm;
mod regime;
mod transmon;

pub use coulomb::{
    charge_basis_levels, coulomb_coupling_asymptotic, coulomb_coupling_exact, IslandParams,
    DEFAULT_CHARGE_CUTOFF,
};
pub use pi::{
    effective_braiding_hamiltonian, microscopic_pi_hamiltonian, pi_couplings, pi_couplings_from_phases, pi_delta_pm,
    pi_zero_mode_weights, PiPhases, MICRO_INDEX,
};
pub use ramm::{ramm_couplings, ramm_delta_pm, ramm_phases, RammPhases};
pub use regime::{validate_regime, Inequality, RegimeParams, RegimeReport, Relation};
pub use transmon::{transmon_levels, TransmonSpectrum};

use alloc::vec::Vec;
use core::f64::consts::FRAC_PI_2;

use crate::error::{bail, Result};

/// Symbolic names of the six low-energy Majoranas γ_A … γ_F of one qubit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum MajoranaLabel {
    A,
    B,
    C,
    D,
    E,
    F,
}

impl MajoranaLabel {
    pub const ALL: [MajoranaLabel; 6] = [Self::A, Self::B, Self::C, Self::D, Self::E, Self::F];

    /// Position in a six-Majorana set; the pairs (A,B), (C,D), (E,F) are the modes c_1, c_2, c_3.
    pub fn index(self) -> usize {
        self as usize
    }

    pub fn from_char(c: char) -> Option<Self> {
        match c.to_ascii_uppercase() {
            'A' => Some(Self::A),
            'B' => Some(Self::B),
            'C' => Some(Self::C),
            'D' => Some(Self::D),
            'E' => Some(Self::E),
            'F' => Some(Self::F),
            _ => None,
        }
    }

    pub fn as_char(self) -> char {
        (b'A' + self as u8) as char
    }
}

impl core::fmt::Display for MajoranaLabel {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        write!(f, "{}", self.as_char())
    }
}

/// Dimensionless flux parameters x_k = eΦ_k/ħ, each with |x_k| < π/2.
#[derive(Debug, Clone, PartialEq)]
pub struct FluxConfig {
    phases: Vec<f64>,
}

impl FluxConfig {
    pub fn new(phases: Vec<f64>) -> Result<Self> {
        for (k, &x) in phases.iter().enumerate() {
            if !x.is_finite() || x.abs() >= FRAC_PI_2 {
                bail!(Argument, "flux x{k} = {x} outside the open interval (-π/2, π/2)");
            }
        }
        Ok(Self { phases })
    }

    pub fn zeros(n: usize) -> Self {
        Self {
            phases: alloc::vec![0.0; n],
        }
    }

    pub fn phases(&self) -> &[f64] {
        &self.phases
    }

    pub fn len(&self) -> usize {
        self.phases.len()
    }

    pub fn is_empty(&self) -> bool {
        self.phases.is_empty()
    }
}

/// Coulomb couplings U_k together with the derived Majorana couplings Δ_i.
///
/// The Hamiltonian they describe is `-Σ_i Δ_i iγ_{a_i}γ_{b_i}` with `(a_i, b_i) = labels[i]`.
#[derive(Debug, Clone, PartialEq)]
pub struct CouplingSet {
    pub u: Vec<f64>,
    pub delta: Vec<f64>,
    pub labels: Vec<(MajoranaLabel, MajoranaLabel)>,
}

impl CouplingSet {
    /// Checks |Δ_i| ≤ |U_i| (up to rounding).
    pub fn is_bounded(&self) -> bool {
        self.delta
            .iter()
            .zip(&self.u)
            .all(|(d, u)| d.abs() <= u.abs() * (1.0 + 1e-12))
    }

    /// Multiplies coupling `i` by -1 (fault injection for mutation tests).
    pub fn with_flipped_sign(mut self, i: usize) -> Self {
        if let Some(d) = self.delta.get_mut(i) {
            *d = -*d;
        }
        self
    }
}

pub(crate) fn check_flux_range(x: &[f64]) -> Result<()> {
    for (k, &v) in x.iter().enumerate() {
        if !v.is_finite() || v.abs() >= FRAC_PI_2 {
            bail!(Argument, "flux x{k} = {v} outside (-π/2, π/2)");
        }
    }
    Ok(())
}

/// cos α / sqrt(Σ cos² α) for the leg `leg` of a three-leg junction.
pub(crate) fn leg_weight(cosines: [f64; 3], leg: usize) -> f64 {
    let n = libm::sqrt(cosines.iter().map(|c| c * c).sum::<f64>());
    cosines[leg] / n
}
