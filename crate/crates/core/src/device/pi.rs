use alloc::vec;

use super::{check_flux_range, leg_weight, CouplingSet, FluxConfig, MajoranaLabel};
use crate::algebra::MajoranaSet;
use crate::error::{bail, Result};
use crate::linalg::CMat;

use MajoranaLabel::*;

/// Aharonov-Bohm phases of the π-shaped circuit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PiPhases {
    pub bg: f64,
    pub g1: f64,
    pub one_b: f64,
    pub a12: f64,
    pub a23: f64,
    pub a31: f64,
}

impl PiPhases {
    /// Phases for fluxes (x_0, x_1, x_2, x_3).
    pub fn from_flux(x: &[f64]) -> Result<Self> {
        if x.len() != 4 {
            bail!(Argument, "π-circuit needs 4 fluxes, got {}", x.len());
        }
        check_flux_range(x)?;
        let a12 = 0.5 * (x[1] + x[2]);
        let a23 = 0.5 * (x[2] + x[3]);
        Ok(Self {
            bg: 0.5 * x[0],
            g1: 0.5 * x[1],
            one_b: -0.5 * (x[0] + x[1]),
            a12,
            a23,
            a31: -a12 - a23,
        })
    }

    /// cos of (α_g1, α_1b, α_bg): weights of (γ_b2, γ_g1, γ_11) in γ_B.
    pub fn left_junction(&self) -> [f64; 3] {
        [libm::cos(self.g1), libm::cos(self.one_b), libm::cos(self.bg)]
    }

    /// cos of (α_23, α_31, α_12): weights of (γ_12, γ_21, γ_31) in γ_E.
    pub fn right_junction(&self) -> [f64; 3] {
        [libm::cos(self.a23), libm::cos(self.a31), libm::cos(self.a12)]
    }
}

/// Δ_1, Δ_2, Δ_3 of the π-circuit for fluxes (x_0 … x_3) and Coulomb couplings (U_1, U_2, U_3).
pub fn pi_couplings(flux: &FluxConfig, u: &[f64]) -> Result<CouplingSet> {
    if u.len() != 3 {
        bail!(Argument, "π-circuit needs 3 Coulomb couplings, got {}", u.len());
    }
    let p = PiPhases::from_flux(flux.phases())?;
    Ok(pi_couplings_from_phases(&p, u))
}

/// Same as [`pi_couplings`] but taking the phases directly, without the flux-range check.
pub fn pi_couplings_from_phases(p: &PiPhases, u: &[f64]) -> CouplingSet {
    let left = p.left_junction();
    let right = p.right_junction();
    let d1 = u[0] * leg_weight(left, 2) * leg_weight(right, 0);
    let d2 = u[1] * leg_weight(right, 1);
    let d3 = u[2] * leg_weight(right, 2);
    CouplingSet {
        u: u.to_vec(),
        delta: vec![d1, d2, d3],
        labels: vec![(B, E), (E, F), (E, C)],
    }
}

/// Weights of (γ_b2, γ_g1, γ_11) in γ_B and of (γ_12, γ_21, γ_31) in γ_E.
pub fn pi_zero_mode_weights(flux: &FluxConfig) -> Result<([f64; 3], [f64; 3])> {
    let p = PiPhases::from_flux(flux.phases())?;
    let w = |c: [f64; 3]| [leg_weight(c, 0), leg_weight(c, 1), leg_weight(c, 2)];
    Ok((w(p.left_junction()), w(p.right_junction())))
}

/// Readout couplings Δ_± = δ_± cos α_g1 / sqrt(cos²α_bg + cos²α_g1 + cos²α_1b).
pub fn pi_delta_pm(delta_pm: (f64, f64), flux: &FluxConfig) -> Result<(f64, f64)> {
    let p = PiPhases::from_flux(flux.phases())?;
    let w = leg_weight(p.left_junction(), 0);
    Ok((delta_pm.0 * w, delta_pm.1 * w))
}

/// -Σ Δ_i iγ_aγ_b on a six-Majorana set indexed A..F.
pub fn effective_braiding_hamiltonian(couplings: &CouplingSet, majoranas: &MajoranaSet) -> Result<CMat> {
    if majoranas.count() != 6 {
        bail!(Consistency, "effective Hamiltonian needs 6 Majoranas, got {}", majoranas.count());
    }
    if couplings.delta.len() != couplings.labels.len() {
        bail!(
            Consistency,
            "{} couplings but {} labels",
            couplings.delta.len(),
            couplings.labels.len()
        );
    }
    let terms: alloc::vec::Vec<_> = couplings
        .delta
        .iter()
        .zip(&couplings.labels)
        .map(|(&d, &(a, b))| (-d, a.index(), b.index()))
        .collect();
    Ok(majoranas.quadratic(&terms))
}

/// Positions of the ten microscopic Majoranas γ_b1, γ_b2, γ_g1, γ_g2, γ_11, γ_12, γ_21, γ_22,
/// γ_31, γ_32 in the microscopic set.
pub const MICRO_INDEX: [&str; 10] = ["b1", "b2", "g1", "g2", "11", "12", "21", "22", "31", "32"];

const B2: usize = 1;
const G1: usize = 2;
const M11: usize = 4;
const M12: usize = 5;
const M21: usize = 6;
const M22: usize = 7;
const M31: usize = 8;
const M32: usize = 9;

/// Ten-Majorana Hamiltonian -Σ_k iU_kγ_k1γ_k2 + V_M at vanishing superconducting phases,
/// with equal tunnel couplings E_M at both T-junctions.
pub fn microscopic_pi_hamiltonian(
    u: &[f64],
    tunnel: f64,
    flux: &FluxConfig,
    majoranas: &MajoranaSet,
) -> Result<CMat> {
    if majoranas.count() != 10 {
        bail!(Consistency, "microscopic model needs 10 Majoranas, got {}", majoranas.count());
    }
    if u.len() != 3 {
        bail!(Argument, "π-circuit needs 3 Coulomb couplings, got {}", u.len());
    }
    let p = PiPhases::from_flux(flux.phases())?;
    let c = libm::cos;
    let terms = [
        (-u[0], M11, M12),
        (-u[1], M21, M22),
        (-u[2], M31, M32),
        (tunnel * c(p.bg), B2, G1),
        (tunnel * c(p.g1), G1, M11),
        (tunnel * c(p.one_b), M11, B2),
        (tunnel * c(p.a12), M12, M21),
        (tunnel * c(p.a23), M21, M31),
        (tunnel * c(p.a31), M31, M12),
    ];
    Ok(majoranas.quadratic(&terms))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{eigvalsh, max_abs};

    fn flux(x: [f64; 4]) -> FluxConfig {
        FluxConfig::new(x.to_vec()).unwrap()
    }

    #[test]
    fn zero_flux_couplings() {
        let c = pi_couplings(&flux([0.0; 4]), &[1.0, 2.0, 3.0]).unwrap();
        let s3 = libm::sqrt(3.0);
        assert!((c.delta[0] - 1.0 / 3.0).abs() < 1e-15);
        assert!((c.delta[1] - 2.0 / s3).abs() < 1e-15);
        assert!((c.delta[2] - 3.0 / s3).abs() < 1e-15);
    }

    #[test]
    fn delta3_vanishes_at_quarter_turn() {
        // α_12 = π/2 needs x_1 + x_2 = π, outside the admissible flux box, so set the phases.
        let half = core::f64::consts::FRAC_PI_2;
        assert!(FluxConfig::new(vec![0.0, half, half, 0.0]).is_err());
        let p = PiPhases { bg: 0.0, g1: 0.4, one_b: -0.4, a12: half, a23: 0.3, a31: -half - 0.3 };
        let c = pi_couplings_from_phases(&p, &[1.0, 1.0, 1.0]);
        assert!(c.delta[2].abs() < 1e-15);
        assert!(c.delta[0].abs() > 0.1 && c.delta[1].abs() > 0.1);
    }

    #[test]
    fn single_coupling_spectrum() {
        let m = MajoranaSet::new(6).unwrap();
        let c = CouplingSet {
            u: vec![1.0; 3],
            delta: vec![0.0, 0.7, 0.0],
            labels: vec![(B, E), (E, F), (E, C)],
        };
        let h = effective_braiding_hamiltonian(&c, &m).unwrap();
        let ev = eigvalsh(&h);
        assert!(ev[..4].iter().all(|&e| (e + 0.7).abs() < 1e-12));
        assert!(ev[4..].iter().all(|&e| (e - 0.7).abs() < 1e-12));
    }

    #[test]
    fn zero_couplings_give_zero_hamiltonian() {
        let m = MajoranaSet::new(6).unwrap();
        let c = CouplingSet {
            u: vec![1.0; 3],
            delta: vec![0.0; 3],
            labels: vec![(B, E), (E, F), (E, C)],
        };
        assert_eq!(max_abs(&effective_braiding_hamiltonian(&c, &m).unwrap()), 0.0);
    }

    #[test]
    fn zero_flux_weights_are_uniform() {
        let (left, _) = pi_zero_mode_weights(&flux([0.0; 4])).unwrap();
        let w = 1.0 / libm::sqrt(3.0);
        assert!(left.iter().all(|&v| (v - w).abs() < 1e-15));
    }

    #[test]
    fn wrong_set_size_rejected() {
        let m = MajoranaSet::new(4).unwrap();
        let c = pi_couplings(&flux([0.0; 4]), &[1.0; 3]).unwrap();
        assert!(effective_braiding_hamiltonian(&c, &m).is_err());
    }
}
