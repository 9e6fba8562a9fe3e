use alloc::vec;

use super::{check_flux_range, leg_weight, CouplingSet, MajoranaLabel};
use crate::error::{bail, Result};

use MajoranaLabel::*;

/// The nine Aharonov-Bohm phases α_{n,kk'} of one triangular-loop qubit.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct RammPhases {
    pub a12: f64,
    pub a25: f64,
    pub a51: f64,
    pub a23: f64,
    pub a34: f64,
    pub a42: f64,
    pub a4g: f64,
    pub ag5: f64,
    pub a54: f64,
}

impl RammPhases {
    /// Normalized weight cos α_25 / sqrt(cos²α_12 + cos²α_25 + cos²α_51).
    pub fn e_weight_25(&self) -> f64 {
        leg_weight(self.e_junction(), 1)
    }

    /// cos of (α_12, α_25, α_51).
    pub fn e_junction(&self) -> [f64; 3] {
        [libm::cos(self.a12), libm::cos(self.a25), libm::cos(self.a51)]
    }

    /// cos of (α_23, α_34, α_42).
    pub fn b_junction(&self) -> [f64; 3] {
        [libm::cos(self.a23), libm::cos(self.a34), libm::cos(self.a42)]
    }

    /// cos of (α_4g, α_g5, α_54).
    pub fn c_junction(&self) -> [f64; 3] {
        [libm::cos(self.a4g), libm::cos(self.ag5), libm::cos(self.a54)]
    }

    /// Largest |α|; all Δ keep their sign while this stays below π/2.
    pub fn max_abs(&self) -> f64 {
        [
            self.a12, self.a25, self.a51, self.a23, self.a34, self.a42, self.a4g, self.ag5, self.a54,
        ]
        .iter()
        .fold(0.0, |m, a| m.max(a.abs()))
    }
}

/// Phases of one qubit for its five fluxes (x_1 … x_5) and the global flux x_0, with compensating
/// fluxes between qubits so that qubits do not share phases.
pub fn ramm_phases(flux: &[f64], global_flux: f64) -> Result<RammPhases> {
    if flux.len() != 5 {
        bail!(Argument, "a RAMM qubit has 5 fluxes, got {}", flux.len());
    }
    check_flux_range(flux)?;
    check_flux_range(&[global_flux])?;
    let [x1, x2, x3, x4, x5] = [flux[0], flux[1], flux[2], flux[3], flux[4]];
    let x0 = global_flux;
    Ok(RammPhases {
        a12: 0.5 * (x0 + x1 + x2),
        a25: 0.5 * (x2 + 2.0 * x3 + 2.0 * x4 + x5),
        a51: -0.5 * (x0 + x1 + 2.0 * x2 + 2.0 * x3 + 2.0 * x4 + x5),
        a23: 0.5 * (x2 + x3),
        a34: 0.5 * (x3 + x4),
        a42: -0.5 * (x2 + 2.0 * x3 + x4),
        a4g: 0.5 * x4,
        ag5: 0.5 * x5,
        a54: -0.5 * (x4 + x5),
    })
}

/// Δ_{n,1} … Δ_{n,5} of the triangular qubit for Coulomb couplings U_{n,1} … U_{n,5}.
///
/// Labels follow `-iΔ_1γ_Fγ_E - iΔ_2γ_Eγ_B - iΔ_3γ_Bγ_A - iΔ_4γ_Bγ_C - iΔ_5γ_Eγ_C`.
pub fn ramm_couplings(phases: &RammPhases, u: &[f64]) -> Result<CouplingSet> {
    if u.len() != 5 {
        bail!(Argument, "a RAMM qubit has 5 Coulomb couplings, got {}", u.len());
    }
    let e = phases.e_junction();
    let b = phases.b_junction();
    let c = phases.c_junction();
    let d1 = u[0] * leg_weight(e, 1);
    let d2 = u[1] * leg_weight(b, 1) * leg_weight(e, 2);
    let d3 = u[2] * leg_weight(b, 2);
    let d4 = u[3] * leg_weight(b, 0) * leg_weight(c, 1);
    let d5 = u[4] * leg_weight(e, 0) * leg_weight(c, 0);
    Ok(CouplingSet {
        u: u.to_vec(),
        delta: vec![d1, d2, d3, d4, d5],
        labels: vec![(F, E), (E, B), (B, A), (B, C), (E, C)],
    })
}

/// Readout couplings Δ_± = δ_± Π_n cos α_{n,25} / sqrt(cos²α_{n,12} + cos²α_{n,25} + cos²α_{n,51}).
pub fn ramm_delta_pm(base: (f64, f64), phases: &[RammPhases]) -> (f64, f64) {
    let factor: f64 = phases.iter().map(RammPhases::e_weight_25).product();
    (base.0 * factor, base.1 * factor)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_flux_phases_vanish() {
        let p = ramm_phases(&[0.0; 5], 0.0).unwrap();
        assert_eq!(p.max_abs(), 0.0);
    }

    #[test]
    fn fourth_flux_alone() {
        let x4 = 0.6;
        let p = ramm_phases(&[0.0, 0.0, 0.0, x4, 0.0], 0.0).unwrap();
        assert_eq!(p.a4g, x4 / 2.0);
        assert_eq!(p.a34, x4 / 2.0);
        assert_eq!(p.a54, -x4 / 2.0);
        assert_eq!(p.a25, x4);
    }

    #[test]
    fn zero_phase_couplings() {
        let c = ramm_couplings(&RammPhases::default(), &[1.0; 5]).unwrap();
        let s3 = 1.0 / libm::sqrt(3.0);
        let expected = [s3, 1.0 / 3.0, s3, 1.0 / 3.0, 1.0 / 3.0];
        for (d, e) in c.delta.iter().zip(expected) {
            assert!((d - e).abs() < 1e-15);
        }
    }

    #[test]
    fn delta_pm_decays_with_qubits() {
        let base = (2.0, 0.5);
        assert_eq!(ramm_delta_pm(base, &[]), base);
        let p = RammPhases::default();
        let (dp, dm) = ramm_delta_pm(base, &[p, p, p]);
        let f = libm::pow(3.0, -1.5);
        assert!((dp - 2.0 * f).abs() < 1e-15 && (dm - 0.5 * f).abs() < 1e-15);
    }
}
