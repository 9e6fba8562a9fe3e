use alloc::vec::Vec;
use core::f64::consts::PI;

use nalgebra::DMatrix;

use crate::error::{bail, Result};

/// Default number of charge states for the Cooper-pair-box diagonalization.
pub const DEFAULT_CHARGE_CUTOFF: usize = 40;

const MAX_CHARGE_STATES: usize = 2560;
const LEVEL_STABILITY: f64 = 1e-10;

/// Josephson and charging energies of one superconducting island, and its offset charge.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IslandParams {
    /// E_J(0) in GHz.
    pub josephson_zero: f64,
    /// E_C in GHz.
    pub charging: f64,
    /// Offset charge q in units of e.
    pub offset_charge: f64,
}

impl IslandParams {
    pub fn new(josephson_zero: f64, charging: f64, offset_charge: f64) -> Result<Self> {
        let p = Self {
            josephson_zero,
            charging,
            offset_charge,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.josephson_zero > 0.0) || !(self.charging > 0.0) {
            bail!(
                Argument,
                "island energies must be positive (E_J = {}, E_C = {})",
                self.josephson_zero,
                self.charging
            );
        }
        if !self.offset_charge.is_finite() {
            bail!(Argument, "offset charge must be finite");
        }
        Ok(())
    }

    /// Island with its split junction threaded by flux x: E_J = E_J(0) cos x.
    pub fn at_flux(&self, x: f64) -> Self {
        Self {
            josephson_zero: self.josephson_zero * libm::cos(x),
            ..*self
        }
    }

    pub fn ratio(&self) -> f64 {
        self.josephson_zero / self.charging
    }

    /// Whether E_J/E_C is in the range where the asymptotic coupling is trustworthy (≥ 10).
    pub fn asymptotic_regime(&self) -> bool {
        self.ratio() >= 10.0
    }
}

/// U = 16 (E_C E_J³ / 2π²)^{1/4} exp(-sqrt(8 E_J/E_C)) cos(π q).
pub fn coulomb_coupling_asymptotic(island: &IslandParams) -> Result<f64> {
    island.validate()?;
    let ej = island.josephson_zero;
    let ec = island.charging;
    let prefactor = 16.0 * libm::pow(ec * ej * ej * ej / (2.0 * PI * PI), 0.25);
    Ok(prefactor * libm::exp(-libm::sqrt(8.0 * ej / ec)) * libm::cos(PI * island.offset_charge))
}

/// Lowest `count` levels of 4E_C(n - n_g)² - (E_J/2)(|n⟩⟨n+1| + h.c.) on `states` charge states
/// centred at n = 0.
pub fn charge_basis_levels(ej: f64, ec: f64, ng: f64, states: usize, count: usize) -> Vec<f64> {
    let states = states.max(count).max(2);
    let offset = (states / 2) as f64;
    let mut h = DMatrix::<f64>::zeros(states, states);
    for i in 0..states {
        let n = i as f64 - offset;
        h[(i, i)] = 4.0 * ec * (n - ng) * (n - ng);
        if i + 1 < states {
            h[(i, i + 1)] = -0.5 * ej;
            h[(i + 1, i)] = -0.5 * ej;
        }
    }
    let mut values: Vec<f64> = h.symmetric_eigen().eigenvalues.iter().copied().collect();
    values.sort_by(f64::total_cmp);
    values.truncate(count);
    values
}

fn stable_levels(ej: f64, ec: f64, ng: f64, cutoff: usize) -> Result<Vec<f64>> {
    let mut states = cutoff.max(4);
    let mut previous = charge_basis_levels(ej, ec, ng, states, 2);
    loop {
        let next_states = states * 2;
        if next_states > MAX_CHARGE_STATES {
            bail!(
                Convergence,
                "charge-basis levels still moving at {states} states (E_J = {ej}, E_C = {ec}, n_g = {ng})"
            );
        }
        let next = charge_basis_levels(ej, ec, ng, next_states, 2);
        let change = previous
            .iter()
            .zip(&next)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        if change < LEVEL_STABILITY {
            return Ok(next);
        }
        previous = next;
        states = next_states;
    }
}

/// Half the splitting of the ground level between the two island-parity branches
/// (n_g and n_g + 1/2, with n_g = q/2), from the charge-basis Hamiltonian.
///
/// `charge_cutoff` is the initial number of charge states; it is doubled until the two lowest
/// levels move by less than 1e-10.
pub fn coulomb_coupling_exact(island: &IslandParams, charge_cutoff: usize) -> Result<f64> {
    if !(island.charging > 0.0) || !(island.josephson_zero >= 0.0) {
        bail!(Argument, "need E_C > 0 and E_J ≥ 0");
    }
    let ng = 0.5 * island.offset_charge;
    let even = stable_levels(island.josephson_zero, island.charging, ng, charge_cutoff)?;
    let odd = stable_levels(island.josephson_zero, island.charging, ng + 0.5, charge_cutoff)?;
    Ok(0.5 * (odd[0] - even[0]))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn half_charge_offset_kills_coupling() {
        let island = IslandParams::new(50.0, 1.0, 0.5).unwrap();
        assert!(coulomb_coupling_asymptotic(&island).unwrap().abs() < 1e-15);
    }

    #[test]
    fn decreasing_in_ratio() {
        let mut last = f64::INFINITY;
        for i in 0..200 {
            let r = 2.0 + 0.5 * i as f64;
            let u = coulomb_coupling_asymptotic(&IslandParams::new(r, 1.0, 0.0).unwrap()).unwrap();
            assert!(u < last, "not decreasing at ratio {r}");
            last = u;
        }
    }

    #[test]
    fn rejects_nonpositive_energies() {
        assert!(IslandParams::new(0.0, 1.0, 0.0).is_err());
        assert!(IslandParams::new(1.0, -1.0, 0.0).is_err());
    }

    #[test]
    fn zero_josephson_gives_charging_gap() {
        for ec in [0.5, 1.0, 3.0] {
            let island = IslandParams {
                josephson_zero: 0.0,
                charging: ec,
                offset_charge: 0.0,
            };
            let u = coulomb_coupling_exact(&island, DEFAULT_CHARGE_CUTOFF).unwrap();
            assert!((u - 0.5 * ec).abs() < 1e-12);
        }
    }
}
