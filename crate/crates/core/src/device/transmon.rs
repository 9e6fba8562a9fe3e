use alloc::vec::Vec;
use core::f64::consts::PI;

use crate::error::{bail, Result};

/// Transmon levels ε_n = ε̄_n - (-1)^n δε_n iγγ cos(πq) in the asymptotic E_J ≫ E_C regime.
#[derive(Debug, Clone, PartialEq)]
pub struct TransmonSpectrum {
    /// ε̄_n for n = 0..=n_max.
    pub mean_levels: Vec<f64>,
    /// δε_n for n = 0..=n_max.
    pub charge_dispersion: Vec<f64>,
    /// ħΩ_0 = ε̄_1 - ε̄_0.
    pub plasma_frequency: f64,
    /// E_J0/E_C ≥ 10.
    pub valid: bool,
}

impl TransmonSpectrum {
    /// δ_± = (δε_1 ± δε_0)/2.
    pub fn delta_pm(&self) -> (f64, f64) {
        let d0 = self.charge_dispersion[0];
        let d1 = self.charge_dispersion[1];
        (0.5 * (d1 + d0), 0.5 * (d1 - d0))
    }
}

fn factorial(n: usize) -> f64 {
    (1..=n).map(|k| k as f64).product()
}

pub fn transmon_levels(e_j0: f64, e_c: f64, n_max: usize) -> Result<TransmonSpectrum> {
    if !(e_j0 > 0.0) || !(e_c > 0.0) {
        bail!(Argument, "transmon energies must be positive (E_J0 = {e_j0}, E_C = {e_c})");
    }
    let n_max = n_max.max(1);
    let root = libm::sqrt(8.0 * e_j0 * e_c);
    let tunnelling = libm::exp(-libm::sqrt(8.0 * e_j0 / e_c));
    let mut mean_levels = Vec::with_capacity(n_max + 1);
    let mut charge_dispersion = Vec::with_capacity(n_max + 1);
    for n in 0..=n_max {
        let nf = n as f64;
        mean_levels.push(-e_j0 + (nf + 0.5) * root - e_c * (6.0 * nf * nf + 6.0 * nf + 3.0) / 12.0);
        let power = libm::pow(e_j0 / (2.0 * e_c), 0.5 * nf + 0.75);
        charge_dispersion.push(
            e_c * libm::pow(2.0, 4.0 * nf + 4.0) / factorial(n) * libm::sqrt(2.0 / PI) * power * tunnelling,
        );
    }
    Ok(TransmonSpectrum {
        plasma_frequency: mean_levels[1] - mean_levels[0],
        mean_levels,
        charge_dispersion,
        valid: e_j0 / e_c >= 10.0,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dispersion_ratio() {
        for r in [10.0, 30.0, 80.0] {
            let s = transmon_levels(r, 1.0, 3).unwrap();
            let ratio = s.charge_dispersion[1] / s.charge_dispersion[0];
            assert!((ratio - 16.0 * libm::sqrt(r / 2.0)).abs() < 1e-9 * ratio);
        }
    }

    #[test]
    fn dispersion_positive() {
        let s = transmon_levels(40.0, 1.0, 3).unwrap();
        assert!(s.charge_dispersion.iter().all(|&d| d > 0.0));
    }

    #[test]
    fn plasma_frequency_has_anharmonic_correction() {
        let s = transmon_levels(50.0, 1.0, 2).unwrap();
        assert!((s.plasma_frequency - (libm::sqrt(400.0) - 1.0)).abs() < 1e-12);
    }
}
