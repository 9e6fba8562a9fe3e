//! Dispersive readout of the fermion parity through a transmon coupled to a cavity.

use rand::Rng;
use rand_distr::{Distribution, Poisson};

use crate::error::{bail, Result};

/// Ratio (n+1)g²/δω² below which the dispersive expansion is trusted.
pub const DISPERSIVE_LIMIT: f64 = 0.05;

/// Transmon-cavity parameters in GHz (ħ = 1).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReadoutParams {
    /// Bare cavity frequency ω_0.
    pub cavity_freq: f64,
    /// Transmon frequency Ω_0.
    pub qubit_freq: f64,
    /// Jaynes-Cummings coupling g.
    pub coupling: f64,
    /// Parity couplings Δ_+ and Δ_-.
    pub delta_plus: f64,
    pub delta_minus: f64,
    /// Offset charge q_0 in units of e.
    pub offset_charge: f64,
    /// Cavity decay rate κ.
    pub kappa: f64,
}

impl ReadoutParams {
    /// δω = Ω_0 - ω_0.
    pub fn detuning(&self) -> f64 {
        self.qubit_freq - self.cavity_freq
    }

    /// (n+1)g²/δω².
    pub fn dispersive_ratio(&self, n: u32) -> f64 {
        let dw = self.detuning();
        (n as f64 + 1.0) * self.coupling * self.coupling / (dw * dw)
    }

    pub fn is_dispersive(&self, n: u32) -> bool {
        self.dispersive_ratio(n) < DISPERSIVE_LIMIT
    }

    fn check(&self) -> Result<()> {
        if self.offset_charge != 0.0 {
            bail!(Argument, "readout formulas assume q_0 = 0, got {}", self.offset_charge);
        }
        Ok(())
    }
}

/// Dressed levels ε_{n,±,P} of the pair (|n,↑,P⟩, |n+1,↓,P⟩).
pub fn jc_eigenvalues(p: &ReadoutParams, n: u32, parity: i8) -> Result<(f64, f64)> {
    p.check()?;
    let pf = parity_f(parity)?;
    let nf = n as f64;
    let d = p.detuning() + 2.0 * pf * p.delta_plus;
    let root = 0.5 * libm::sqrt(d * d + 4.0 * p.coupling * p.coupling * (nf + 1.0));
    let base = (nf + 0.5) * p.cavity_freq + pf * p.delta_minus;
    Ok((base + root, base - root))
}

/// Energy ε_{0,P} of the uncoupled vacuum |0,↓,P⟩.
pub fn vacuum_energy(p: &ReadoutParams, parity: i8) -> Result<f64> {
    p.check()?;
    let pf = parity_f(parity)?;
    Ok(pf * (p.delta_minus - p.delta_plus) - 0.5 * p.qubit_freq)
}

/// First-order dispersive levels (ε_{n,↑,P}, ε_{n+1,↓,P}).
pub fn dispersive_levels(p: &ReadoutParams, n: u32, parity: i8) -> Result<(f64, f64)> {
    p.check()?;
    let pf = parity_f(parity)?;
    let nf = n as f64;
    let d = p.detuning() + 2.0 * pf * p.delta_plus;
    let g2 = p.coupling * p.coupling * (nf + 1.0) / d;
    let up = nf * p.cavity_freq + pf * (p.delta_minus + p.delta_plus) + 0.5 * p.qubit_freq + g2;
    let down = (nf + 1.0) * p.cavity_freq + pf * (p.delta_minus - p.delta_plus) - 0.5 * p.qubit_freq - g2;
    Ok((up, down))
}

/// Cavity frequency with the transmon in its ground state, from the exact levels:
/// ε_{0,-,P} - ε_{0,P}.
pub fn exact_cavity_frequency(p: &ReadoutParams, parity: i8) -> Result<f64> {
    Ok(jc_eigenvalues(p, 0, parity)?.1 - vacuum_energy(p, parity)?)
}

/// Parity-dependent cavity frequency ω_eff(P) = ω_0 + σ_z g²/(δω + 2PΔ_+), σ_z = -1.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DispersiveFrequency {
    pub frequency: f64,
    /// False when (n+1)g²/δω² ≥ [`DISPERSIVE_LIMIT`] at n = 0.
    pub dispersive: bool,
}

pub fn dispersive_frequency(p: &ReadoutParams, parity: i8) -> Result<DispersiveFrequency> {
    p.check()?;
    let pf = parity_f(parity)?;
    let d = p.detuning() + 2.0 * pf * p.delta_plus;
    Ok(DispersiveFrequency {
        frequency: p.cavity_freq - p.coupling * p.coupling / d,
        dispersive: p.is_dispersive(0),
    })
}

/// ω_shift = 4g²Δ_+/(δω² - 4Δ_+²).
pub fn frequency_shift(p: &ReadoutParams) -> Result<f64> {
    let dw = p.detuning();
    let denom = dw * dw - 4.0 * p.delta_plus * p.delta_plus;
    if denom.abs() < 1e-6 * dw * dw || dw == 0.0 {
        bail!(Singular, "δω = {dw} is at the pole 2Δ_+ = {}", 2.0 * p.delta_plus);
    }
    Ok(4.0 * p.coupling * p.coupling * p.delta_plus / denom)
}

/// Expected photon counts for the two parities over one measurement window.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhotonCountModel {
    pub lambda_plus: f64,
    pub lambda_minus: f64,
    pub t_m: f64,
    pub t_plus: f64,
    pub t_minus: f64,
}

impl PhotonCountModel {
    /// Model with given rates; transmissions are left at 1 and t_M at 0.
    pub fn from_rates(lambda_plus: f64, lambda_minus: f64) -> Result<Self> {
        let m = Self {
            lambda_plus,
            lambda_minus,
            t_m: 0.0,
            t_plus: 1.0,
            t_minus: 1.0,
        };
        m.validate()?;
        Ok(m)
    }

    /// λ_± = T_± κ t_M.
    pub fn from_transmissions(t_plus: f64, t_minus: f64, kappa: f64, t_m: f64) -> Result<Self> {
        let m = Self {
            lambda_plus: t_plus * kappa * t_m,
            lambda_minus: t_minus * kappa * t_m,
            t_m,
            t_plus,
            t_minus,
        };
        m.validate()?;
        Ok(m)
    }

    /// Transmissions from Lorentzian lines of width κ centred at ω_eff(±1), probed at ω_eff(+1).
    pub fn lorentzian(p: &ReadoutParams, t_m: f64) -> Result<Self> {
        let plus = dispersive_frequency(p, 1)?.frequency;
        let minus = dispersive_frequency(p, -1)?.frequency;
        let line = |centre: f64| {
            let hw = 0.5 * p.kappa;
            hw * hw / ((plus - centre) * (plus - centre) + hw * hw)
        };
        Self::from_transmissions(line(plus), line(minus), p.kappa, t_m)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.lambda_plus >= 0.0 && self.lambda_minus >= 0.0) {
            bail!(Argument, "photon rates must be non-negative");
        }
        if self.lambda_plus < self.lambda_minus {
            bail!(Argument, "labeling requires λ_+ ≥ λ_- (got {} < {})", self.lambda_plus, self.lambda_minus);
        }
        Ok(())
    }

    /// Decision threshold √(λ_+ λ_-).
    pub fn threshold(&self) -> f64 {
        libm::sqrt(self.lambda_plus * self.lambda_minus)
    }

    /// x̄ = (√λ_+ - √λ_-)/√2.
    pub fn separation(&self) -> f64 {
        (libm::sqrt(self.lambda_plus) - libm::sqrt(self.lambda_minus)) / core::f64::consts::SQRT_2
    }

    pub fn rate(&self, parity: i8) -> f64 {
        if parity > 0 {
            self.lambda_plus
        } else {
            self.lambda_minus
        }
    }
}

/// Outcome-error probabilities of the photon-counting discriminator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeasurementError {
    /// Equal-prior overlap of the two Gaussian count distributions at the threshold, ½ erfc(x̄).
    pub exact: f64,
    /// e^{-x̄²}/(2x̄√π); `None` when the distributions coincide.
    pub asymptotic: Option<f64>,
    /// λ_+ = λ_-: no information in the counts.
    pub degenerate: bool,
    /// Both rates at least 10, where the Gaussian approximation is reasonable.
    pub gaussian_valid: bool,
}

pub fn measurement_error(m: &PhotonCountModel) -> Result<MeasurementError> {
    m.validate()?;
    let xb = m.separation();
    let degenerate = m.lambda_plus == m.lambda_minus;
    Ok(MeasurementError {
        exact: if degenerate { 0.5 } else { 0.5 * libm::erfc(xb) },
        asymptotic: (xb > 0.0).then(|| libm::exp(-xb * xb) / (2.0 * xb * libm::sqrt(core::f64::consts::PI))),
        degenerate,
        gaussian_valid: m.lambda_minus >= 10.0,
    })
}

/// Equal-prior misassignment probability of the threshold rule under the exact Poisson laws.
pub fn poisson_misassignment(m: &PhotonCountModel) -> f64 {
    let x = m.threshold();
    let cut = libm::floor(x) as u64;
    let p_plus_low = poisson_cdf(m.lambda_plus, cut);
    let p_minus_low = poisson_cdf(m.lambda_minus, cut);
    0.5 * p_plus_low + 0.5 * (1.0 - p_minus_low)
}

/// P(N ≤ k) for N ~ Poisson(λ), summed in log space.
pub fn poisson_cdf(lambda: f64, k: u64) -> f64 {
    if lambda == 0.0 {
        return 1.0;
    }
    let mut log_term = -lambda;
    let mut sum = libm::exp(log_term);
    for j in 1..=k {
        log_term += libm::log(lambda) - libm::log(j as f64);
        sum += libm::exp(log_term);
    }
    sum.min(1.0)
}

/// Draws a photon count for the given parity and applies the threshold rule (+1 iff n > x).
pub fn simulate_readout<R: Rng + ?Sized>(parity: i8, m: &PhotonCountModel, rng: &mut R) -> Result<(i8, u64)> {
    parity_f(parity)?;
    let lambda = m.rate(parity);
    let n = if lambda > 0.0 {
        Poisson::new(lambda)
            .map_err(|_| crate::Error::Argument(alloc::format!("invalid Poisson rate {lambda}")))?
            .sample(rng) as u64
    } else {
        0
    };
    let outcome = if n as f64 > m.threshold() { 1 } else { -1 };
    Ok((outcome, n))
}

/// ε_om(t_M) + Δ_min t_M for counts growing linearly in t_M.
pub fn storage_tradeoff(rate_plus: f64, rate_minus: f64, delta_min: f64, t_m: f64) -> Result<f64> {
    let m = PhotonCountModel::from_rates(rate_plus * t_m, rate_minus * t_m)?;
    Ok(measurement_error(&m)?.exact + delta_min * t_m)
}

fn parity_f(parity: i8) -> Result<f64> {
    match parity {
        1 => Ok(1.0),
        -1 => Ok(-1.0),
        _ => bail!(Argument, "parity must be ±1, got {parity}"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params() -> ReadoutParams {
        ReadoutParams {
            cavity_freq: 7.0,
            qubit_freq: 8.0,
            coupling: 0.1,
            delta_plus: 0.02,
            delta_minus: 0.005,
            offset_charge: 0.0,
            kappa: 0.001,
        }
    }

    #[test]
    fn zero_coupling_levels() {
        let p = ReadoutParams { coupling: 0.0, ..params() };
        for parity in [1, -1] {
            let (hi, lo) = jc_eigenvalues(&p, 2, parity).unwrap();
            let d = (p.detuning() + 2.0 * parity as f64 * p.delta_plus).abs();
            assert!((hi - lo - d).abs() < 1e-14);
        }
    }

    #[test]
    fn shift_is_frequency_difference() {
        let p = params();
        let w = |s| dispersive_frequency(&p, s).unwrap().frequency;
        assert!((w(1) - w(-1) - frequency_shift(&p).unwrap()).abs() < 1e-15);
    }

    #[test]
    fn no_parity_coupling_no_shift() {
        let p = ReadoutParams { delta_plus: 0.0, ..params() };
        assert_eq!(frequency_shift(&p).unwrap(), 0.0);
    }

    #[test]
    fn pole_rejected() {
        let p = ReadoutParams { delta_plus: 0.5, ..params() };
        assert!(frequency_shift(&p).is_err());
    }

    #[test]
    fn equal_rates_give_half() {
        let m = PhotonCountModel::from_rates(50.0, 50.0).unwrap();
        let e = measurement_error(&m).unwrap();
        assert!(e.degenerate && e.exact == 0.5 && e.asymptotic.is_none());
    }

    #[test]
    fn poisson_cdf_small_case() {
        let l: f64 = 2.0;
        let expected = libm::exp(-l) * (1.0 + l + l * l / 2.0);
        assert!((poisson_cdf(l, 2) - expected).abs() < 1e-15);
    }
}
