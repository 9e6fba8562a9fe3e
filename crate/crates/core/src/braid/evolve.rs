use alloc::vec::Vec;

use crate::algebra::StateVector;
use crate::error::{bail, Result};
use crate::linalg::{self, CMat, C64};

/// A time-dependent Hermitian Hamiltonian H(t) on [0, duration].
pub trait HamiltonianPath {
    fn duration(&self) -> f64;

    fn at(&self, t: f64) -> CMat;

    /// Times at which H(t) may fail to be smooth; always includes 0 and `duration()`.
    fn breakpoints(&self) -> Vec<f64> {
        alloc::vec![0.0, self.duration()]
    }

    fn dim(&self) -> usize {
        self.at(0.0).nrows()
    }
}

/// A time-independent Hamiltonian applied for a fixed time.
#[derive(Debug, Clone)]
pub struct ConstantPath {
    pub hamiltonian: CMat,
    pub time: f64,
}

impl HamiltonianPath for ConstantPath {
    fn duration(&self) -> f64 {
        self.time
    }

    fn at(&self, _t: f64) -> CMat {
        self.hamiltonian.clone()
    }
}

/// H(t) given by a closure.
pub struct FnPath<F> {
    pub f: F,
    pub time: f64,
}

impl<F: Fn(f64) -> CMat> HamiltonianPath for FnPath<F> {
    fn duration(&self) -> f64 {
        self.time
    }

    fn at(&self, t: f64) -> CMat {
        (self.f)(t)
    }
}

/// Largest change, in spectral norm, tolerated between a propagator and its half-step refinement.
pub const SELF_CHECK_TOL: f64 = 1e-8;
const MAX_SLICES: usize = 1 << 24;

/// Sorted, deduplicated segment boundaries clipped to [0, T].
pub(crate) fn segments(path: &dyn HamiltonianPath) -> Vec<(f64, f64)> {
    let total = path.duration();
    let mut b: Vec<f64> = path
        .breakpoints()
        .into_iter()
        .filter(|t| t.is_finite() && *t >= 0.0 && *t <= total)
        .collect();
    b.push(0.0);
    b.push(total);
    b.sort_by(f64::total_cmp);
    b.dedup_by(|a, c| (*a - *c).abs() <= 1e-14 * total.max(1.0));
    b.windows(2).map(|w| (w[0], w[1])).filter(|(a, c)| c > a).collect()
}

/// Distributes `n` slices over the segments in proportion to their length, at least one each.
pub(crate) fn slices_per_segment(segs: &[(f64, f64)], n: usize) -> Vec<usize> {
    let total: f64 = segs.iter().map(|(a, b)| b - a).sum();
    segs.iter()
        .map(|(a, b)| {
            if total > 0.0 {
                libm::ceil(((b - a) / total) * n as f64).max(1.0) as usize
            } else {
                1
            }
        })
        .collect()
}

/// One fourth-order Magnus step over [t, t + h] with two-point Gauss sampling.
fn magnus_step(path: &dyn HamiltonianPath, t: f64, h: f64) -> CMat {
    let c = 0.5 * libm::sqrt(3.0) / 3.0;
    let h1 = path.at(t + h * (0.5 - c));
    let h2 = path.at(t + h * (0.5 + c));
    // With A = -iH: Ω = (h/2)(A1 + A2) + (√3 h²/12)[A2, A1] and exp(Ω) = exp(-i H_eff) with
    // H_eff = iΩ = (h/2)(H1 + H2) - i(√3 h²/12)[H2, H1].
    let comm = linalg::commutator(&h2, &h1);
    let heff = (&h1 + &h2) * linalg::re(0.5 * h) - comm * C64::new(0.0, libm::sqrt(3.0) * h * h / 12.0);
    linalg::expm_herm(&heff, 1.0)
}

/// Time-ordered propagator with a fixed number of slices.
pub fn propagator_fixed(path: &dyn HamiltonianPath, n_slices: usize) -> CMat {
    let segs = segments(path);
    let counts = slices_per_segment(&segs, n_slices.max(1));
    let mut u = linalg::identity(path.dim());
    for ((a, b), n) in segs.iter().zip(counts) {
        let h = (b - a) / n as f64;
        for k in 0..n {
            u = magnus_step(path, a + k as f64 * h, h) * u;
        }
    }
    u
}

/// Time-ordered propagator. With `self_check`, the slice count is doubled until the propagator
/// changes by less than [`SELF_CHECK_TOL`] in spectral norm.
pub fn propagator(path: &dyn HamiltonianPath, n_slices: usize, self_check: bool) -> Result<CMat> {
    let mut n = n_slices.max(1);
    let mut u = propagator_fixed(path, n);
    if !self_check {
        return Ok(u);
    }
    loop {
        if 2 * n > MAX_SLICES {
            bail!(Convergence, "propagator still changing at {n} slices over T = {}", path.duration());
        }
        let finer = propagator_fixed(path, 2 * n);
        let change = linalg::op_norm(&(&finer - &u));
        u = finer;
        n *= 2;
        if change < SELF_CHECK_TOL {
            return Ok(u);
        }
    }
}

/// Evolves `initial` along the path.
pub fn adiabatic_evolve(
    path: &dyn HamiltonianPath,
    n_slices: usize,
    initial: &StateVector,
    self_check: bool,
) -> Result<StateVector> {
    if initial.dim() != path.dim() {
        bail!(Argument, "state dimension {} does not match Hamiltonian dimension {}", initial.dim(), path.dim());
    }
    let u = propagator(path, n_slices, self_check)?;
    let out = u * initial.amplitudes();
    let norm = linalg::vec_norm(&out);
    if (norm - 1.0).abs() > 1e-10 {
        bail!(Consistency, "evolution lost unitarity (norm {norm})");
    }
    StateVector::normalized(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{max_abs, pauli_x, pauli_z, re, CVec};

    #[test]
    fn constant_hamiltonian_matches_exponential() {
        let h = pauli_x() * re(0.7) + pauli_z() * re(0.2);
        let path = ConstantPath { hamiltonian: h.clone(), time: 3.0 };
        let u = propagator(&path, 8, true).unwrap();
        assert!(max_abs(&(u - linalg::expm_herm(&h, 3.0))) < 1e-10);
    }

    #[test]
    fn sudden_limit_is_identity() {
        let path = FnPath { f: |t: f64| pauli_z() * re(t) + pauli_x(), time: 1e-9 };
        let u = propagator(&path, 4, false).unwrap();
        assert!(max_abs(&(u - linalg::identity(2))) < 1e-8);
    }

    #[test]
    fn norm_preserved() {
        let path = FnPath { f: |t: f64| pauli_z() * re(t - 1.0) + pauli_x() * re(0.3), time: 2.0 };
        let psi = StateVector::new(CVec::from_vec(alloc::vec![re(1.0), re(0.0)])).unwrap();
        let out = adiabatic_evolve(&path, 64, &psi, true).unwrap();
        assert!((linalg::vec_norm(out.amplitudes()) - 1.0).abs() < 1e-12);
    }
}
