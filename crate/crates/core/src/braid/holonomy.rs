use alloc::vec::Vec;

use super::evolve::{propagator, segments, slices_per_segment, HamiltonianPath};
use super::schedule::FluxSchedule;
use crate::algebra::{MajoranaSet, ParitySector, UnitaryMatrix};
use crate::device::{coulomb_coupling_asymptotic, effective_braiding_hamiltonian, pi_couplings, CouplingSet, FluxConfig, IslandParams};
use crate::error::{bail, Result};
use crate::linalg::{self, CMat};

/// Holonomy of the degenerate ground space along a closed path, in a fixed reference basis.
#[derive(Debug, Clone)]
pub struct HolonomyResult {
    pub qubit_unitary: UnitaryMatrix,
    /// ‖W†W - 1‖ of the Wilson-line (or evolved) block before taking its unitary part.
    pub leakage: f64,
    /// Distance, modulo a global phase, between the Wilson-line and the time-evolved holonomy,
    /// when the latter was computed.
    pub diabatic_error: Option<f64>,
    /// Smallest gap above the ground space seen along the path.
    pub min_gap: f64,
}

/// Projector samples per Wilson line that keep the leakage of the braid cycle below 1e-6
/// for on/off ratios down to 1e-6.
pub const DEFAULT_WILSON_POINTS: usize = 32768;

fn projector_product(path: &dyn HamiltonianPath, n_points: usize, basis: &CMat) -> Result<(CMat, f64)> {
    let k = basis.ncols();
    let segs = segments(path);
    let counts = slices_per_segment(&segs, n_points.max(1));
    let mut m = basis.clone();
    let mut min_gap = f64::INFINITY;
    for ((a, b), n) in segs.iter().zip(counts) {
        for j in 1..=n {
            let t = a + (b - a) * j as f64 / n as f64;
            let e = linalg::eigh(&path.at(t));
            let tol = crate::algebra::default_degeneracy_tol(&e.values).max(1e-12);
            let e0 = e.values[0];
            let count = e.values.iter().take_while(|&&v| v - e0 <= tol).count();
            if count != k {
                bail!(Topology, "ground degeneracy is {count} at t = {t}, expected {k}");
            }
            if let Some(&next) = e.values.get(k) {
                min_gap = min_gap.min(next - e.values[k - 1]);
            }
            let v = e.vectors.columns(0, k).into_owned();
            m = &v * (v.adjoint() * m);
        }
    }
    Ok((basis.adjoint() * m, min_gap))
}

/// Wilson line of the ground space along `path`, expressed in `basis` (orthonormal columns
/// spanning the ground space at t = 0; the path should be closed).
///
/// The projector product over `n_points` samples converges linearly in the sample spacing; a
/// Richardson step with `2 n_points` samples removes the leading error.
pub fn wilson_line(path: &dyn HamiltonianPath, n_points: usize, basis: &CMat) -> Result<HolonomyResult> {
    let n = n_points.max(2);
    let (w1, gap1) = projector_product(path, n, basis)?;
    let (w2, gap2) = projector_product(path, 2 * n, basis)?;
    let w = w2 * linalg::re(2.0) - w1;
    let leakage = linalg::op_norm(&(w.adjoint() * &w - linalg::identity(w.ncols())));
    Ok(HolonomyResult {
        qubit_unitary: UnitaryMatrix::polar(&w)?,
        leakage,
        diabatic_error: None,
        min_gap: gap1.min(gap2),
    })
}

/// Holonomy from direct time evolution: the propagator compressed to `basis`.
pub fn evolved_holonomy(path: &dyn HamiltonianPath, n_slices: usize, basis: &CMat) -> Result<HolonomyResult> {
    let u = propagator(path, n_slices, true)?;
    let block = basis.adjoint() * u * basis;
    let leakage = linalg::op_norm(&(block.adjoint() * &block - linalg::identity(block.ncols())));
    Ok(HolonomyResult {
        qubit_unitary: UnitaryMatrix::polar(&block)?,
        leakage,
        diabatic_error: None,
        min_gap: f64::NAN,
    })
}

/// The π-shaped braiding circuit: three identical Majorana islands with flux-tunable Coulomb
/// couplings, reduced to the odd-parity sector of γ_A … γ_F.
#[derive(Debug, Clone)]
pub struct BraidDevice {
    pub island: IslandParams,
    pub x_max: f64,
    majoranas: MajoranaSet,
    sector: ParitySector,
    qubit_basis: CMat,
    flipped: Option<usize>,
}

fn asymptotic_u(ej: f64, ec: f64) -> f64 {
    coulomb_coupling_asymptotic(&IslandParams {
        josephson_zero: ej,
        charging: ec,
        offset_charge: 0.0,
    })
    .unwrap_or(0.0)
}

fn log_on_off(ratio: f64, x_max: f64) -> f64 {
    libm::log(asymptotic_u(ratio * libm::cos(x_max), 1.0) / asymptotic_u(ratio, 1.0))
}

impl BraidDevice {
    pub fn new(island: IslandParams, x_max: f64) -> Result<Self> {
        island.validate()?;
        if !(x_max > 0.0 && x_max < core::f64::consts::FRAC_PI_2) {
            bail!(Argument, "x_max = {x_max} must lie in (0, π/2)");
        }
        let majoranas = MajoranaSet::new(6)?;
        let sector = ParitySector::new(&majoranas, -1)?;
        let vac = majoranas.vacuum();
        let q0 = sector.restrict_vector(&(majoranas.creation(0) * &vac));
        let q1 = sector.restrict_vector(&(majoranas.creation(1) * &vac));
        let qubit_basis = CMat::from_columns(&[q0, q1]);
        Ok(Self {
            island,
            x_max,
            majoranas,
            sector,
            qubit_basis,
            flipped: None,
        })
    }

    /// Device whose on/off ratio U(0)/U(x_max) equals `ratio`, with U(x_max) = `delta_max`.
    pub fn with_delta_ratio(ratio: f64, x_max: f64, delta_max: f64) -> Result<Self> {
        if !(ratio > 0.0 && ratio < 1.0) || !(delta_max > 0.0) {
            bail!(Argument, "need 0 < Δmin/Δmax < 1 and Δmax > 0");
        }
        let target = -libm::log(ratio);
        let (mut lo, mut hi) = (1.0_f64, 1e6_f64);
        if log_on_off(hi, x_max) < target {
            bail!(Argument, "on/off ratio {ratio} unreachable at x_max = {x_max}");
        }
        for _ in 0..200 {
            let mid = libm::sqrt(lo * hi);
            if log_on_off(mid, x_max) < target {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let r = libm::sqrt(lo * hi);
        let ec = delta_max / asymptotic_u(r * libm::cos(x_max), 1.0);
        Self::new(IslandParams::new(r * ec, ec, 0.0)?, x_max)
    }

    /// The same device with coupling `i` (0-based) sign-flipped, for fault injection.
    pub fn with_flipped_coupling(mut self, i: usize) -> Self {
        self.flipped = Some(i);
        self
    }

    pub fn majoranas(&self) -> &MajoranaSet {
        &self.majoranas
    }

    pub fn sector(&self) -> &ParitySector {
        &self.sector
    }

    /// Columns c_1†|vac⟩ and c_2†|vac⟩ in sector coordinates: the states |10⟩|0⟩ and |01⟩|0⟩.
    pub fn qubit_basis(&self) -> &CMat {
        &self.qubit_basis
    }

    /// Coulomb coupling of one island at flux x.
    pub fn u(&self, x: f64) -> f64 {
        asymptotic_u(self.island.josephson_zero * libm::cos(x), self.island.charging)
    }

    pub fn delta_max(&self) -> f64 {
        self.u(self.x_max)
    }

    pub fn delta_ratio(&self) -> f64 {
        self.u(0.0) / self.u(self.x_max)
    }

    pub fn couplings(&self, flux: &[f64]) -> Result<CouplingSet> {
        if flux.len() != 4 {
            bail!(Argument, "π-circuit needs 4 fluxes, got {}", flux.len());
        }
        let u = [self.u(flux[1]), self.u(flux[2]), self.u(flux[3])];
        let mut c = pi_couplings(&FluxConfig::new(flux.to_vec())?, &u)?;
        if let Some(i) = self.flipped {
            c = c.with_flipped_sign(i);
        }
        Ok(c)
    }

    /// Effective braiding Hamiltonian restricted to the odd sector.
    pub fn hamiltonian(&self, flux: &[f64]) -> Result<CMat> {
        let h = effective_braiding_hamiltonian(&self.couplings(flux)?, &self.majoranas)?;
        self.sector.restrict(&h)
    }

    pub fn path<'a>(&'a self, schedule: &'a FluxSchedule) -> SchedulePath<'a> {
        SchedulePath { device: self, schedule }
    }

    /// Wilson-line holonomy of a closed schedule in the qubit basis; with `evolve_slices`, also
    /// the time-evolved holonomy and their distance.
    pub fn holonomy(&self, schedule: &FluxSchedule, n_points: usize, evolve_slices: Option<usize>) -> Result<HolonomyResult> {
        let path = self.path(schedule);
        let mut w = wilson_line(&path, n_points, &self.qubit_basis)?;
        if let Some(n) = evolve_slices {
            let e = evolved_holonomy(&path, n, &self.qubit_basis)?;
            w.diabatic_error = Some(w.qubit_unitary.distance(e.qubit_unitary.matrix()));
        }
        Ok(w)
    }
}

/// The device Hamiltonian along a flux schedule.
pub struct SchedulePath<'a> {
    device: &'a BraidDevice,
    schedule: &'a FluxSchedule,
}

impl HamiltonianPath for SchedulePath<'_> {
    fn duration(&self) -> f64 {
        self.schedule.duration()
    }

    fn at(&self, t: f64) -> CMat {
        self.device
            .hamiltonian(&self.schedule.config_at(t))
            .expect("schedule fluxes were validated")
    }

    fn breakpoints(&self) -> Vec<f64> {
        self.schedule.breakpoints()
    }

    fn dim(&self) -> usize {
        self.device.sector.dim()
    }
}
