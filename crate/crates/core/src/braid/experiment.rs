use alloc::format;
use alloc::vec;

use rand::Rng;

use super::compile::{compile_schedule, IslandLayout, MoveOp, RegisterLayout};
use super::schedule::{FluxSchedule, Ramp};
use crate::algebra::UnitaryMatrix;
use crate::device::MajoranaLabel;
use crate::error::{bail, Result};
use crate::linalg::{from_rows, CMat, C64};
use crate::readout::{simulate_readout, PhotonCountModel};
use crate::stats::BinomialEstimate;

/// (1/√2)[[1, -i], [-i, 1]], the qubit gate of one γ_B ↔ γ_C exchange.
pub fn ideal_braid_unitary() -> CMat {
    let a = C64::new(core::f64::consts::FRAC_1_SQRT_2, 0.0);
    let b = C64::new(0.0, -core::f64::consts::FRAC_1_SQRT_2);
    from_rows(&[&[a, b], &[b, a]])
}

/// The six braiding steps exchanging γ_B and γ_C on the π-circuit, starting and ending with
/// γ_E, γ_F strongly coupled, labeled braid-3 … braid-8.
pub fn braid_cycle(x_max: f64, step_duration: f64) -> Result<FluxSchedule> {
    let layout = RegisterLayout::new(IslandLayout::pi_circuit(x_max), 1);
    let op = MoveOp::Exchange {
        qubit: 0,
        first: MajoranaLabel::B,
        second: MajoranaLabel::C,
    };
    let program = compile_schedule(&[op], &layout, step_duration)?;
    Ok(program.schedule.relabel((3..=8).map(|k| format!("braid-{k}"))))
}

/// Ten-step program: ancilla initialization (init-0 … init-2), one braid (braid-3 … braid-8) and
/// the parity readout (measure-9), on fluxes (x_0, x_1, x_2, x_3).
///
/// init-0 leaves the readout point and switches Δ_2 and Δ_3 on; init-1 switches Δ_3 off while
/// Δ_2 stays on; init-2 dwells. measure-9 zeros x_1 … x_3 and raises x_0 to x_max.
pub fn standard_braid_schedule(x_max: f64, step_duration: f64) -> Result<FluxSchedule> {
    if !(x_max > 0.0 && x_max < core::f64::consts::FRAC_PI_2) {
        bail!(Argument, "x_max = {x_max} must lie in (0, π/2)");
    }
    let m = x_max;
    let readout = vec![x_max, 0.0, 0.0, 0.0];
    let rest = vec![0.0, 0.0, m, 0.0];
    let init = FluxSchedule::from_waypoints(
        &readout,
        &[
            ("init-0", vec![0.0, 0.0, m, -m], step_duration),
            ("init-1", rest.clone(), step_duration),
            ("init-2", rest.clone(), step_duration),
        ],
        Ramp::default(),
    )?;
    let braid = braid_cycle(x_max, step_duration)?;
    if braid.initial() != Some(rest.as_slice()) || braid.last() != Some(rest.as_slice()) {
        bail!(Consistency, "braid block does not start and end at the rest configuration");
    }
    let measure = FluxSchedule::from_waypoints(&rest, &[("measure-9", readout, step_duration)], Ramp::default())?;
    init.concat(&braid)?.concat(&measure)
}

/// Outcome of the repeated-braiding experiment at one cycle count.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PflipResult {
    pub cycles: u32,
    pub estimate: BinomialEstimate,
    /// |⟨1|U^n|0⟩|².
    pub expected: f64,
}

/// Initialize, read out, apply `n_cycles` braids, read out again; counts readout changes.
///
/// The qubit starts in |10⟩|0⟩ (iγ_Aγ_B = -1). The second readout sees the parity drawn from
/// the Born rule on U^n|10⟩|0⟩. The estimate carries a 3σ Wilson interval.
pub fn pflip_experiment<R: Rng + ?Sized>(
    braid: &UnitaryMatrix,
    n_cycles: u32,
    shots: u64,
    readout: &PhotonCountModel,
    rng: &mut R,
) -> Result<PflipResult> {
    if shots == 0 {
        bail!(Argument, "need at least one shot");
    }
    if braid.dim() != 2 {
        bail!(Argument, "braid unitary must be 2x2");
    }
    let un = braid.pow(n_cycles);
    let amp_flip = un.matrix()[(1, 0)];
    let p_plus = amp_flip.norm_sqr().min(1.0);
    let mut flips = 0;
    for _ in 0..shots {
        let (r0, _) = simulate_readout(-1, readout, rng)?;
        let parity = if rng.random::<f64>() < p_plus { 1 } else { -1 };
        let (r1, _) = simulate_readout(parity, readout, rng)?;
        if r0 != r1 {
            flips += 1;
        }
    }
    Ok(PflipResult {
        cycles: n_cycles,
        estimate: BinomialEstimate::new(flips, shots, 3.0),
        expected: p_plus,
    })
}
