use alloc::vec::Vec;

use super::register::{Axis, LogicalRegister, MeasurementRecord, OutcomeSource, ParitySpec};
use crate::error::{bail, Result};
use crate::linalg::C64;

fn distinct(qubits: &[usize]) -> Result<()> {
    for (i, a) in qubits.iter().enumerate() {
        if qubits[..i].contains(a) {
            bail!(Argument, "qubit {a} used twice");
        }
    }
    Ok(())
}

fn record_since(reg: &LogicalRegister, start: usize) -> MeasurementRecord {
    MeasurementRecord {
        entries: reg.record().entries[start..].to_vec(),
    }
}

/// CNOT from `control` to `target` using `ancilla`, by measurements and braids only.
///
/// p_1 = σ_{a,z} and R_1 = exp[iπ/4 σ_x (1 - p_1)] on the ancilla reset it to |0⟩; then
/// p_2 = σ_{c,z}σ_{t,x}σ_{a,x}, p_3 = σ_{a,y}, followed by R_4 = exp[-iπ/4 p_3 σ_x] on the
/// ancilla, R_3 = exp[iπ/4 p_2p_3 σ_x] on the target and R_2 = exp[iπ/4 p_2p_3 σ_z] on the
/// control. The ancilla ends in |0⟩.
pub fn cnot(
    reg: &mut LogicalRegister,
    control: usize,
    target: usize,
    ancilla: usize,
    source: &mut dyn OutcomeSource,
) -> Result<MeasurementRecord> {
    distinct(&[control, target, ancilla])?;
    let start = reg.record().len();
    let p1 = reg.measure_pauli(&[(ancilla, Axis::Z)], source)?;
    reg.quarter_turns(ancilla, Axis::X, (1 - p1) as i32)?;
    let p2 = reg.measure_pauli(&[(control, Axis::Z), (target, Axis::X), (ancilla, Axis::X)], source)?;
    let p3 = reg.measure_pauli(&[(ancilla, Axis::Y)], source)?;
    reg.quarter_turns(ancilla, Axis::X, -(p3 as i32))?;
    reg.quarter_turns(target, Axis::X, (p2 * p3) as i32)?;
    reg.quarter_turns(control, Axis::Z, (p2 * p3) as i32)?;
    Ok(record_since(reg, start))
}

/// Teleports the state of `source_qubit` to `bell_b`, with `bell_a` and `bell_b` starting in |00⟩.
///
/// p_1 = σ_{a,x}σ_{b,x} makes the Bell pair; p_2 = σ_{s,x}σ_{a,x} and p_3 = σ_{s,z}σ_{a,z} form
/// the Bell measurement, after which R = exp[iπ/4 σ_z (1 - p_1p_2)] exp[iπ/4 σ_x (1 - p_3)] on
/// `bell_b` restores the state. `source_qubit` and `bell_a` are left in a Bell state.
pub fn teleport(
    reg: &mut LogicalRegister,
    source_qubit: usize,
    bell_a: usize,
    bell_b: usize,
    source: &mut dyn OutcomeSource,
) -> Result<MeasurementRecord> {
    distinct(&[source_qubit, bell_a, bell_b])?;
    for q in [bell_a, bell_b] {
        if reg.expectation(&ParitySpec::pauli(&[(q, Axis::Z)])?)? < 1.0 - 1e-9 {
            bail!(Argument, "teleportation needs qubit {q} in |0⟩");
        }
    }
    let start = reg.record().len();
    let p1 = reg.measure_pauli(&[(bell_a, Axis::X), (bell_b, Axis::X)], source)?;
    let p2 = reg.measure_pauli(&[(source_qubit, Axis::X), (bell_a, Axis::X)], source)?;
    let p3 = reg.measure_pauli(&[(source_qubit, Axis::Z), (bell_a, Axis::Z)], source)?;
    reg.quarter_turns(bell_b, Axis::X, (1 - p3) as i32)?;
    reg.quarter_turns(bell_b, Axis::Z, (1 - p1 * p2) as i32)?;
    Ok(record_since(reg, start))
}

/// |A⟩ = (|0⟩ + e^{iπ/4}|1⟩)/√2.
pub fn magic_state() -> [C64; 2] {
    let s = core::f64::consts::FRAC_1_SQRT_2;
    [C64::new(s, 0.0), C64::from_polar(s, core::f64::consts::FRAC_PI_4)]
}

/// Applies T = diag(1, e^{iπ/4}) to `data`, consuming `ancilla` prepared in |A⟩.
///
/// p_1 = σ_{d,z}σ_{a,z}; R_ψ = exp[-iπ/8 σ_z (1 - p_1)] on the data and R_A = exp[iπ/4 σ_x (1 - p_1)]
/// on the ancilla; then p_2 = σ_{a,x} and σ_z on the data when p_2 = -1.
pub fn t_gate_injection(
    reg: &mut LogicalRegister,
    data: usize,
    ancilla: usize,
    source: &mut dyn OutcomeSource,
) -> Result<MeasurementRecord> {
    distinct(&[data, ancilla])?;
    let rho = reg.reduced_density(&[ancilla])?;
    let [a0, a1] = magic_state();
    let fidelity = (a0.conj() * rho[(0, 0)] * a0 + a0.conj() * rho[(0, 1)] * a1 + a1.conj() * rho[(1, 0)] * a0 + a1.conj() * rho[(1, 1)] * a1).re;
    if fidelity < 1.0 - 1e-9 {
        bail!(Argument, "ancilla {ancilla} is not in |A⟩ (fidelity {fidelity})");
    }
    let start = reg.record().len();
    let p1 = reg.measure_pauli(&[(data, Axis::Z), (ancilla, Axis::Z)], source)?;
    if p1 == -1 {
        reg.quarter_turns(data, Axis::Z, -1)?;
    }
    reg.quarter_turns(ancilla, Axis::X, (1 - p1) as i32)?;
    let p2 = reg.measure_pauli(&[(ancilla, Axis::X)], source)?;
    reg.quarter_turns(data, Axis::Z, (1 - p2) as i32)?;
    Ok(record_since(reg, start))
}

/// K_α = σ_{x,α} Π_β σ_{z,β} over the nearest neighbours β of site α on a rows × cols grid,
/// sites numbered row-major.
pub fn cluster_stabilizers(rows: usize, cols: usize) -> Result<Vec<ParitySpec>> {
    if rows == 0 || cols == 0 {
        bail!(Argument, "empty cluster");
    }
    let mut out = Vec::with_capacity(rows * cols);
    for r in 0..rows {
        for c in 0..cols {
            let mut factors = alloc::vec![(r * cols + c, Axis::X)];
            let mut nb = |rr: usize, cc: usize| factors.push((rr * cols + cc, Axis::Z));
            if r > 0 {
                nb(r - 1, c);
            }
            if r + 1 < rows {
                nb(r + 1, c);
            }
            if c > 0 {
                nb(r, c - 1);
            }
            if c + 1 < cols {
                nb(r, c + 1);
            }
            out.push(ParitySpec::pauli(&factors)?);
        }
    }
    Ok(out)
}

/// Prepares the rows × cols cluster state by measuring every K_α once, then applying σ_z on α
/// (two braids) wherever K_α = -1, which flips K_α alone.
pub fn prepare_cluster_state(
    reg: &mut LogicalRegister,
    rows: usize,
    cols: usize,
    source: &mut dyn OutcomeSource,
) -> Result<MeasurementRecord> {
    if reg.n_qubits() != rows * cols {
        bail!(Argument, "{rows}×{cols} cluster needs {} qubits, register has {}", rows * cols, reg.n_qubits());
    }
    let start = reg.record().len();
    let stabilizers = cluster_stabilizers(rows, cols)?;
    let mut outcomes = Vec::with_capacity(stabilizers.len());
    for k in &stabilizers {
        outcomes.push(reg.measure_parity(k, source)?);
    }
    for (alpha, &o) in outcomes.iter().enumerate() {
        if o == -1 {
            reg.quarter_turns(alpha, Axis::Z, 2)?;
        }
    }
    Ok(record_since(reg, start))
}
