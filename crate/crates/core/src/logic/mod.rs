//! Registers of topological qubits and the measurement-based circuits built on them: braiding
//! Clifford gates, joint parity measurements, CNOT, teleportation, magic-state injection and
//! cluster-state preparation.

mod circuits;
mod identities;
mod register;

pub use circuits::{cluster_stabilizers, cnot, magic_state, prepare_cluster_state, t_gate_injection, teleport};
pub use identities::{
    braid_generators, bk_valid_states, bravyi_kitaev_all_branches, bravyi_kitaev_check, distillation_error,
    distillation_sequence, group_closure, BkBranch,
};
pub use register::{
    random_logical_state, Axis, ExecutionMode, ForcedOutcomes, LogicalRegister, MeasurementEntry, MeasurementRecord,
    OutcomeSource, ParitySpec, IMPOSSIBLE_BRANCH, MAX_QUBITS,
};
