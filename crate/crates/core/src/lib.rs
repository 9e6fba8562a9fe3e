//! Numerical laboratory for flux-controlled Majorana quantum computation.
//!
//! The crate follows a topological qubit from the circuit level to the code level:
//!
//! * [`algebra`]: Jordan-Wigner Majorana representations, parity sectors, states and unitaries.
//! * [`device`]: Coulomb couplings, effective and microscopic Hamiltonians of the π-shaped
//!   circuit and of the triangular RAMM qubit, transmon levels and parameter-regime checks.
//! * [`braid`]: flux schedules, adiabatic evolution, Wilson-line holonomies, the braiding
//!   experiment and a compiler from logical moves to flux schedules.
//! * [`readout`]: Jaynes-Cummings levels, parity-dependent cavity shifts and photon-counting errors.
//! * [`logic`]: registers of topological qubits and the measurement-based gate circuits.
//! * [`qec`]: Steane-code failure models, error thresholds and a Monte Carlo oracle.
//!
//! Energies are in GHz with ħ = 1 and fluxes are the dimensionless phases x = eΦ/ħ.
//!
//! The crate is `no_std` and only needs an allocator.

#![no_std]
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod algebra;
pub mod braid;
pub mod device;
pub mod error;
pub mod linalg;
pub mod logic;
pub mod qec;
pub mod readout;
pub mod stats;

pub use error::{Error, Result};
pub use linalg::{CMat, CVec, C64};
