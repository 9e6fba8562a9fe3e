//! Flux schedules, adiabatic evolution, ground-space holonomies, the repeated-braiding
//! experiment and a compiler from logical moves to flux programs.

mod compile;
mod evolve;
mod experiment;
mod holonomy;
mod schedule;

pub use compile::{compile_schedule, CompiledProgram, Edge, IslandLayout, LayoutKind, MoveOp, RegisterLayout};
pub use evolve::{adiabatic_evolve, propagator, propagator_fixed, ConstantPath, FnPath, HamiltonianPath, SELF_CHECK_TOL};
pub use experiment::{braid_cycle, ideal_braid_unitary, pflip_experiment, standard_braid_schedule, PflipResult};
pub use holonomy::{evolved_holonomy, wilson_line, BraidDevice, HolonomyResult, SchedulePath, DEFAULT_WILSON_POINTS};
pub use schedule::{FluxSchedule, Ramp, ScheduleStep};
