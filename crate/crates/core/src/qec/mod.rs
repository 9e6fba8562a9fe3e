//! Steane-code failure model for parity-measurement (RAMM) and gate-based (reference) syndrome
//! extraction: failure probabilities per period, optimal waiting, memory and computation
//! thresholds, concatenation, and a Monte Carlo oracle built on the same error bookkeeping.

mod model;
mod montecarlo;

pub use model::*;
pub use montecarlo::{monte_carlo_failure, Period, MIN_TRIALS};
