use alloc::vec::Vec;

use rand::Rng;
use rand_distr::{Binomial, Distribution};

use super::model::{computation_model, memory_model, FailureComponents, PeriodModel};
use crate::error::{bail, Result};
use crate::stats::BinomialEstimate;

/// Smallest number of trials accepted by [`monte_carlo_failure`].
pub const MIN_TRIALS: u64 = 10_000;

/// Which period to sample.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Period {
    Memory { wait: usize },
    Computation { steps: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Event {
    Round(u32),
    Other,
}

fn binomial<R: Rng + ?Sized>(n: u64, p: f64, rng: &mut R) -> Result<u64> {
    if p <= 0.0 || n == 0 {
        return Ok(0);
    }
    match Binomial::new(n, p) {
        Ok(b) => Ok(b.sample(rng)),
        Err(_) => bail!(Argument, "invalid event probability {p}"),
    }
}

/// `count` distinct slots out of `n`.
fn distinct_slots<R: Rng + ?Sized>(count: u64, n: u64, rng: &mut R, out: &mut Vec<u64>) {
    out.clear();
    while (out.len() as u64) < count {
        let s = rng.random_range(0..n);
        if !out.contains(&s) {
            out.push(s);
        }
    }
}

/// Samples independent error events and applies the failure rules of the analytic model:
/// two wrong outcomes fail; one wrong outcome fails with any data error; otherwise errors on two
/// or more qubits fail, unless exactly two qubits err and each has a single error in the same
/// one of the last `excluded_rounds` rounds.
pub fn monte_carlo_failure<R: Rng + ?Sized>(
    c: &FailureComponents,
    period: Period,
    trials: u64,
    rng: &mut R,
) -> Result<BinomialEstimate> {
    if trials < MIN_TRIALS {
        bail!(Argument, "need at least {MIN_TRIALS} trials, got {trials}");
    }
    let model: PeriodModel = match period {
        Period::Memory { wait } => {
            if wait == 0 {
                bail!(Argument, "waiting time must be at least 1");
            }
            memory_model(c, wait)
        }
        Period::Computation { steps } => computation_model(c, steps)?,
    };
    for (name, p) in [
        ("outcome channel", c.channel_error),
        ("syndrome round", c.p_sr),
        ("gate", model.gate_error),
        ("waiting", model.wait_error),
    ] {
        if !(0.0..=1.0).contains(&p) {
            bail!(Argument, "{name} error probability {p} outside [0, 1]");
        }
    }
    let nq = c.n_qubits as u64;
    let rounds = model.rounds as u64;
    let first_excluded = model.rounds.saturating_sub(model.excluded_rounds);
    let mut failures = 0;
    let mut slots = Vec::new();
    let mut events: Vec<(u64, Event)> = Vec::new();
    for _ in 0..trials {
        let wrong = binomial(c.outcome_channels as u64, c.channel_error, rng)?;
        if wrong >= 2 {
            failures += 1;
            continue;
        }
        events.clear();
        let n_round = binomial(nq * rounds, c.p_sr, rng)?;
        distinct_slots(n_round, nq * rounds, rng, &mut slots);
        events.extend(slots.iter().map(|&s| (s / rounds, Event::Round((s % rounds) as u32))));
        for p in [model.gate_error, model.wait_error] {
            let n = binomial(nq, p, rng)?;
            distinct_slots(n, nq, rng, &mut slots);
            events.extend(slots.iter().map(|&q| (q, Event::Other)));
        }
        if events.is_empty() {
            continue;
        }
        if wrong == 1 {
            failures += 1;
            continue;
        }
        let mut qubits: Vec<u64> = events.iter().map(|e| e.0).collect();
        qubits.sort_unstable();
        qubits.dedup();
        if qubits.len() < 2 {
            continue;
        }
        let corrected = qubits.len() == 2 && events.len() == 2 && {
            let (a, b) = (events[0].1, events[1].1);
            matches!((a, b), (Event::Round(r), Event::Round(s)) if r == s && r >= first_excluded)
        };
        if !corrected {
            failures += 1;
        }
    }
    Ok(BinomialEstimate::new(failures, trials, 3.0))
}
