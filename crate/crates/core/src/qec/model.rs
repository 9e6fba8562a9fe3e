use alloc::vec::Vec;
use core::fmt;

use crate::error::{bail, Result};

/// Steane-code block size.
pub const STEANE_QUBITS: usize = 7;

const PAIRS: f64 = 21.0;
const BRACKET: (f64, f64) = (1e-12, 0.1);
const MAX_WAIT: usize = 1 << 24;

/// Independent error probabilities per time step or operation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ErrorRates {
    /// ε_st, per qubit and idle time step.
    pub storage: f64,
    /// ε_g, per gate.
    pub gate: f64,
    /// ε_dm, on a data qubit while it is measured.
    pub data_during_measurement: f64,
    /// ε_om, wrong measurement outcome.
    pub outcome: f64,
}

impl ErrorRates {
    pub fn new(storage: f64, gate: f64, data_during_measurement: f64, outcome: f64) -> Result<Self> {
        let r = Self { storage, gate, data_during_measurement, outcome };
        r.validate()?;
        Ok(r)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("storage", self.storage),
            ("gate", self.gate),
            ("data_during_measurement", self.data_during_measurement),
            ("outcome", self.outcome),
        ] {
            if !(0.0..=0.5).contains(&v) {
                bail!(Argument, "{name} error rate {v} outside [0, 0.5]");
            }
        }
        Ok(())
    }

    /// Rates ε_st·(1, g, dm, om) for the given ratios, unchecked so threshold searches may probe
    /// beyond the physical range.
    pub fn from_ratios(storage: f64, ratios: RateRatios) -> Self {
        Self {
            storage,
            gate: storage * ratios.gate,
            data_during_measurement: storage * ratios.data_during_measurement,
            outcome: storage * ratios.outcome,
        }
    }
}

/// ε_g/ε_st, ε_dm/ε_st and ε_om/ε_st.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RateRatios {
    pub gate: f64,
    pub data_during_measurement: f64,
    pub outcome: f64,
}

impl RateRatios {
    pub fn new(gate: f64, data_during_measurement: f64, outcome: f64) -> Result<Self> {
        if ![gate, data_during_measurement, outcome].iter().all(|v| *v >= 0.0 && v.is_finite()) {
            bail!(Argument, "rate ratios must be finite and non-negative");
        }
        Ok(Self { gate, data_during_measurement, outcome })
    }

    pub fn uniform(r: f64) -> Result<Self> {
        Self::new(r, r, r)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Architecture {
    /// Multi-qubit parity measurements of the stabilizers.
    Ramm,
    /// Single- and two-qubit gates with Shor-state ancillas.
    Reference,
}

impl Architecture {
    pub const ALL: [Architecture; 2] = [Architecture::Ramm, Architecture::Reference];

    pub fn name(self) -> &'static str {
        match self {
            Architecture::Ramm => "ramm",
            Architecture::Reference => "reference",
        }
    }

    pub fn from_name(s: &str) -> Option<Self> {
        match s {
            "ramm" => Some(Architecture::Ramm),
            "reference" => Some(Architecture::Reference),
            _ => None,
        }
    }

    /// Syndrome-plus-recovery time steps: 6 + 1 for parity measurements, 9 + 1 otherwise.
    pub fn default_n0(self) -> usize {
        match self {
            Architecture::Ramm => 7,
            Architecture::Reference => 10,
        }
    }

    /// Independent channels whose single error flips a syndrome outcome.
    pub fn outcome_channels(self) -> u32 {
        match self {
            Architecture::Ramm => 6,
            Architecture::Reference => 24,
        }
    }
}

impl fmt::Display for Architecture {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Ingredients of the per-period failure probability of one Steane block.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FailureComponents {
    pub architecture: Architecture,
    /// P_om(1): one wrong syndrome outcome.
    pub p_om_1: f64,
    /// P_om(2): two wrong syndrome outcomes.
    pub p_om_2: f64,
    /// P_sr: error of one qubit during one syndrome-and-recovery round.
    pub p_sr: f64,
    /// N_0: time steps of one syndrome-and-recovery round.
    pub n0: usize,
    pub n_qubits: usize,
    pub outcome_channels: u32,
    /// Error probability of one outcome channel; P_om(1) = m q, P_om(2) = m(m-1)/2 q².
    pub channel_error: f64,
    pub storage: f64,
    pub gate: f64,
}

impl FailureComponents {
    pub fn with_n0(mut self, n0: usize) -> Self {
        self.n0 = n0;
        self
    }

    fn from_channels(architecture: Architecture, q: f64, p_sr: f64, rates: &ErrorRates) -> Self {
        let m = architecture.outcome_channels() as f64;
        Self {
            architecture,
            p_om_1: m * q,
            p_om_2: 0.5 * m * (m - 1.0) * q * q,
            p_sr,
            n0: architecture.default_n0(),
            n_qubits: STEANE_QUBITS,
            outcome_channels: architecture.outcome_channels(),
            channel_error: q,
            storage: rates.storage,
            gate: rates.gate,
        }
    }
}

/// Six parity measurements, each qubit in 24/7 of them on average.
pub fn ramm_components(rates: &ErrorRates) -> FailureComponents {
    let p_sr = 24.0 / 7.0 * rates.data_during_measurement + 24.0 / 7.0 * rates.storage + rates.gate / 7.0;
    FailureComponents::from_channels(Architecture::Ramm, rates.outcome, p_sr, rates)
}

/// Shor-state syndrome extraction with 24 ancillas.
pub fn reference_components(rates: &ErrorRates) -> FailureComponents {
    let p_init = rates.outcome + rates.data_during_measurement;
    let p_synd = 13.0 / 4.0 * rates.gate + 15.0 / 4.0 * rates.storage + rates.gate + rates.outcome + 3.0 * rates.storage;
    let p_sr = 38.0 / 7.0 * rates.gate + 25.0 / 7.0 * rates.storage + rates.gate / 7.0 + 6.0 / 7.0 * rates.storage;
    FailureComponents::from_channels(Architecture::Reference, p_init + p_synd, p_sr, rates)
}

pub fn components(architecture: Architecture, rates: &ErrorRates) -> FailureComponents {
    match architecture {
        Architecture::Ramm => ramm_components(rates),
        Architecture::Reference => reference_components(rates),
    }
}

/// Error bookkeeping of one qubit over one period: `rounds` syndrome rounds at P_sr each, an
/// extra gate error and a waiting error; pairs of errors falling in the same one of the last
/// `excluded_rounds` rounds are corrected.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PeriodModel {
    pub rounds: u32,
    pub gate_error: f64,
    pub wait_error: f64,
    pub excluded_rounds: u32,
}

/// P_om(2) + 7 P_om(1) a + 21 (a² - x P_sr²) with a = k P_sr + e + w.
pub fn period_failure(c: &FailureComponents, model: &PeriodModel) -> f64 {
    let a = model.rounds as f64 * c.p_sr + model.gate_error + model.wait_error;
    c.p_om_2 + c.n_qubits as f64 * c.p_om_1 * a + PAIRS * (a * a - model.excluded_rounds as f64 * c.p_sr * c.p_sr)
}

/// Memory period: two syndrome rounds and N idle steps.
pub fn memory_model(c: &FailureComponents, n: usize) -> PeriodModel {
    PeriodModel {
        rounds: 2,
        gate_error: 0.0,
        wait_error: n as f64 * c.storage,
        excluded_rounds: 1,
    }
}

/// Computation period of M steps: three rounds, one two-qubit gate and M - N_0 - 1 idle steps.
pub fn computation_model(c: &FailureComponents, m: usize) -> Result<PeriodModel> {
    if m < c.n0 + 1 {
        bail!(Argument, "period M = {m} shorter than N_0 + 1 = {}", c.n0 + 1);
    }
    Ok(PeriodModel {
        rounds: 3,
        gate_error: c.gate,
        wait_error: (m - c.n0 - 1) as f64 * c.storage,
        excluded_rounds: 2,
    })
}

/// Failure probability of one memory period with N waiting steps.
pub fn memory_failure(c: &FailureComponents, n: usize) -> Result<f64> {
    if n == 0 {
        bail!(Argument, "waiting time must be at least 1");
    }
    Ok(period_failure(c, &memory_model(c, n)))
}

/// Failure probability of one computation period of M steps.
pub fn computation_failure(c: &FailureComponents, m: usize) -> Result<f64> {
    Ok(period_failure(c, &computation_model(c, m)?))
}

/// min over N of P(failure, N)/(N + N_0): the optimal waiting time and the failure rate per step.
pub fn optimize_waiting(c: &FailureComponents) -> Result<(usize, f64)> {
    if !(c.storage > 0.0) {
        bail!(Argument, "waiting is free without storage errors; no optimum");
    }
    let rate = |n: usize| period_failure(c, &memory_model(c, n)) / (n + c.n0) as f64;
    let mut limit = 64;
    loop {
        let (best, value) = (1..=limit).map(|n| (n, rate(n))).fold((0, f64::INFINITY), |acc, x| if x.1 < acc.1 { x } else { acc });
        if best < limit {
            return Ok((best, value));
        }
        if limit >= MAX_WAIT {
            bail!(Convergence, "optimal waiting time beyond {MAX_WAIT} steps");
        }
        limit *= 4;
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ThresholdResult {
    pub architecture: Architecture,
    /// ε_st at threshold.
    pub threshold: f64,
    /// Optimal waiting time (memory) or the period length (computation) at threshold.
    pub n_star: usize,
    /// Per-step failure rate p_f(N) at threshold for N = 1 … 2N* (memory only).
    pub curve: Vec<(usize, f64)>,
    /// The threshold reached the top of the search bracket (0.1).
    pub saturated: bool,
    /// |p_f(ε_th) - target(ε_th)| / ε_th.
    pub residual: f64,
}

fn bisect(excess: impl Fn(f64) -> Result<f64>) -> Result<(f64, bool)> {
    let (mut lo, mut hi) = BRACKET;
    if excess(hi)? < 0.0 {
        return Ok((hi, true));
    }
    if excess(lo)? >= 0.0 {
        bail!(Convergence, "failure rate exceeds the target even at ε_st = {lo}");
    }
    for _ in 0..400 {
        let mid = libm::sqrt(lo * hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if excess(mid)? < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let e_lo = excess(lo)?.abs();
    let e_hi = excess(hi)?.abs();
    Ok((if e_lo <= e_hi { lo } else { hi }, false))
}

/// ε_st at which the optimized memory failure rate per step equals ε_st.
pub fn memory_threshold(ratios: RateRatios, architecture: Architecture, n0: Option<usize>) -> Result<ThresholdResult> {
    let comps = |eps: f64| {
        let c = components(architecture, &ErrorRates::from_ratios(eps, ratios));
        n0.map_or(c, |n| c.with_n0(n))
    };
    let (threshold, saturated) = bisect(|eps| Ok(optimize_waiting(&comps(eps))?.1 - eps))?;
    let c = comps(threshold);
    let (n_star, pf) = optimize_waiting(&c)?;
    let curve = (1..=2 * n_star).map(|n| (n, period_failure(&c, &memory_model(&c, n)) / (n + c.n0) as f64)).collect();
    Ok(ThresholdResult {
        architecture,
        threshold,
        n_star,
        curve,
        saturated,
        residual: (pf - threshold).abs() / threshold,
    })
}

/// Per-step failure rate without encoding: storage every step plus one gate per period.
pub fn unencoded_rate(rates: &ErrorRates, m: usize) -> f64 {
    rates.storage + rates.gate / m as f64
}

/// ε_st at which the encoded failure rate P(failure, M)/M equals [`unencoded_rate`].
pub fn computation_threshold(ratios: RateRatios, architecture: Architecture, m: usize, n0: Option<usize>) -> Result<ThresholdResult> {
    let comps = |eps: f64| {
        let c = components(architecture, &ErrorRates::from_ratios(eps, ratios));
        n0.map_or(c, |n| c.with_n0(n))
    };
    let excess = |eps: f64| -> Result<f64> {
        let c = comps(eps);
        Ok(computation_failure(&c, m)? / m as f64 - unencoded_rate(&ErrorRates::from_ratios(eps, ratios), m))
    };
    let (threshold, saturated) = bisect(excess)?;
    let residual = excess(threshold)?.abs() / threshold;
    Ok(ThresholdResult {
        architecture,
        threshold,
        n_star: m,
        curve: Vec::new(),
        saturated,
        residual,
    })
}

/// RAMM over reference memory threshold.
pub fn memory_threshold_ratio(ratios: RateRatios) -> Result<f64> {
    Ok(memory_threshold(ratios, Architecture::Ramm, None)?.threshold / memory_threshold(ratios, Architecture::Reference, None)?.threshold)
}

/// RAMM over reference computation threshold at period M.
pub fn computation_threshold_ratio(ratios: RateRatios, m: usize) -> Result<f64> {
    Ok(computation_threshold(ratios, Architecture::Ramm, m, None)?.threshold
        / computation_threshold(ratios, Architecture::Reference, m, None)?.threshold)
}

/// One level of code concatenation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConcatenationLevel {
    pub level: u32,
    /// p_{f,k} = ε_th (ε/ε_th)^{2^k}.
    pub failure: f64,
    /// 7^k physical qubits per logical qubit.
    pub physical_qubits: u64,
}

pub fn concatenation_curve(eps: f64, eps_th: f64, k_max: u32) -> Result<Vec<ConcatenationLevel>> {
    if !(eps_th > 0.0) || !(eps >= 0.0) || eps > eps_th {
        bail!(Argument, "need 0 ≤ ε ≤ ε_th, got ε = {eps}, ε_th = {eps_th}");
    }
    if k_max > 22 {
        bail!(Argument, "at most 22 levels");
    }
    Ok((0..=k_max)
        .map(|k| ConcatenationLevel {
            level: k,
            failure: eps_th * libm::pow(eps / eps_th, libm::pow(2.0, k as f64)),
            physical_qubits: 7u64.pow(k),
        })
        .collect())
}
