//! Experiments behind the commands and checks, returning plain data.

use anyhow::{anyhow, bail, Result};
use majorana_core::algebra::{MajoranaSet, UnitaryMatrix};
use majorana_core::braid::{
    braid_cycle, ideal_braid_unitary, pflip_experiment, standard_braid_schedule, BraidDevice, FluxSchedule,
    HolonomyResult, PflipResult, DEFAULT_WILSON_POINTS,
};
use majorana_core::device::{
    coulomb_coupling_asymptotic, coulomb_coupling_exact, effective_braiding_hamiltonian, microscopic_pi_hamiltonian,
    pi_couplings, validate_regime, CouplingSet, FluxConfig, IslandParams, RegimeParams, RegimeReport,
    DEFAULT_CHARGE_CUTOFF,
};
use majorana_core::linalg::{eigvalsh, re, CVec, C64};
use majorana_core::logic::{
    bravyi_kitaev_all_branches, cluster_stabilizers, cnot, prepare_cluster_state, BkBranch, ExecutionMode,
    ForcedOutcomes, LogicalRegister, MeasurementRecord,
};
use majorana_core::qec::{computation_threshold, memory_threshold, Architecture, RateRatios};
use majorana_core::readout::{
    dispersive_frequency, exact_cavity_frequency, frequency_shift, measurement_error, simulate_readout,
    MeasurementError, PhotonCountModel, ReadoutParams,
};
use majorana_core::stats::BinomialEstimate;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::params::DeviceParams;

fn core_err(e: majorana_core::Error) -> anyhow::Error {
    anyhow!("{e}")
}

/// Runs `f` on a pool of `jobs` workers (0 = rayon's default).
pub fn with_jobs<T: Send>(jobs: usize, f: impl FnOnce() -> T + Send) -> Result<T> {
    let pool = rayon::ThreadPoolBuilder::new().num_threads(jobs).build()?;
    Ok(pool.install(f))
}

/// Independent ChaCha8 stream `stream` of the run seeded by `seed`.
pub fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BraidConfig {
    pub x_max: f64,
    /// Δ_min/Δ_max; ignored when `device` is given.
    pub delta_ratio: f64,
    /// Duration of one schedule step in units of ħ/Δ_max.
    pub step_duration: f64,
    pub wilson_points: usize,
    /// Also integrate the Schrödinger equation from this many slices.
    pub evolve_slices: Option<usize>,
    /// Flip the sign of one coupling (0-based), for fault injection.
    pub flip_coupling: Option<usize>,
    pub device: Option<DeviceParams>,
}

impl Default for BraidConfig {
    fn default() -> Self {
        Self {
            x_max: 1.0,
            delta_ratio: 1e-5,
            step_duration: 1e3 / 6.0,
            wilson_points: DEFAULT_WILSON_POINTS,
            evolve_slices: None,
            flip_coupling: None,
            device: None,
        }
    }
}

pub struct BraidRun {
    pub device: BraidDevice,
    pub cycle: FluxSchedule,
    pub program: FluxSchedule,
    pub holonomy: HolonomyResult,
    /// Distance to (1/√2)[[1, -i], [-i, 1]] modulo a global phase.
    pub distance: f64,
}

pub fn braid_device(cfg: &BraidConfig) -> Result<BraidDevice> {
    let device = match &cfg.device {
        Some(p) => BraidDevice::new(p.island().map_err(core_err)?, cfg.x_max),
        None => BraidDevice::with_delta_ratio(cfg.delta_ratio, cfg.x_max, 1.0),
    }
    .map_err(core_err)?;
    Ok(match cfg.flip_coupling {
        Some(i) => device.with_flipped_coupling(i),
        None => device,
    })
}

pub fn run_braid(cfg: &BraidConfig) -> Result<BraidRun> {
    run_braid_on(cfg, None)
}

/// As [`run_braid`], with the holonomy taken over `cycle` instead of the exchange cycle.
pub fn run_braid_on(cfg: &BraidConfig, cycle: Option<FluxSchedule>) -> Result<BraidRun> {
    let device = braid_device(cfg)?;
    let step = cfg.step_duration / device.delta_max();
    let cycle = match cycle {
        Some(c) => c,
        None => braid_cycle(cfg.x_max, step).map_err(core_err)?,
    };
    let program = standard_braid_schedule(cfg.x_max, step).map_err(core_err)?;
    let holonomy = device.holonomy(&cycle, cfg.wilson_points, cfg.evolve_slices).map_err(core_err)?;
    let distance = holonomy.qubit_unitary.distance(&ideal_braid_unitary());
    Ok(BraidRun {
        device,
        cycle,
        program,
        holonomy,
        distance,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PflipConfig {
    pub cycles: u32,
    pub shots: u64,
    pub lambda_plus: f64,
    pub lambda_minus: f64,
}

impl Default for PflipConfig {
    fn default() -> Self {
        Self {
            cycles: 8,
            shots: 10_000,
            lambda_plus: 400.0,
            lambda_minus: 100.0,
        }
    }
}

/// p_flip for n = 1 … cycles; cycle count n draws from stream n.
pub fn pflip_table(braid: &UnitaryMatrix, cfg: &PflipConfig, seed: u64, jobs: usize) -> Result<Vec<PflipResult>> {
    if cfg.cycles == 0 || cfg.shots == 0 {
        bail!("need at least one cycle and one shot");
    }
    let model = PhotonCountModel::from_rates(cfg.lambda_plus, cfg.lambda_minus).map_err(core_err)?;
    with_jobs(jobs, || {
        (1..=cfg.cycles)
            .into_par_iter()
            .map(|n| {
                let mut rng = stream_rng(seed, u64::from(n));
                pflip_experiment(braid, n, cfg.shots, &model, &mut rng).map_err(core_err)
            })
            .collect::<Result<Vec<_>>>()
    })?
}

/// The repeating p_flip pattern 1/2, 1, 1/2, 0 of one exchange per cycle.
pub fn pflip_pattern(n: u32) -> f64 {
    [0.5, 1.0, 0.5, 0.0][((n + 3) % 4) as usize]
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReadoutConfig {
    pub cavity_freq: f64,
    pub detuning: f64,
    pub coupling: f64,
    pub delta_plus: f64,
    pub delta_minus: f64,
    pub kappa: f64,
    pub lambda_plus: f64,
    pub lambda_minus: f64,
    /// With a measurement time, λ_± come from Lorentzian transmissions instead.
    pub t_m: Option<f64>,
    pub shots: u64,
}

impl Default for ReadoutConfig {
    fn default() -> Self {
        Self {
            cavity_freq: 7.0,
            detuning: 1.0,
            coupling: 0.1,
            delta_plus: 0.02,
            delta_minus: 0.005,
            kappa: 0.001,
            lambda_plus: 100.0,
            lambda_minus: 49.0,
            t_m: None,
            shots: 1_000_000,
        }
    }
}

impl ReadoutConfig {
    pub fn params(&self) -> ReadoutParams {
        ReadoutParams {
            cavity_freq: self.cavity_freq,
            qubit_freq: self.cavity_freq + self.detuning,
            coupling: self.coupling,
            delta_plus: self.delta_plus,
            delta_minus: self.delta_minus,
            offset_charge: 0.0,
            kappa: self.kappa,
        }
    }

    pub fn model(&self) -> Result<PhotonCountModel> {
        match self.t_m {
            Some(t) => PhotonCountModel::lorentzian(&self.params(), t),
            None => PhotonCountModel::from_rates(self.lambda_plus, self.lambda_minus),
        }
        .map_err(core_err)
    }
}

/// One simulated readout shot.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReadoutSample {
    pub parity: i8,
    pub n_ph: u64,
    pub outcome: i8,
}

pub struct ReadoutRun {
    pub omega_plus: f64,
    pub omega_minus: f64,
    pub dispersive: bool,
    pub shift_formula: f64,
    /// Difference of the exact ground-branch cavity frequencies.
    pub shift_exact: f64,
    pub model: PhotonCountModel,
    pub error: MeasurementError,
    pub sampled: BinomialEstimate,
    pub samples: Vec<ReadoutSample>,
}

const SHOTS_PER_STREAM: u64 = 1 << 16;

/// Alternating-parity shots (even index +1, odd -1); chunk k of 2^16 shots draws from stream k.
pub fn sample_readout(model: &PhotonCountModel, shots: u64, seed: u64, jobs: usize) -> Result<Vec<ReadoutSample>> {
    let chunks = shots.div_ceil(SHOTS_PER_STREAM);
    let parts = with_jobs(jobs, || {
        (0..chunks)
            .into_par_iter()
            .map(|k| {
                let mut rng = stream_rng(seed, k);
                let lo = k * SHOTS_PER_STREAM;
                let hi = (lo + SHOTS_PER_STREAM).min(shots);
                (lo..hi)
                    .map(|i| {
                        let parity = if i % 2 == 0 { 1 } else { -1 };
                        let (outcome, n_ph) = simulate_readout(parity, model, &mut rng).map_err(core_err)?;
                        Ok(ReadoutSample { parity, n_ph, outcome })
                    })
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()
    })??;
    Ok(parts.into_iter().flatten().collect())
}

pub fn run_readout(cfg: &ReadoutConfig, seed: u64, jobs: usize) -> Result<ReadoutRun> {
    let p = cfg.params();
    let plus = dispersive_frequency(&p, 1).map_err(core_err)?;
    let minus = dispersive_frequency(&p, -1).map_err(core_err)?;
    let shift_formula = frequency_shift(&p).map_err(core_err)?;
    let shift_exact = exact_cavity_frequency(&p, 1).map_err(core_err)? - exact_cavity_frequency(&p, -1).map_err(core_err)?;
    let model = cfg.model()?;
    let error = measurement_error(&model).map_err(core_err)?;
    let samples = sample_readout(&model, cfg.shots, seed, jobs)?;
    let wrong = samples.iter().filter(|s| s.outcome != s.parity).count() as u64;
    Ok(ReadoutRun {
        omega_plus: plus.frequency,
        omega_minus: minus.frequency,
        dispersive: plus.dispersive,
        shift_formula,
        shift_exact,
        model,
        error,
        sampled: BinomialEstimate::new(wrong, samples.len() as u64, 3.0),
        samples,
    })
}

/// One CNOT run: a forced outcome branch applied to one input.
#[derive(Debug, Clone, PartialEq)]
pub struct CnotRun {
    pub branch: Vec<i8>,
    pub input: String,
    /// |⟨CNOT ψ ⊗ 0|out⟩|².
    pub fidelity: f64,
    pub record: MeasurementRecord,
}

fn normalized(v: Vec<C64>) -> CVec {
    let v = CVec::from_vec(v);
    let n = v.norm();
    v / re(n)
}

fn cnot_inputs() -> Vec<(String, CVec)> {
    let mut out: Vec<(String, CVec)> = (0..4)
        .map(|k| {
            let mut v = vec![C64::new(0.0, 0.0); 4];
            v[k] = C64::new(1.0, 0.0);
            (format!("|{}{}>", k >> 1, k & 1), CVec::from_vec(v))
        })
        .collect();
    out.push((
        "superposition".into(),
        normalized(vec![C64::new(1.0, 0.0), C64::new(0.0, 0.7), C64::new(-0.4, 0.0), C64::new(0.3, -0.5)]),
    ));
    out
}

/// Runs the measurement-based CNOT (control 0, target 1, ancilla 2 in |+⟩) on every outcome
/// branch and on the four basis inputs plus one phase-sensitive superposition.
pub fn cnot_truth_table(mode: &ExecutionMode) -> Result<Vec<CnotRun>> {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let mut runs = Vec::new();
    for branch in ForcedOutcomes::all_branches(3) {
        for (name, two) in cnot_inputs() {
            let mut psi = CVec::zeros(8);
            let mut want = CVec::zeros(8);
            for ct in 0..4 {
                psi[ct << 1] = two[ct] * re(s);
                psi[(ct << 1) | 1] = two[ct] * re(s);
                let (c, t) = (ct >> 1, ct & 1);
                want[(c << 2) | ((c ^ t) << 1)] = two[ct];
            }
            let mut reg = LogicalRegister::from_logical(3, &psi).map_err(core_err)?.with_mode(mode.clone());
            let mut forced = ForcedOutcomes::new(branch.clone());
            let record = cnot(&mut reg, 0, 1, 2, &mut forced).map_err(core_err)?;
            let out = reg.logical_state().map_err(core_err)?;
            let fidelity = want.dotc(&out).norm_sqr();
            runs.push(CnotRun {
                branch: branch.clone(),
                input: name,
                fidelity,
                record,
            });
        }
    }
    Ok(runs)
}

pub fn bk_branches() -> Result<Vec<BkBranch>> {
    bravyi_kitaev_all_branches().map_err(core_err)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClusterConfig {
    pub rows: usize,
    pub cols: usize,
    pub hardware: bool,
}

pub struct ClusterRun {
    pub record: MeasurementRecord,
    /// (K_α as a parity, ⟨K_α⟩) after the fix-ups.
    pub stabilizers: Vec<(String, f64)>,
}

pub fn run_cluster(cfg: &ClusterConfig, seed: u64) -> Result<ClusterRun> {
    let mode = if cfg.hardware {
        ExecutionMode::Hardware(majorana_core::braid::IslandLayout::triangular_qubit(0.7))
    } else {
        ExecutionMode::Abstract
    };
    let mut reg = LogicalRegister::new(cfg.rows * cfg.cols).map_err(core_err)?.with_mode(mode);
    let mut rng = stream_rng(seed, 0);
    let record = prepare_cluster_state(&mut reg, cfg.rows, cfg.cols, &mut rng).map_err(core_err)?;
    let stabilizers = cluster_stabilizers(cfg.rows, cfg.cols)
        .map_err(core_err)?
        .iter()
        .map(|k| Ok((k.to_string(), reg.expectation(k).map_err(core_err)?)))
        .collect::<Result<_>>()?;
    Ok(ClusterRun { record, stabilizers })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ThresholdConfig {
    #[serde(serialize_with = "arch_names")]
    pub architectures: Vec<Architecture>,
    /// ε_g/ε_st grid of the memory sweep.
    pub gate_ratios: Vec<f64>,
    /// ε_dm/ε_st = ε_om/ε_st values, one curve each.
    pub measurement_ratios: Vec<f64>,
    /// Period lengths M of the computation sweep.
    pub periods: Vec<usize>,
    /// Uniform error ratios of the computation sweep, one curve each.
    pub period_ratios: Vec<f64>,
    pub n0_ramm: Option<usize>,
    pub n0_reference: Option<usize>,
}

impl Default for ThresholdConfig {
    fn default() -> Self {
        Self {
            architectures: Architecture::ALL.to_vec(),
            gate_ratios: (0..=20).map(|i| 10f64.powf(-1.0 + 0.1 * f64::from(i))).collect(),
            measurement_ratios: vec![1.0, 2.0, 5.0, 10.0],
            periods: vec![11, 12, 15, 20, 30, 50, 70, 100, 200, 500, 1000],
            period_ratios: vec![1.0, 5.0, 10.0],
            n0_ramm: None,
            n0_reference: None,
        }
    }
}

fn arch_names<S: serde::Serializer>(a: &[Architecture], s: S) -> Result<S::Ok, S::Error> {
    s.collect_seq(a.iter().map(|a| a.name()))
}

impl ThresholdConfig {
    fn n0(&self, arch: Architecture) -> Option<usize> {
        match arch {
            Architecture::Ramm => self.n0_ramm,
            Architecture::Reference => self.n0_reference,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MemoryPoint {
    pub architecture: Architecture,
    pub gate_ratio: f64,
    pub measurement_ratio: f64,
    pub threshold: f64,
    pub n_star: usize,
    pub saturated: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ComputationPoint {
    pub architecture: Architecture,
    pub ratio: f64,
    pub period: usize,
    pub threshold: f64,
}

pub struct ThresholdSweep {
    pub memory: Vec<MemoryPoint>,
    pub computation: Vec<ComputationPoint>,
}

impl ThresholdSweep {
    pub fn memory_at(&self, arch: Architecture, g: f64, m: f64) -> Option<&MemoryPoint> {
        self.memory.iter().find(|p| p.architecture == arch && p.gate_ratio == g && p.measurement_ratio == m)
    }

    /// RAMM/reference memory-threshold ratio per (ε_g/ε_st, ε_m/ε_st), when both were swept.
    pub fn memory_ratios(&self) -> Vec<(f64, f64, f64)> {
        self.memory
            .iter()
            .filter(|p| p.architecture == Architecture::Ramm)
            .filter_map(|p| {
                let r = self.memory_at(Architecture::Reference, p.gate_ratio, p.measurement_ratio)?;
                Some((p.gate_ratio, p.measurement_ratio, p.threshold / r.threshold))
            })
            .collect()
    }

    /// RAMM/reference computation-threshold ratio per (ratio, M).
    pub fn computation_ratios(&self) -> Vec<(f64, usize, f64)> {
        self.computation
            .iter()
            .filter(|p| p.architecture == Architecture::Ramm)
            .filter_map(|p| {
                let r = self.computation.iter().find(|q| {
                    q.architecture == Architecture::Reference && q.ratio == p.ratio && q.period == p.period
                })?;
                Some((p.ratio, p.period, p.threshold / r.threshold))
            })
            .collect()
    }
}

pub fn threshold_sweep(cfg: &ThresholdConfig, jobs: usize) -> Result<ThresholdSweep> {
    if cfg.architectures.is_empty() || cfg.gate_ratios.is_empty() || cfg.measurement_ratios.is_empty() {
        bail!("empty threshold grid");
    }
    let memory_jobs: Vec<(Architecture, f64, f64)> = cfg
        .architectures
        .iter()
        .flat_map(|&a| cfg.measurement_ratios.iter().flat_map(move |&m| cfg.gate_ratios.iter().map(move |&g| (a, g, m))))
        .collect();
    let computation_jobs: Vec<(Architecture, f64, usize)> = cfg
        .architectures
        .iter()
        .flat_map(|&a| cfg.period_ratios.iter().flat_map(move |&r| cfg.periods.iter().map(move |&m| (a, r, m))))
        .collect();
    with_jobs(jobs, || {
        let memory = memory_jobs
            .par_iter()
            .map(|&(a, g, m)| {
                let ratios = RateRatios::new(g, m, m).map_err(core_err)?;
                let t = memory_threshold(ratios, a, cfg.n0(a)).map_err(core_err)?;
                Ok(MemoryPoint {
                    architecture: a,
                    gate_ratio: g,
                    measurement_ratio: m,
                    threshold: t.threshold,
                    n_star: t.n_star,
                    saturated: t.saturated,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        let computation = computation_jobs
            .par_iter()
            .map(|&(a, r, m)| {
                let ratios = RateRatios::uniform(r).map_err(core_err)?;
                let t = computation_threshold(ratios, a, m, cfg.n0(a)).map_err(core_err)?;
                Ok(ComputationPoint {
                    architecture: a,
                    ratio: r,
                    period: m,
                    threshold: t.threshold,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(ThresholdSweep { memory, computation })
    })?
}

/// Coulomb coupling of one island: asymptotic formula and exact charge-basis value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CouplingPoint {
    pub ej_over_ec: f64,
    pub asymptotic: f64,
    pub exact: f64,
}

pub fn coulomb_sweep(ratios: &[f64], e_c: f64, q_offset: f64, jobs: usize) -> Result<Vec<CouplingPoint>> {
    with_jobs(jobs, || {
        ratios
            .par_iter()
            .map(|&r| {
                let island = IslandParams::new(r * e_c, e_c, q_offset).map_err(core_err)?;
                Ok(CouplingPoint {
                    ej_over_ec: r,
                    asymptotic: coulomb_coupling_asymptotic(&island).map_err(core_err)?,
                    exact: coulomb_coupling_exact(&island, DEFAULT_CHARGE_CUTOFF).map_err(core_err)?,
                })
            })
            .collect()
    })?
}

/// Coulomb couplings U_1 … U_3 of the π-circuit islands at fluxes x_1 … x_3.
pub fn island_couplings(p: &DeviceParams) -> Result<(FluxConfig, [f64; 3])> {
    if p.flux.len() != 4 {
        bail!("the π-circuit takes 4 fluxes (x_0 … x_3), got {}", p.flux.len());
    }
    let flux = FluxConfig::new(p.flux.clone()).map_err(core_err)?;
    let island = p.island().map_err(core_err)?;
    let u = |x: f64| coulomb_coupling_asymptotic(&island.at_flux(x)).map_err(core_err);
    Ok((flux, [u(p.flux[1])?, u(p.flux[2])?, u(p.flux[3])?]))
}

pub fn device_couplings(p: &DeviceParams) -> Result<CouplingSet> {
    let (flux, u) = island_couplings(p)?;
    pi_couplings(&flux, &u).map_err(core_err)
}

/// Largest deviation between the eight lowest microscopic levels (mean removed) and the
/// effective six-Majorana spectrum, at tunnel coupling `e_m`.
pub fn microscopic_residual(flux: &FluxConfig, u: &[f64; 3], e_m: f64) -> Result<f64> {
    let micro = MajoranaSet::new(10).map_err(core_err)?;
    let eff = MajoranaSet::new(6).map_err(core_err)?;
    let h = microscopic_pi_hamiltonian(u, e_m, flux, &micro).map_err(core_err)?;
    let mut low = eigvalsh(&h);
    low.truncate(8);
    let shift = low.iter().sum::<f64>() / 8.0;
    let couplings = pi_couplings(flux, u).map_err(core_err)?;
    let e = eigvalsh(&effective_braiding_hamiltonian(&couplings, &eff).map_err(core_err)?);
    Ok(low.iter().zip(&e).map(|(a, b)| (a - shift - b).abs()).fold(0.0, f64::max))
}

pub fn regime_report(p: &RegimeParams) -> Result<RegimeReport> {
    validate_regime(p).map_err(core_err)
}
