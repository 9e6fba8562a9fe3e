//! Command-line front end.
//!
//! Exit codes: 0 success, 1 a physics invariant or check failed, 2 invalid invocation or input.

use std::ffi::OsString;
use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use majorana_core::algebra::UnitaryMatrix;
use majorana_core::braid::{ideal_braid_unitary, FluxSchedule, IslandLayout};
use majorana_core::logic::ExecutionMode;
use majorana_core::qec::Architecture;
use majorana_core::readout::{measurement_error, PhotonCountModel};
use serde::Serialize;

use crate::checks::{self, CheckContext};
use crate::experiments::{self as ex, BraidConfig, ClusterConfig, PflipConfig, ReadoutConfig, ThresholdConfig};
use crate::output::{num, write_artifacts, Artifact, CsvTable, Provenance};
use crate::params::{load_json, DeviceParams, RegimeFile};
use crate::schedule_text::{read_schedule, write_schedule};
use crate::script::{parse_script, record_table, run_script};
use crate::svg::{LineChart, Series};

#[derive(Debug, Parser)]
#[command(name = "majorana-lab", version, about = "Numerical laboratory for flux-controlled Majorana qubits")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Braiding demonstration: holonomy of the exchange cycle and the p_flip table.
    BraidDemo(BraidDemoArgs),
    /// p_flip(n) estimates for repeated exchanges.
    Pflip(PflipArgs),
    /// Parity-dependent cavity shift and photon-counting readout errors.
    Readout(ReadoutArgs),
    /// CNOT truth table over every outcome branch and the Bravyi-Kitaev identity.
    CnotVerify(CnotArgs),
    /// Measurement-based cluster-state preparation.
    Cluster(ClusterArgs),
    /// Steane-code error thresholds of the RAMM and reference architectures.
    Thresholds(ThresholdArgs),
    /// Checks a parameter set against the design inequalities.
    RegimeCheck(RegimeArgs),
    /// Coulomb coupling versus E_J/E_C, asymptotic and exact.
    CouplingSweep(CouplingArgs),
    /// Runs a logic script on a register of topological qubits.
    Run(RunArgs),
    /// Runs the acceptance checks.
    Verify(VerifyArgs),
}

#[derive(Debug, Clone, Args)]
pub struct Common {
    /// Output directory.
    #[arg(long, default_value = "out")]
    pub out: PathBuf,
    /// Worker threads (0 = one per core); results do not depend on it.
    #[arg(long, default_value_t = 0)]
    pub jobs: usize,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct BraidArgs {
    /// Device parameter file (JSON); overrides --delta-ratio.
    #[arg(long)]
    pub params: Option<PathBuf>,
    /// Closed flux schedule whose holonomy to compute instead of the exchange cycle.
    #[arg(long)]
    pub schedule: Option<PathBuf>,
    /// Largest flux x_max.
    #[arg(long, default_value_t = 1.0)]
    pub x_max: f64,
    /// Δ_min/Δ_max of a device built from the on/off ratio.
    #[arg(long, default_value_t = 1e-5)]
    pub delta_ratio: f64,
    /// Duration of each schedule step in units of ħ/Δ_max.
    #[arg(long, default_value_t = 1e3 / 6.0)]
    pub step: f64,
    /// Projector samples of the Wilson line.
    #[arg(long, default_value_t = majorana_core::braid::DEFAULT_WILSON_POINTS)]
    pub wilson_points: usize,
    /// Also integrate the Schrödinger equation, starting from this many slices.
    #[arg(long)]
    pub evolve_slices: Option<usize>,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct PflipCountArgs {
    /// Largest number of exchanges n.
    #[arg(long, default_value_t = 8)]
    pub cycles: u32,
    /// Shots per n.
    #[arg(long, visible_alias = "trials", default_value_t = 10_000)]
    pub shots: u64,
    /// Mean photon count for parity +1.
    #[arg(long, default_value_t = 400.0)]
    pub lambda_plus: f64,
    /// Mean photon count for parity -1.
    #[arg(long, default_value_t = 100.0)]
    pub lambda_minus: f64,
    #[arg(long)]
    pub seed: u64,
}

#[derive(Debug, Args, Serialize)]
pub struct BraidDemoArgs {
    #[command(flatten)]
    pub braid: BraidArgs,
    #[command(flatten)]
    pub counts: PflipCountArgs,
    #[command(flatten)]
    #[serde(skip)]
    pub common: Common,
}

#[derive(Debug, Args, Serialize)]
pub struct PflipArgs {
    #[command(flatten)]
    pub braid: BraidArgs,
    #[command(flatten)]
    pub counts: PflipCountArgs,
    /// Use the ideal exchange unitary instead of the simulated device.
    #[arg(long)]
    pub ideal: bool,
    #[command(flatten)]
    #[serde(skip)]
    pub common: Common,
}

#[derive(Debug, Args, Serialize)]
pub struct ReadoutArgs {
    /// Bare cavity frequency ω_0.
    #[arg(long, default_value_t = 7.0)]
    pub cavity: f64,
    /// Detuning δω = Ω_0 - ω_0.
    #[arg(long, default_value_t = 1.0)]
    pub detuning: f64,
    /// Transmon-cavity coupling g.
    #[arg(long, default_value_t = 0.1)]
    pub coupling: f64,
    #[arg(long, default_value_t = 0.02)]
    pub delta_plus: f64,
    #[arg(long, default_value_t = 0.005)]
    pub delta_minus: f64,
    /// Cavity decay rate κ.
    #[arg(long, default_value_t = 0.001)]
    pub kappa: f64,
    #[arg(long, default_value_t = 100.0)]
    pub lambda_plus: f64,
    #[arg(long, default_value_t = 49.0)]
    pub lambda_minus: f64,
    /// Measurement time; derives λ_± from the Lorentzian transmissions instead.
    #[arg(long)]
    pub t_m: Option<f64>,
    #[arg(long, visible_alias = "trials", default_value_t = 100_000)]
    pub shots: u64,
    #[arg(long)]
    pub seed: u64,
    #[command(flatten)]
    #[serde(skip)]
    pub common: Common,
}

#[derive(Debug, Args, Serialize)]
pub struct CnotArgs {
    /// Lower every operation to Majorana moves on triangular islands.
    #[arg(long)]
    pub hardware: bool,
    #[command(flatten)]
    #[serde(skip)]
    pub common: Common,
}

#[derive(Debug, Args, Serialize)]
pub struct ClusterArgs {
    #[arg(long, default_value_t = 3)]
    pub rows: usize,
    #[arg(long, default_value_t = 3)]
    pub cols: usize,
    /// Lower every operation to Majorana moves on triangular islands.
    #[arg(long)]
    pub hardware: bool,
    #[arg(long)]
    pub seed: u64,
    #[command(flatten)]
    #[serde(skip)]
    pub common: Common,
}

#[derive(Debug, Args, Serialize)]
pub struct ThresholdArgs {
    /// Architectures to sweep (ramm, reference); both by default.
    #[arg(long, value_delimiter = ',')]
    pub arch: Vec<String>,
    #[arg(long, default_value_t = 0.1)]
    pub g_min: f64,
    #[arg(long, default_value_t = 10.0)]
    pub g_max: f64,
    /// Log-spaced points of ε_g/ε_st.
    #[arg(long, default_value_t = 21)]
    pub g_points: usize,
    /// ε_dm/ε_st = ε_om/ε_st curves of the memory sweep.
    #[arg(long, value_delimiter = ',', default_values_t = [1.0, 2.0, 5.0, 10.0])]
    pub m_ratios: Vec<f64>,
    /// Period lengths M of the computation sweep.
    #[arg(long, value_delimiter = ',', default_values_t = [11usize, 12, 15, 20, 30, 50, 70, 100, 200, 500, 1000])]
    pub periods: Vec<usize>,
    /// Uniform error ratios of the computation sweep.
    #[arg(long, value_delimiter = ',', default_values_t = [1.0, 5.0, 10.0])]
    pub period_ratios: Vec<f64>,
    /// Fixed RAMM check-cycle count N_0 (default: optimized within each memory period).
    #[arg(long)]
    pub n0_ramm: Option<usize>,
    /// Reference-architecture N_0 (default 10).
    #[arg(long)]
    pub n0_reference: Option<usize>,
    #[command(flatten)]
    #[serde(skip)]
    pub common: Common,
}

#[derive(Debug, Args, Serialize)]
pub struct RegimeArgs {
    /// Regime parameter file (JSON); missing fields take the reference values.
    #[arg(long)]
    pub params: Option<PathBuf>,
    /// Override k_B T.
    #[arg(long)]
    pub temperature: Option<f64>,
    #[command(flatten)]
    #[serde(skip)]
    pub common: Common,
}

#[derive(Debug, Args, Serialize)]
pub struct CouplingArgs {
    /// Device parameter file; adds the π-circuit couplings at its flux point.
    #[arg(long)]
    pub params: Option<PathBuf>,
    #[arg(long, default_value_t = 0.5)]
    pub min: f64,
    #[arg(long, default_value_t = 100.0)]
    pub max: f64,
    /// Log-spaced points of E_J/E_C.
    #[arg(long, default_value_t = 40)]
    pub points: usize,
    #[command(flatten)]
    #[serde(skip)]
    pub common: Common,
}

#[derive(Debug, Args, Serialize)]
pub struct RunArgs {
    pub script: PathBuf,
    #[arg(long)]
    pub hardware: bool,
    #[arg(long)]
    pub seed: u64,
    #[command(flatten)]
    #[serde(skip)]
    pub common: Common,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// Only checks of this module (braid, device, readout, logic, qec, cli) or with this id.
    #[arg(long)]
    pub filter: Option<String>,
    /// Flip the sign of one braiding coupling; the holonomy checks must then fail.
    #[arg(long)]
    pub inject_fault: bool,
    #[arg(long, default_value_t = 2024)]
    pub seed: u64,
    #[arg(long, default_value_t = 0)]
    pub jobs: usize,
}

/// What a command produced.
#[derive(Debug, Default)]
pub struct Outcome {
    pub artifacts: Vec<Artifact>,
    pub report: Vec<String>,
    /// Violated invariants; any entry makes the exit status 1.
    pub failures: Vec<String>,
}

impl Outcome {
    fn line(&mut self, s: impl Into<String>) {
        self.report.push(s.into());
    }

    fn require(&mut self, ok: bool, what: impl Into<String>) {
        if !ok {
            self.failures.push(what.into());
        }
    }
}

/// Parses `args` (including the program name), runs the command and returns the exit status.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    let out_dir = out_dir(&cli.command);
    let outcome = match execute(&cli.command) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("error: {e:#}");
            return 2;
        }
    };
    for l in &outcome.report {
        println!("{l}");
    }
    if let Some(dir) = out_dir {
        if !outcome.artifacts.is_empty() {
            if let Err(e) = write_artifacts(&dir, &outcome.artifacts) {
                eprintln!("error: {e:#}");
                return 2;
            }
            for a in &outcome.artifacts {
                println!("wrote {}", dir.join(&a.name).display());
            }
        }
    }
    for f in &outcome.failures {
        eprintln!("FAILED: {f}");
    }
    i32::from(!outcome.failures.is_empty())
}

fn out_dir(c: &Command) -> Option<PathBuf> {
    Some(
        match c {
            Command::BraidDemo(a) => &a.common,
            Command::Pflip(a) => &a.common,
            Command::Readout(a) => &a.common,
            Command::CnotVerify(a) => &a.common,
            Command::Cluster(a) => &a.common,
            Command::Thresholds(a) => &a.common,
            Command::RegimeCheck(a) => &a.common,
            Command::CouplingSweep(a) => &a.common,
            Command::Run(a) => &a.common,
            Command::Verify(_) => return None,
        }
        .out
        .clone(),
    )
}

/// Runs a parsed command without touching the filesystem beyond its inputs.
pub fn execute(c: &Command) -> Result<Outcome> {
    match c {
        Command::BraidDemo(a) => braid_demo(a),
        Command::Pflip(a) => pflip(a),
        Command::Readout(a) => readout(a),
        Command::CnotVerify(a) => cnot_verify(a),
        Command::Cluster(a) => cluster(a),
        Command::Thresholds(a) => thresholds(a),
        Command::RegimeCheck(a) => regime_check(a),
        Command::CouplingSweep(a) => coupling_sweep(a),
        Command::Run(a) => run_logic(a),
        Command::Verify(a) => verify(a),
    }
}

fn load_device(path: &Option<PathBuf>) -> Result<Option<DeviceParams>> {
    path.as_ref()
        .map(|p| {
            let d: DeviceParams = load_json(p)?;
            d.validate().with_context(|| format!("invalid parameters in {}", p.display()))?;
            Ok(d)
        })
        .transpose()
}

fn load_schedule(path: &Option<PathBuf>) -> Result<Option<FluxSchedule>> {
    path.as_ref()
        .map(|p| {
            let text = std::fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?;
            read_schedule(&text).with_context(|| format!("parsing {}", p.display()))
        })
        .transpose()
}

fn braid_config(a: &BraidArgs, device: Option<DeviceParams>) -> BraidConfig {
    BraidConfig {
        x_max: a.x_max,
        delta_ratio: a.delta_ratio,
        step_duration: a.step,
        wilson_points: a.wilson_points,
        evolve_slices: a.evolve_slices,
        flip_coupling: None,
        device,
    }
}

fn pflip_config(a: &PflipCountArgs) -> PflipConfig {
    PflipConfig {
        cycles: a.cycles,
        shots: a.shots,
        lambda_plus: a.lambda_plus,
        lambda_minus: a.lambda_minus,
    }
}

#[derive(Serialize)]
struct Hashed<'a, A: Serialize, B: Serialize> {
    args: &'a A,
    inputs: B,
}

fn schedule_artifact(name: &str, s: &FluxSchedule, prov: &Provenance) -> Result<Artifact> {
    Ok(Artifact {
        name: name.into(),
        contents: format!("# {}\n{}", prov.header(), write_schedule(s)?),
    })
}

fn holonomy_table(u: &UnitaryMatrix) -> CsvTable {
    let mut t = CsvTable::new(&["row", "col", "re", "im"]);
    for r in 0..2 {
        for c in 0..2 {
            let z = u.matrix()[(r, c)];
            t.push(vec![r.to_string(), c.to_string(), num(z.re), num(z.im)]);
        }
    }
    t
}

fn pflip_rows(
    out: &mut Outcome,
    u: &UnitaryMatrix,
    cfg: &PflipConfig,
    seed: u64,
    jobs: usize,
    prov: &Provenance,
) -> Result<()> {
    let rows = ex::pflip_table(u, cfg, seed, jobs)?;
    let mut t = CsvTable::new(&["n", "flips", "shots", "p_flip", "ci_low", "ci_high", "std_error", "expected", "pattern"]);
    for r in &rows {
        let e = &r.estimate;
        t.push(vec![
            r.cycles.to_string(),
            e.successes.to_string(),
            e.trials.to_string(),
            num(e.estimate),
            num(e.low),
            num(e.high),
            num(e.std_error),
            num(r.expected),
            num(ex::pflip_pattern(r.cycles)),
        ]);
        out.line(format!(
            "n = {}: p_flip = {:.4} [{:.4}, {:.4}], expected {:.4}",
            r.cycles, e.estimate, e.low, e.high, r.expected
        ));
        out.require(e.contains(r.expected), format!("p_flip({}) interval excludes {}", r.cycles, r.expected));
    }
    out.artifacts.push(t.artifact("pflip.csv", prov)?);
    Ok(())
}

fn braid_demo(a: &BraidDemoArgs) -> Result<Outcome> {
    let device = load_device(&a.braid.params)?;
    let custom = load_schedule(&a.braid.schedule)?;
    let cfg = braid_config(&a.braid, device);
    let prov = Provenance::new("braid-demo", Some(a.counts.seed), &Hashed { args: a, inputs: (&cfg, &custom.as_ref().map(write_schedule).transpose()?) });
    let is_exchange = custom.is_none();
    let run = ex::run_braid_on(&cfg, custom)?;
    let h = &run.holonomy;
    let mut out = Outcome::default();
    out.line(format!(
        "device: E_J/E_C = {}, Δ_max = {:.6}, Δ_min/Δ_max = {:.3e}",
        num(run.device.island.ratio()),
        run.device.delta_max(),
        run.device.delta_ratio()
    ));
    out.line(format!("holonomy:\n{}", h.qubit_unitary));
    out.line(format!("distance to exchange gate = {:.3e}, leakage = {:.3e}, min gap = {:.4}", run.distance, h.leakage, h.min_gap));
    if let Some(d) = h.diabatic_error {
        out.line(format!("Wilson line vs time evolution: {d:.3e}"));
    }
    let mut summary = CsvTable::new(&["quantity", "value"]);
    for (k, v) in [
        ("ej_over_ec", run.device.island.ratio()),
        ("delta_max", run.device.delta_max()),
        ("delta_ratio", run.device.delta_ratio()),
        ("distance_to_exchange", run.distance),
        ("leakage", h.leakage),
        ("min_gap", h.min_gap),
        ("diabatic_error", h.diabatic_error.unwrap_or(f64::NAN)),
    ] {
        summary.push(vec![k.into(), num(v)]);
    }
    out.artifacts.push(holonomy_table(&h.qubit_unitary).artifact("holonomy.csv", &prov)?);
    out.artifacts.push(summary.artifact("braid_summary.csv", &prov)?);
    out.artifacts.push(schedule_artifact("schedule.txt", &run.program, &prov)?);
    out.require(h.leakage <= 1e-6, format!("leakage {:.3e} above 1e-6", h.leakage));
    if is_exchange {
        out.require(run.distance <= 1e-3, format!("holonomy off the exchange gate by {:.3e}", run.distance));
    }
    pflip_rows(&mut out, &h.qubit_unitary, &pflip_config(&a.counts), a.counts.seed, a.common.jobs, &prov)?;
    Ok(out)
}

fn pflip(a: &PflipArgs) -> Result<Outcome> {
    let device = load_device(&a.braid.params)?;
    let custom = load_schedule(&a.braid.schedule)?;
    let cfg = braid_config(&a.braid, device);
    let prov = Provenance::new("pflip", Some(a.counts.seed), &Hashed { args: a, inputs: (&cfg, &custom.as_ref().map(write_schedule).transpose()?) });
    let u = if a.ideal {
        UnitaryMatrix::new(ideal_braid_unitary()).map_err(|e| anyhow::anyhow!("{e}"))?
    } else {
        ex::run_braid_on(&cfg, custom)?.holonomy.qubit_unitary
    };
    let mut out = Outcome::default();
    pflip_rows(&mut out, &u, &pflip_config(&a.counts), a.counts.seed, a.common.jobs, &prov)?;
    Ok(out)
}

fn readout(a: &ReadoutArgs) -> Result<Outcome> {
    let cfg = ReadoutConfig {
        cavity_freq: a.cavity,
        detuning: a.detuning,
        coupling: a.coupling,
        delta_plus: a.delta_plus,
        delta_minus: a.delta_minus,
        kappa: a.kappa,
        lambda_plus: a.lambda_plus,
        lambda_minus: a.lambda_minus,
        t_m: a.t_m,
        shots: a.shots,
    };
    let prov = Provenance::new("readout", Some(a.seed), a);
    let r = ex::run_readout(&cfg, a.seed, a.common.jobs)?;
    let mut out = Outcome::default();
    let (lp, lm) = (r.model.lambda_plus, r.model.lambda_minus);
    out.line(format!("ω_+ = {}, ω_- = {}, dispersive = {}", num(r.omega_plus), num(r.omega_minus), r.dispersive));
    out.line(format!("shift: formula {:.6e}, exact {:.6e}", r.shift_formula, r.shift_exact));
    out.line(format!(
        "λ_+ = {lp}, λ_- = {lm}, x̄ = {:.4}: ε_om = {:.4e} (asymptotic {}), sampled {:.4e} ± {:.1e}",
        r.model.separation(),
        r.error.exact,
        r.error.asymptotic.map_or("n/a".into(), |x| format!("{x:.4e}")),
        r.sampled.estimate,
        r.sampled.std_error
    ));
    let t_m = a.t_m.map_or(String::new(), num);
    let mut samples = CsvTable::new(&["parity", "n_ph", "outcome", "lambda_plus", "lambda_minus", "t_m"]);
    for s in &r.samples {
        samples.push(vec![s.parity.to_string(), s.n_ph.to_string(), s.outcome.to_string(), num(lp), num(lm), t_m.clone()]);
    }
    let mut summary = CsvTable::new(&["quantity", "value"]);
    for (k, v) in [
        ("omega_plus", r.omega_plus),
        ("omega_minus", r.omega_minus),
        ("shift_formula", r.shift_formula),
        ("shift_exact", r.shift_exact),
        ("lambda_plus", lp),
        ("lambda_minus", lm),
        ("separation", r.model.separation()),
        ("error_exact", r.error.exact),
        ("error_asymptotic", r.error.asymptotic.unwrap_or(f64::NAN)),
        ("error_sampled", r.sampled.estimate),
        ("error_sampled_std", r.sampled.std_error),
    ] {
        summary.push(vec![k.into(), num(v)]);
    }
    let mut exact = Vec::new();
    let mut asym = Vec::new();
    for i in 0..=40 {
        let lm = 100.0 * (1.0 - 0.02 * f64::from(i)).powi(2);
        let m = PhotonCountModel::from_rates(100.0, lm.max(1e-9)).map_err(|e| anyhow::anyhow!("{e}"))?;
        let e = measurement_error(&m).map_err(|e| anyhow::anyhow!("{e}"))?;
        exact.push((m.separation(), e.exact));
        if let Some(x) = e.asymptotic.filter(|_| m.separation() > 0.3) {
            asym.push((m.separation(), x));
        }
    }
    let chart = LineChart {
        title: "Readout error versus separation".into(),
        x_label: "x̄".into(),
        y_label: "ε_om".into(),
        log_x: false,
        log_y: true,
        series: vec![Series { label: "½ erfc(x̄)".into(), points: exact }, Series { label: "asymptotic".into(), points: asym }],
    };
    out.artifacts.push(samples.artifact("readout_samples.csv", &prov)?);
    out.artifacts.push(summary.artifact("readout_summary.csv", &prov)?);
    out.artifacts.push(chart.artifact("readout_error.svg", &prov));
    let z = (r.sampled.estimate - r.error.exact).abs() / r.sampled.std_error.max(f64::MIN_POSITIVE);
    if r.error.gaussian_valid && r.sampled.trials >= 10_000 && r.sampled.successes > 0 {
        out.line(format!("sampled vs ½ erfc(x̄): {z:.2}σ"));
    }
    Ok(out)
}

fn mode(hardware: bool) -> ExecutionMode {
    if hardware {
        ExecutionMode::Hardware(IslandLayout::triangular_qubit(0.7))
    } else {
        ExecutionMode::Abstract
    }
}

fn signs(v: &[i8]) -> String {
    v.iter().map(|s| if *s > 0 { '+' } else { '-' }).collect()
}

fn cnot_verify(a: &CnotArgs) -> Result<Outcome> {
    let prov = Provenance::new("cnot-verify", None, a);
    let runs = ex::cnot_truth_table(&mode(a.hardware))?;
    let mut out = Outcome::default();
    let mut t = CsvTable::new(&["branch", "input", "outcomes", "branch_probability", "infidelity"]);
    let mut worst: f64 = 0.0;
    for r in &runs {
        let inf = 1.0 - r.fidelity;
        worst = worst.max(inf.abs());
        t.push(vec![signs(&r.branch), r.input.clone(), signs(&r.record.outcomes()), num(r.record.branch_probability()), num(inf)]);
    }
    out.line(format!("CNOT: {} runs over 8 branches, worst infidelity {worst:.3e}", runs.len()));
    out.require(worst <= 1e-10, format!("CNOT infidelity {worst:.3e} above 1e-10"));
    let mut bk = CsvTable::new(&["p1", "p2", "probability", "discrepancy"]);
    for b in ex::bk_branches()? {
        bk.push(vec![b.p1.to_string(), b.p2.to_string(), num(b.probability), b.discrepancy.map_or(String::new(), num)]);
        if let Some(d) = b.discrepancy {
            out.line(format!("BK branch ({:+}, {:+}): discrepancy {d:.3e}", b.p1, b.p2));
            out.require(d <= 1e-10, format!("BK discrepancy {d:.3e} on branch ({}, {})", b.p1, b.p2));
        } else {
            out.line(format!("BK branch ({:+}, {:+}): impossible", b.p1, b.p2));
        }
    }
    out.artifacts.push(t.artifact("cnot_truth_table.csv", &prov)?);
    out.artifacts.push(bk.artifact("bk_branches.csv", &prov)?);
    Ok(out)
}

fn cluster(a: &ClusterArgs) -> Result<Outcome> {
    let prov = Provenance::new("cluster", Some(a.seed), a);
    let cfg = ClusterConfig {
        rows: a.rows,
        cols: a.cols,
        hardware: a.hardware,
    };
    let r = ex::run_cluster(&cfg, a.seed)?;
    let mut out = Outcome::default();
    let mut t = CsvTable::new(&["site", "stabilizer", "expectation"]);
    for (i, (k, v)) in r.stabilizers.iter().enumerate() {
        t.push(vec![i.to_string(), k.clone(), num(*v)]);
        out.require((v - 1.0).abs() <= 1e-10, format!("K_{i} = {v}"));
    }
    out.line(format!(
        "{}×{} cluster: {} measurements, {} of {} stabilizers at +1",
        a.rows,
        a.cols,
        r.record.len(),
        r.stabilizers.iter().filter(|(_, v)| (v - 1.0).abs() <= 1e-10).count(),
        r.stabilizers.len()
    ));
    let rows: Vec<_> = r
        .record
        .entries
        .iter()
        .enumerate()
        .map(|(i, e)| crate::script::RecordRow {
            step: i + 1,
            operator: e.operator.clone(),
            outcome: e.outcome,
            probability: e.probability,
        })
        .collect();
    out.artifacts.push(record_table(&rows).artifact("cluster_record.csv", &prov)?);
    out.artifacts.push(t.artifact("cluster_stabilizers.csv", &prov)?);
    Ok(out)
}

fn log_grid(lo: f64, hi: f64, n: usize) -> Result<Vec<f64>> {
    if !(lo > 0.0 && hi >= lo && lo.is_finite() && hi.is_finite()) {
        bail!("grid bounds must satisfy 0 < min ≤ max, got [{lo}, {hi}]");
    }
    Ok(match n {
        0 => Vec::new(),
        1 => vec![lo],
        _ => (0..n).map(|i| lo * (hi / lo).powf(i as f64 / (n - 1) as f64)).collect(),
    })
}

/// Grid values that should be exact (1, 10, …) land on their rounded form.
fn snap(x: f64) -> f64 {
    let r = (x * 1e12).round() / 1e12;
    if (r - x).abs() <= 1e-12 * x.abs() {
        r
    } else {
        x
    }
}

fn thresholds(a: &ThresholdArgs) -> Result<Outcome> {
    let architectures = if a.arch.is_empty() {
        Architecture::ALL.to_vec()
    } else {
        a.arch
            .iter()
            .map(|s| Architecture::from_name(s).ok_or_else(|| anyhow::anyhow!("unknown architecture {s:?} (ramm, reference)")))
            .collect::<Result<Vec<_>>>()?
    };
    let cfg = ThresholdConfig {
        architectures,
        gate_ratios: log_grid(a.g_min, a.g_max, a.g_points)?.into_iter().map(snap).collect(),
        measurement_ratios: a.m_ratios.clone(),
        periods: a.periods.clone(),
        period_ratios: a.period_ratios.clone(),
        n0_ramm: a.n0_ramm,
        n0_reference: a.n0_reference,
    };
    let prov = Provenance::new("thresholds", None, &Hashed { args: a, inputs: &cfg });
    let sweep = ex::threshold_sweep(&cfg, a.common.jobs)?;
    let both = cfg.architectures.len() == 2;
    let mut out = Outcome::default();

    let mut head = vec!["arch", "eps_ratio_g", "eps_ratio_dm", "eps_ratio_om", "threshold", "n_star", "saturated"];
    if both {
        head.push("ratio");
    }
    let mut mem = CsvTable::new(&head);
    let ratios = sweep.memory_ratios();
    for p in &sweep.memory {
        let mut row = vec![
            p.architecture.name().into(),
            num(p.gate_ratio),
            num(p.measurement_ratio),
            num(p.measurement_ratio),
            num(p.threshold),
            p.n_star.to_string(),
            p.saturated.to_string(),
        ];
        if both {
            let r = ratios.iter().find(|r| r.0 == p.gate_ratio && r.1 == p.measurement_ratio).map(|r| r.2);
            row.push(r.map_or(String::new(), num));
        }
        mem.push(row);
    }
    let mut head = vec!["arch", "eps_ratio", "period_m", "threshold"];
    if both {
        head.push("ratio");
    }
    let mut comp = CsvTable::new(&head);
    let cratios = sweep.computation_ratios();
    for p in &sweep.computation {
        let mut row = vec![p.architecture.name().into(), num(p.ratio), p.period.to_string(), num(p.threshold)];
        if both {
            let r = cratios.iter().find(|r| r.0 == p.ratio && r.1 == p.period).map(|r| r.2);
            row.push(r.map_or(String::new(), num));
        }
        comp.push(row);
    }
    out.artifacts.push(mem.artifact("thresholds_memory.csv", &prov)?);
    out.artifacts.push(comp.artifact("thresholds_computation.csv", &prov)?);

    if both {
        let memory_chart = LineChart {
            title: "RAMM / reference memory threshold".into(),
            x_label: "ε_g/ε_st".into(),
            y_label: "threshold ratio".into(),
            log_x: true,
            log_y: false,
            series: cfg
                .measurement_ratios
                .iter()
                .map(|&m| Series {
                    label: format!("ε_dm/ε_st = ε_om/ε_st = {}", num(m)),
                    points: ratios.iter().filter(|r| r.1 == m).map(|r| (r.0, r.2)).collect(),
                })
                .collect(),
        };
        let period_chart = LineChart {
            title: "RAMM / reference computation threshold".into(),
            x_label: "M".into(),
            y_label: "threshold ratio".into(),
            log_x: true,
            log_y: false,
            series: cfg
                .period_ratios
                .iter()
                .map(|&r| Series {
                    label: format!("all ratios = {}", num(r)),
                    points: cratios.iter().filter(|c| c.0 == r).map(|c| (c.1 as f64, c.2)).collect(),
                })
                .collect(),
        };
        out.artifacts.push(memory_chart.artifact("threshold_ratio_memory.svg", &prov));
        if !cratios.is_empty() {
            out.artifacts.push(period_chart.artifact("threshold_ratio_computation.svg", &prov));
        }
        for (g, m) in [(1.0, 1.0), (10.0, 10.0)] {
            if let Some(r) = ratios.iter().find(|r| r.0 == g && r.1 == m) {
                out.line(format!("memory threshold ratio at ε_g/ε_st = {}, ε_m/ε_st = {}: {:.3}", num(g), num(m), r.2));
            }
        }
    } else {
        let arch = cfg.architectures[0];
        let chart = LineChart {
            title: format!("{} memory threshold", arch.name()),
            x_label: "ε_g/ε_st".into(),
            y_label: "ε_st threshold".into(),
            log_x: true,
            log_y: true,
            series: cfg
                .measurement_ratios
                .iter()
                .map(|&m| Series {
                    label: format!("ε_dm/ε_st = ε_om/ε_st = {}", num(m)),
                    points: sweep.memory.iter().filter(|p| p.measurement_ratio == m).map(|p| (p.gate_ratio, p.threshold)).collect(),
                })
                .collect(),
        };
        out.artifacts.push(chart.artifact("thresholds_memory.svg", &prov));
    }
    out.line(format!("{} memory and {} computation thresholds", sweep.memory.len(), sweep.computation.len()));
    Ok(out)
}

fn regime_check(a: &RegimeArgs) -> Result<Outcome> {
    let mut file: RegimeFile = match &a.params {
        Some(p) => load_json(p)?,
        None => RegimeFile::default(),
    };
    if let Some(t) = a.temperature {
        file.temperature = t;
    }
    let prov = Provenance::new("regime-check", None, &Hashed { args: a, inputs: &file });
    let report = ex::regime_report(&file.into())?;
    let mut out = Outcome::default();
    let mut t = CsvTable::new(&["inequality", "left", "relation", "right", "margin", "satisfied"]);
    for e in &report.entries {
        t.push(vec![e.name.clone(), num(e.left), e.relation.symbol().into(), num(e.right), num(e.margin()), e.satisfied.to_string()]);
        out.line(format!(
            "{:<24} {:>12.4e} {:<2} {:>12.4e}  {}",
            e.name,
            e.left,
            e.relation.symbol(),
            e.right,
            if e.satisfied { "ok" } else { "VIOLATED" }
        ));
        out.require(e.satisfied, format!("inequality {} violated", e.name));
    }
    out.artifacts.push(t.artifact("regime.csv", &prov)?);
    Ok(out)
}

fn coupling_sweep(a: &CouplingArgs) -> Result<Outcome> {
    let device = load_device(&a.params)?;
    let prov = Provenance::new("coupling-sweep", None, &Hashed { args: a, inputs: &device });
    let ratios: Vec<f64> = log_grid(a.min, a.max, a.points)?.into_iter().map(snap).collect();
    if ratios.is_empty() {
        bail!("empty E_J/E_C grid");
    }
    let (e_c, q) = device.as_ref().map_or((1.0, 0.0), |d| (d.e_c, d.q_offset));
    let points = ex::coulomb_sweep(&ratios, e_c, q, a.common.jobs)?;
    let mut out = Outcome::default();
    let mut t = CsvTable::new(&["ej_over_ec", "u_asymptotic", "u_exact", "exact_over_asymptotic"]);
    for p in &points {
        t.push(vec![num(p.ej_over_ec), num(p.asymptotic), num(p.exact), num(p.exact / p.asymptotic)]);
    }
    let chart = LineChart {
        title: "Coulomb coupling".into(),
        x_label: "E_J/E_C".into(),
        y_label: "U/E_C".into(),
        log_x: true,
        log_y: true,
        series: vec![
            Series { label: "exact".into(), points: points.iter().map(|p| (p.ej_over_ec, p.exact / e_c)).collect() },
            Series { label: "asymptotic".into(), points: points.iter().map(|p| (p.ej_over_ec, p.asymptotic / e_c)).collect() },
        ],
    };
    out.artifacts.push(t.artifact("coupling_sweep.csv", &prov)?);
    out.artifacts.push(chart.artifact("coupling_sweep.svg", &prov));
    out.line(format!("{} points over E_J/E_C ∈ [{}, {}]", points.len(), num(a.min), num(a.max)));
    if let Some(d) = device.filter(|d| !d.flux.is_empty()) {
        let (flux, u) = ex::island_couplings(&d)?;
        let c = ex::device_couplings(&d)?;
        let mut ct = CsvTable::new(&["coupling", "u", "delta"]);
        for ((l, u), delta) in c.labels.iter().zip(&c.u).zip(&c.delta) {
            ct.push(vec![format!("{}{}", l.0, l.1), num(*u), num(*delta)]);
            out.line(format!("Δ_{}{} = {:.6e} (U = {:.6e})", l.0, l.1, delta, u));
        }
        let residual = ex::microscopic_residual(&flux, &u, d.e_m)?;
        out.line(format!("microscopic vs effective spectrum at E_M = {}: {:.3e}", num(d.e_m), residual));
        out.artifacts.push(ct.artifact("device_couplings.csv", &prov)?);
    }
    Ok(out)
}

fn run_logic(a: &RunArgs) -> Result<Outcome> {
    let text = std::fs::read_to_string(&a.script).with_context(|| format!("reading {}", a.script.display()))?;
    let script = parse_script(&text).with_context(|| format!("parsing {}", a.script.display()))?;
    let prov = Provenance::new("run", Some(a.seed), &Hashed { args: a, inputs: &text });
    let mut rng = ex::stream_rng(a.seed, 0);
    let run = run_script(&script, mode(a.hardware), &mut rng)?;
    let state = run.register.logical_state().map_err(|e| anyhow::anyhow!("{e}"))?;
    let mut st = CsvTable::new(&["basis", "re", "im"]);
    for (i, z) in state.iter().enumerate() {
        st.push(vec![format!("{i:0width$b}", width = script.n_qubits), num(z.re), num(z.im)]);
    }
    let mut out = Outcome::default();
    out.line(format!("{} ops, {} measurements", script.ops.len(), run.rows.len()));
    out.artifacts.push(record_table(&run.rows).artifact("record.csv", &prov)?);
    out.artifacts.push(st.artifact("state.csv", &prov)?);
    Ok(out)
}

fn verify(a: &VerifyArgs) -> Result<Outcome> {
    let ctx = CheckContext {
        seed: a.seed,
        jobs: a.jobs,
        inject_fault: a.inject_fault,
    };
    let selected: Vec<_> = checks::registry()
        .into_iter()
        .filter(|c| a.filter.as_deref().map_or(true, |f| c.module == f || c.id == f))
        .collect();
    if selected.is_empty() {
        bail!("no check matches filter {:?}", a.filter.as_deref().unwrap_or(""));
    }
    let mut out = Outcome::default();
    for c in &selected {
        let r = checks::run_check(c, &ctx);
        out.line(format!(
            "{} {:<4} [{}] {}: {} ({:.1} s)",
            if r.passed { "PASS" } else { "FAIL" },
            c.id,
            c.module,
            c.description,
            r.detail,
            r.seconds
        ));
        out.require(r.passed, format!("check {} ({})", c.id, c.description));
    }
    Ok(out)
}
