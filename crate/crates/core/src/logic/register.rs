use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use rand::{Rng, RngCore};

use crate::algebra::MajoranaSet;
use crate::braid::{compile_schedule, IslandLayout, MoveOp, RegisterLayout};
use crate::device::MajoranaLabel;
use crate::error::{bail, Error, Result};
use crate::linalg::{self, CMat, CVec, C64, ONE, ZERO};

/// Outcome probabilities below this count as impossible branches.
pub const IMPOSSIBLE_BRANCH: f64 = 1e-12;

/// Single-qubit Pauli axis, with σ_x = iγ_Bγ_C, σ_y = iγ_Aγ_C, σ_z = iγ_Aγ_B.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Axis {
    X,
    Y,
    Z,
}

impl Axis {
    pub const ALL: [Axis; 3] = [Axis::X, Axis::Y, Axis::Z];

    pub fn pair(self) -> (MajoranaLabel, MajoranaLabel) {
        use MajoranaLabel::*;
        match self {
            Axis::X => (B, C),
            Axis::Y => (A, C),
            Axis::Z => (A, B),
        }
    }

    pub fn from_char(c: char) -> Option<Self> {
        match c.to_ascii_lowercase() {
            'x' => Some(Axis::X),
            'y' => Some(Axis::Y),
            'z' => Some(Axis::Z),
            _ => None,
        }
    }

    pub fn as_char(self) -> char {
        match self {
            Axis::X => 'x',
            Axis::Y => 'y',
            Axis::Z => 'z',
        }
    }
}

impl fmt::Display for Axis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.as_char())
    }
}

/// Source of ±1 measurement outcomes: Born-rule sampling or a forced (replayed) sequence.
pub trait OutcomeSource {
    /// Picks an outcome given the probability of +1.
    fn choose(&mut self, p_plus: f64) -> Result<i8>;
}

impl<R: RngCore> OutcomeSource for R {
    fn choose(&mut self, p_plus: f64) -> Result<i8> {
        Ok(if self.random::<f64>() < p_plus { 1 } else { -1 })
    }
}

/// Replays a fixed list of outcomes; choosing an impossible branch is a replay error.
#[derive(Debug, Clone)]
pub struct ForcedOutcomes {
    outcomes: Vec<i8>,
    next: usize,
}

impl ForcedOutcomes {
    pub fn new(outcomes: Vec<i8>) -> Self {
        Self { outcomes, next: 0 }
    }

    /// All 2^k sign patterns of length k, first entry most significant, + before -.
    pub fn all_branches(k: usize) -> Vec<Vec<i8>> {
        (0..1usize << k)
            .map(|m| (0..k).map(|i| if m >> (k - 1 - i) & 1 == 1 { -1 } else { 1 }).collect())
            .collect()
    }

    pub fn consumed(&self) -> usize {
        self.next
    }
}

impl OutcomeSource for ForcedOutcomes {
    fn choose(&mut self, p_plus: f64) -> Result<i8> {
        let Some(&o) = self.outcomes.get(self.next) else {
            bail!(Replay, "forced outcome list exhausted after {} draws", self.next);
        };
        let p = if o == 1 { p_plus } else { 1.0 - p_plus };
        if o != 1 && o != -1 {
            bail!(Replay, "outcome #{} is {o}, not ±1", self.next);
        }
        if p < IMPOSSIBLE_BRANCH {
            bail!(Replay, "outcome #{} = {o:+} has probability {p:.3e}", self.next);
        }
        self.next += 1;
        Ok(o)
    }
}

/// Joint parity i^N Π γ_{n,X} γ_{n,Y} over (qubit, X, Y) pairs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParitySpec {
    parts: Vec<(usize, MajoranaLabel, MajoranaLabel)>,
}

impl ParitySpec {
    pub fn new(parts: Vec<(usize, MajoranaLabel, MajoranaLabel)>) -> Result<Self> {
        if parts.is_empty() {
            bail!(Argument, "parity spec is empty");
        }
        for (i, &(q, x, y)) in parts.iter().enumerate() {
            if x == MajoranaLabel::D || y == MajoranaLabel::D {
                bail!(Argument, "γ_D of qubit {q} is not measurable");
            }
            if x == y {
                bail!(Argument, "pair {x}{y} of qubit {q} repeats a Majorana");
            }
            for &(q2, x2, y2) in &parts[..i] {
                if q2 == q && [x2, y2].iter().any(|m| *m == x || *m == y) {
                    bail!(Argument, "pairs of qubit {q} overlap");
                }
            }
        }
        Ok(Self { parts })
    }

    /// Product of single-qubit Paulis.
    pub fn pauli(factors: &[(usize, Axis)]) -> Result<Self> {
        Self::new(factors.iter().map(|&(q, a)| (q, a.pair().0, a.pair().1)).collect())
    }

    pub fn parts(&self) -> &[(usize, MajoranaLabel, MajoranaLabel)] {
        &self.parts
    }

    pub fn max_qubit(&self) -> usize {
        self.parts.iter().map(|p| p.0).max().unwrap_or(0)
    }
}

impl fmt::Display for ParitySpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, (q, x, y)) in self.parts.iter().enumerate() {
            if i > 0 {
                write!(f, " ")?;
            }
            write!(f, "q{q}:{x}{y}")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MeasurementEntry {
    pub operator: String,
    pub outcome: i8,
    /// Probability of the obtained outcome before the measurement.
    pub probability: f64,
}

/// Ordered log of projective measurements.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct MeasurementRecord {
    pub entries: Vec<MeasurementEntry>,
}

impl MeasurementRecord {
    pub fn outcomes(&self) -> Vec<i8> {
        self.entries.iter().map(|e| e.outcome).collect()
    }

    /// Product of the recorded outcome probabilities.
    pub fn branch_probability(&self) -> f64 {
        self.entries.iter().map(|e| e.probability).product()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

/// How measurements and braids are checked against the hardware.
#[derive(Debug, Clone, PartialEq)]
pub enum ExecutionMode {
    /// Operators act directly on the state.
    Abstract,
    /// Every measurement and braid is first lowered to Majorana moves on this qubit layout;
    /// infeasible operations are compile errors.
    Hardware(IslandLayout),
}

/// Matrices of iγ_Xγ_Y on the local basis of one qubit.
#[derive(Debug, Clone)]
struct LocalAlgebra {
    bilinears: [[CMat; 6]; 6],
}

impl LocalAlgebra {
    /// Local basis: |0⟩, |1⟩ with iγ_Eγ_F = +1, then the same two states with the ancilla pair
    /// flipped by γ_Dγ_E. |0⟩ has no fermion in (γ_A, γ_B) and one in (γ_C, γ_D); |1⟩ = σ_x|0⟩.
    fn new() -> Result<Self> {
        let set = MajoranaSet::new(6)?;
        let vac = set.vacuum();
        let zero = set.creation(1) * &vac;
        let sx = set.bilinear(1, 2);
        let one = &sx * &zero;
        let flip = set.product(&[3, 4]);
        let basis = CMat::from_columns(&[zero.clone(), one.clone(), &flip * &zero, &flip * &one]);
        let local = |a: usize, b: usize| basis.adjoint() * set.bilinear(a, b) * &basis;
        let bilinears = core::array::from_fn(|a| core::array::from_fn(|b| if a == b { linalg::identity(4) } else { local(a, b) }));
        Ok(Self { bilinears })
    }

    fn pair(&self, x: MajoranaLabel, y: MajoranaLabel) -> &CMat {
        &self.bilinears[x.index()][y.index()]
    }
}

/// N topological qubits, each with Majoranas γ_{n,A} … γ_{n,F}, in a fixed total-parity sector.
///
/// Every operator the register applies is an even product of Majoranas of single qubits, so the
/// state is stored exactly in the product of per-qubit odd-parity sectors: four states per
/// qubit, the logical qubit times the ancilla parity iγ_Eγ_F. Qubit 0 is most significant.
#[derive(Debug, Clone)]
pub struct LogicalRegister {
    n_qubits: usize,
    state: CVec,
    algebra: LocalAlgebra,
    record: MeasurementRecord,
    mode: ExecutionMode,
}

/// Largest register accepted (4^12 amplitudes).
pub const MAX_QUBITS: usize = 12;

impl LogicalRegister {
    /// All qubits in |0⟩ with ancilla parity +1.
    pub fn new(n_qubits: usize) -> Result<Self> {
        if n_qubits == 0 || n_qubits > MAX_QUBITS {
            bail!(Argument, "register size {n_qubits} outside 1..={MAX_QUBITS}");
        }
        let mut state = CVec::zeros(1 << (2 * n_qubits));
        state[0] = ONE;
        Ok(Self {
            n_qubits,
            state,
            algebra: LocalAlgebra::new()?,
            record: MeasurementRecord::default(),
            mode: ExecutionMode::Abstract,
        })
    }

    /// Register whose logical qubits hold `amplitudes` (2^N entries, qubit 0 most significant),
    /// with every ancilla parity +1.
    pub fn from_logical(n_qubits: usize, amplitudes: &CVec) -> Result<Self> {
        let mut reg = Self::new(n_qubits)?;
        if amplitudes.len() != 1 << n_qubits {
            bail!(Argument, "need {} amplitudes, got {}", 1usize << n_qubits, amplitudes.len());
        }
        let norm = linalg::vec_norm(amplitudes);
        if (norm - 1.0).abs() > 1e-10 {
            bail!(Argument, "logical state has norm {norm}");
        }
        reg.state.fill(ZERO);
        for (k, &a) in amplitudes.iter().enumerate() {
            reg.state[embed_index(k, n_qubits)] = a;
        }
        Ok(reg)
    }

    pub fn with_mode(mut self, mode: ExecutionMode) -> Self {
        self.mode = mode;
        self
    }

    pub fn mode(&self) -> &ExecutionMode {
        &self.mode
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        self.state.len()
    }

    pub fn state(&self) -> &CVec {
        &self.state
    }

    pub fn record(&self) -> &MeasurementRecord {
        &self.record
    }

    pub fn take_record(&mut self) -> MeasurementRecord {
        core::mem::take(&mut self.record)
    }

    fn check_qubit(&self, q: usize) -> Result<()> {
        if q >= self.n_qubits {
            bail!(Argument, "qubit {q} out of range for a {}-qubit register", self.n_qubits);
        }
        Ok(())
    }

    fn apply_local_to(&self, v: &mut CVec, q: usize, m: &CMat) {
        let inner = 1usize << (2 * (self.n_qubits - 1 - q));
        let outer = v.len() / (4 * inner);
        let mut buf = [ZERO; 4];
        for o in 0..outer {
            for i in 0..inner {
                let base = o * 4 * inner + i;
                for (k, b) in buf.iter_mut().enumerate() {
                    *b = v[base + k * inner];
                }
                for r in 0..4 {
                    v[base + r * inner] = (0..4).map(|c| m[(r, c)] * buf[c]).sum();
                }
            }
        }
    }

    fn local_operator(&self, x: MajoranaLabel, y: MajoranaLabel) -> &CMat {
        self.algebra.pair(x, y)
    }

    /// P|v⟩ for the joint parity P of `spec`.
    fn apply_parity_to(&self, v: &mut CVec, spec: &ParitySpec) {
        for &(q, x, y) in spec.parts().iter().rev() {
            let m = self.local_operator(x, y).clone();
            self.apply_local_to(v, q, &m);
        }
    }

    fn check_spec(&self, spec: &ParitySpec) -> Result<()> {
        self.check_qubit(spec.max_qubit())
    }

    /// ⟨P⟩ for the joint parity of `spec`.
    pub fn expectation(&self, spec: &ParitySpec) -> Result<f64> {
        self.check_spec(spec)?;
        let mut pv = self.state.clone();
        self.apply_parity_to(&mut pv, spec);
        Ok(linalg::inner(&self.state, &pv).re)
    }

    /// ⟨iγ_Eγ_F⟩ of every qubit.
    pub fn ancilla_parities(&self) -> Vec<f64> {
        use MajoranaLabel::{E, F};
        (0..self.n_qubits)
            .map(|q| self.expectation(&ParitySpec { parts: vec![(q, E, F)] }).unwrap_or(f64::NAN))
            .collect()
    }

    fn check_hardware(&self, op: MoveOp) -> Result<()> {
        if let ExecutionMode::Hardware(layout) = &self.mode {
            let reg = RegisterLayout::new(layout.clone(), self.n_qubits);
            compile_schedule(&[op], &reg, 1.0)?;
        }
        Ok(())
    }

    /// Projective measurement of the joint parity of `spec`; returns the outcome ±1.
    pub fn measure_parity(&mut self, spec: &ParitySpec, source: &mut dyn OutcomeSource) -> Result<i8> {
        self.check_spec(spec)?;
        self.check_hardware(MoveOp::Measure { parts: spec.parts().to_vec() })?;
        let mut pv = self.state.clone();
        self.apply_parity_to(&mut pv, spec);
        let mean = linalg::inner(&self.state, &pv).re;
        let p_plus = (0.5 * (1.0 + mean)).clamp(0.0, 1.0);
        let outcome = source.choose(p_plus)?;
        let p = if outcome == 1 { p_plus } else { 1.0 - p_plus };
        let projected = (&self.state + pv * C64::new(outcome as f64, 0.0)) * C64::new(0.5, 0.0);
        let norm = linalg::vec_norm(&projected);
        if norm < 1e-300 {
            bail!(Replay, "outcome {outcome:+} of {spec} has zero probability");
        }
        self.state = projected / C64::new(norm, 0.0);
        self.record.entries.push(MeasurementEntry {
            operator: format!("{spec}"),
            outcome,
            probability: p,
        });
        Ok(outcome)
    }

    /// Measures a product of single-qubit Paulis.
    pub fn measure_pauli(&mut self, factors: &[(usize, Axis)], source: &mut dyn OutcomeSource) -> Result<i8> {
        self.measure_parity(&ParitySpec::pauli(factors)?, source)
    }

    /// exp(iθσ_axis) on qubit `q`.
    pub fn rotate(&mut self, q: usize, axis: Axis, theta: f64) -> Result<()> {
        self.check_qubit(q)?;
        let (x, y) = axis.pair();
        let u = linalg::exp_involution(self.local_operator(x, y), theta);
        let mut v = core::mem::replace(&mut self.state, CVec::zeros(0));
        self.apply_local_to(&mut v, q, &u);
        self.state = v;
        Ok(())
    }

    /// σ_axis on qubit `q`.
    pub fn apply_pauli(&mut self, q: usize, axis: Axis) -> Result<()> {
        self.check_qubit(q)?;
        let (x, y) = axis.pair();
        let m = self.local_operator(x, y).clone();
        let mut v = core::mem::replace(&mut self.state, CVec::zeros(0));
        self.apply_local_to(&mut v, q, &m);
        self.state = v;
        Ok(())
    }

    /// One exchange: exp(-iπ/4 σ_axis) for chirality +1, exp(+iπ/4 σ_axis) for -1. U_y is
    /// realized as U_x† U_z U_x.
    pub fn braid_gate(&mut self, q: usize, axis: Axis, chirality: i8) -> Result<()> {
        self.check_qubit(q)?;
        if chirality != 1 && chirality != -1 {
            bail!(Argument, "chirality must be ±1, got {chirality}");
        }
        if self.ancilla_parities()[q] < 1.0 - 1e-9 {
            bail!(Consistency, "ancilla pair of qubit {q} is not at parity +1");
        }
        use MajoranaLabel::*;
        let exchange = |first, second| MoveOp::Exchange { qubit: q, first, second };
        match axis {
            Axis::Z => self.check_hardware(exchange(A, B))?,
            Axis::X => self.check_hardware(exchange(B, C))?,
            Axis::Y => {
                self.check_hardware(exchange(B, C))?;
                self.check_hardware(exchange(A, B))?;
            }
        }
        self.rotate(q, axis, -core::f64::consts::FRAC_PI_4 * chirality as f64)
    }

    /// exp(i k π/4 σ_axis) as |k| braids.
    pub fn quarter_turns(&mut self, q: usize, axis: Axis, k: i32) -> Result<()> {
        let chirality = if k > 0 { -1 } else { 1 };
        for _ in 0..k.unsigned_abs() {
            self.braid_gate(q, axis, chirality)?;
        }
        Ok(())
    }

    /// Projects qubit `q` onto σ_z = +1 by measurement and correction, then rotates it to the
    /// state with amplitudes `amplitudes`, supplied externally (e.g. a distilled magic state).
    pub fn prepare_qubit(&mut self, q: usize, amplitudes: [C64; 2], source: &mut dyn OutcomeSource) -> Result<()> {
        let norm = libm::sqrt(amplitudes[0].norm_sqr() + amplitudes[1].norm_sqr());
        if (norm - 1.0).abs() > 1e-10 {
            bail!(Argument, "qubit state has norm {norm}");
        }
        let p = self.measure_pauli(&[(q, Axis::Z)], source)?;
        self.quarter_turns(q, Axis::X, (1 - p) as i32)?;
        let [a, b] = amplitudes;
        let v = linalg::from_rows(&[&[a, -b.conj()], &[b, a.conj()]]);
        let mut local = linalg::identity(4);
        local.view_mut((0, 0), (2, 2)).copy_from(&v);
        local.view_mut((2, 2), (2, 2)).copy_from(&v);
        let mut s = core::mem::replace(&mut self.state, CVec::zeros(0));
        self.apply_local_to(&mut s, q, &local);
        self.state = s;
        Ok(())
    }

    /// Logical amplitudes (2^N entries); fails if any ancilla pair carries weight at parity -1.
    pub fn logical_state(&self) -> Result<CVec> {
        let n = self.n_qubits;
        let v = CVec::from_iterator(1 << n, (0..1usize << n).map(|k| self.state[embed_index(k, n)]));
        let lost = 1.0 - v.iter().map(|z| z.norm_sqr()).sum::<f64>();
        if lost > 1e-10 {
            return Err(Error::Consistency(format!("weight {lost:.3e} outside the ancilla-parity +1 subspace")));
        }
        Ok(v)
    }

    /// Reduced density matrix of the logical qubits `keep` (in the given order).
    pub fn reduced_density(&self, keep: &[usize]) -> Result<CMat> {
        for &q in keep {
            self.check_qubit(q)?;
        }
        let n = self.n_qubits;
        let psi = self.logical_state()?;
        let rest: Vec<usize> = (0..n).filter(|q| !keep.contains(q)).collect();
        let k = keep.len();
        let bit = |idx: usize, q: usize| (idx >> (n - 1 - q)) & 1;
        let mut rho = CMat::zeros(1 << k, 1 << k);
        for idx in 0..1usize << n {
            let a = psi[idx];
            if a == ZERO {
                continue;
            }
            let r: usize = keep.iter().fold(0, |acc, &q| acc << 1 | bit(idx, q));
            for jdx in 0..1usize << n {
                if rest.iter().any(|&q| bit(idx, q) != bit(jdx, q)) {
                    continue;
                }
                let c: usize = keep.iter().fold(0, |acc, &q| acc << 1 | bit(jdx, q));
                rho[(r, c)] += a * psi[jdx].conj();
            }
        }
        Ok(rho)
    }

    /// Dense σ_x, σ_y, σ_z of qubit `q` on the register space (at most 6 qubits).
    pub fn pauli_operators(&self, q: usize) -> Result<[CMat; 3]> {
        self.check_qubit(q)?;
        if self.n_qubits > 6 {
            bail!(Argument, "dense operators limited to 6 qubits");
        }
        Ok(Axis::ALL.map(|a| {
            let (x, y) = a.pair();
            self.dense_local(q, self.local_operator(x, y))
        }))
    }

    /// Dense joint parity operator of `spec` (at most 6 qubits).
    pub fn parity_operator(&self, spec: &ParitySpec) -> Result<CMat> {
        self.check_spec(spec)?;
        if self.n_qubits > 6 {
            bail!(Argument, "dense operators limited to 6 qubits");
        }
        let mut m = linalg::identity(self.dim());
        for &(q, x, y) in spec.parts() {
            m = self.dense_local(q, self.local_operator(x, y)) * m;
        }
        Ok(m)
    }

    fn dense_local(&self, q: usize, local: &CMat) -> CMat {
        let left = linalg::identity(1 << (2 * q));
        let right = linalg::identity(1 << (2 * (self.n_qubits - 1 - q)));
        linalg::kron(&linalg::kron(&left, local), &right)
    }
}

/// Register index of logical basis state `k` with all ancilla parities +1.
fn embed_index(k: usize, n: usize) -> usize {
    (0..n).fold(0, |acc, q| acc << 2 | ((k >> (n - 1 - q)) & 1))
}

/// A random pure state on `n` logical qubits.
pub fn random_logical_state<R: Rng + ?Sized>(n: usize, rng: &mut R) -> CVec {
    use rand_distr::{Distribution, StandardNormal};
    let v = CVec::from_iterator(
        1 << n,
        (0..1usize << n).map(|_| {
            let re: f64 = StandardNormal.sample(rng);
            let im: f64 = StandardNormal.sample(rng);
            C64::new(re, im)
        }),
    );
    let norm = linalg::vec_norm(&v);
    v / C64::new(norm, 0.0)
}
