//! Plain-text circuit scripts for the logical register.
//!
//! One op per line; keywords are case-insensitive, `#` starts a comment:
//!
//! ```text
//! QUBITS 3
//! PREPARE 0 +            # 0, 1, +, -, +i, -i or A (magic state)
//! BRAID 1 x +1           # exp(-iπ/4 · sign · σ_x) on qubit 1
//! PAULI 2 z
//! MEASURE q0:AB q1:BC    # joint parity Π iγ_Xγ_Y
//! CNOT 0 1 2             # control, target, ancilla
//! TELEPORT 0 1 2         # source, Bell pair
//! TGATE 0 1              # data, ancilla in |A⟩
//! CLUSTER 2 2            # rows, cols over qubits 0 … rows·cols-1
//! ```

use anyhow::{anyhow, bail, Context, Result};
use majorana_core::device::MajoranaLabel;
use majorana_core::logic::{
    cnot, magic_state, prepare_cluster_state, t_gate_injection, teleport, Axis, ExecutionMode, LogicalRegister,
    OutcomeSource, ParitySpec,
};
use majorana_core::C64;

use crate::output::{num, CsvTable};

#[derive(Debug, Clone, PartialEq)]
pub enum ScriptOp {
    Prepare { qubit: usize, state: [C64; 2] },
    Braid { qubit: usize, axis: Axis, sign: i8 },
    Pauli { qubit: usize, axis: Axis },
    Measure(ParitySpec),
    Cnot { control: usize, target: usize, ancilla: usize },
    Teleport { source: usize, bell_a: usize, bell_b: usize },
    TGate { data: usize, ancilla: usize },
    Cluster { rows: usize, cols: usize },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Script {
    pub n_qubits: usize,
    /// Ops with their 1-based source line.
    pub ops: Vec<(usize, ScriptOp)>,
}

fn named_state(name: &str) -> Option<[C64; 2]> {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let r = |x: f64| C64::new(x, 0.0);
    Some(match name.to_ascii_lowercase().as_str() {
        "0" => [r(1.0), r(0.0)],
        "1" => [r(0.0), r(1.0)],
        "+" => [r(s), r(s)],
        "-" => [r(s), r(-s)],
        "+i" => [r(s), C64::new(0.0, s)],
        "-i" => [r(s), C64::new(0.0, -s)],
        "a" => magic_state(),
        _ => return None,
    })
}

fn axis(tok: &str) -> Result<Axis> {
    let mut chars = tok.chars();
    match (chars.next().and_then(Axis::from_char), chars.next()) {
        (Some(a), None) => Ok(a),
        _ => bail!("{tok:?} is not an axis (x, y or z)"),
    }
}

fn sign(tok: &str) -> Result<i8> {
    match tok {
        "+" | "+1" | "1" => Ok(1),
        "-" | "-1" => Ok(-1),
        _ => bail!("{tok:?} is not a sign (+1 or -1)"),
    }
}

fn index(tok: &str) -> Result<usize> {
    tok.parse().map_err(|_| anyhow!("{tok:?} is not a qubit index"))
}

/// Parses `q<n>:<X><Y>` tokens, e.g. `q0:AB q2:BC`.
pub fn parse_parity(tokens: &[&str]) -> Result<ParitySpec> {
    let mut parts = Vec::with_capacity(tokens.len());
    for tok in tokens {
        let (q, pair) = tok
            .strip_prefix(['q', 'Q'])
            .and_then(|t| t.split_once(':'))
            .ok_or_else(|| anyhow!("{tok:?} is not of the form q<n>:<XY>"))?;
        let labels: Vec<MajoranaLabel> = pair.chars().map(MajoranaLabel::from_char).collect::<Option<_>>().ok_or_else(|| anyhow!("{tok:?}: unknown Majorana label"))?;
        let [x, y] = labels[..] else {
            bail!("{tok:?}: a parity factor names exactly two Majoranas");
        };
        parts.push((index(q)?, x, y));
    }
    ParitySpec::new(parts).map_err(|e| anyhow!("{e}"))
}

fn expect_args(toks: &[&str], n: usize) -> Result<()> {
    if toks.len() != n + 1 {
        bail!("{} takes {n} argument(s), found {}", toks[0], toks.len() - 1);
    }
    Ok(())
}

fn parse_op(toks: &[&str]) -> Result<ScriptOp> {
    let kw = toks[0].to_ascii_uppercase();
    Ok(match kw.as_str() {
        "PREPARE" => {
            expect_args(toks, 2)?;
            let state = named_state(toks[2]).ok_or_else(|| anyhow!("unknown state {:?}", toks[2]))?;
            ScriptOp::Prepare { qubit: index(toks[1])?, state }
        }
        "BRAID" => {
            expect_args(toks, 3)?;
            ScriptOp::Braid { qubit: index(toks[1])?, axis: axis(toks[2])?, sign: sign(toks[3])? }
        }
        "PAULI" => {
            expect_args(toks, 2)?;
            ScriptOp::Pauli { qubit: index(toks[1])?, axis: axis(toks[2])? }
        }
        "MEASURE" => {
            if toks.len() < 2 {
                bail!("MEASURE needs at least one factor");
            }
            ScriptOp::Measure(parse_parity(&toks[1..])?)
        }
        "CNOT" => {
            expect_args(toks, 3)?;
            ScriptOp::Cnot { control: index(toks[1])?, target: index(toks[2])?, ancilla: index(toks[3])? }
        }
        "TELEPORT" => {
            expect_args(toks, 3)?;
            ScriptOp::Teleport { source: index(toks[1])?, bell_a: index(toks[2])?, bell_b: index(toks[3])? }
        }
        "TGATE" => {
            expect_args(toks, 2)?;
            ScriptOp::TGate { data: index(toks[1])?, ancilla: index(toks[2])? }
        }
        "CLUSTER" => {
            expect_args(toks, 2)?;
            ScriptOp::Cluster { rows: index(toks[1])?, cols: index(toks[2])? }
        }
        other => bail!("unknown op {other}"),
    })
}

impl ScriptOp {
    fn qubits(&self) -> Vec<usize> {
        match self {
            ScriptOp::Prepare { qubit, .. } | ScriptOp::Braid { qubit, .. } | ScriptOp::Pauli { qubit, .. } => vec![*qubit],
            ScriptOp::Measure(spec) => spec.parts().iter().map(|p| p.0).collect(),
            ScriptOp::Cnot { control, target, ancilla } => vec![*control, *target, *ancilla],
            ScriptOp::Teleport { source, bell_a, bell_b } => vec![*source, *bell_a, *bell_b],
            ScriptOp::TGate { data, ancilla } => vec![*data, *ancilla],
            ScriptOp::Cluster { rows, cols } => (0..rows * cols).collect(),
        }
    }
}

pub fn parse_script(text: &str) -> Result<Script> {
    let mut n_qubits = None;
    let mut ops = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let toks: Vec<&str> = content.split_whitespace().collect();
        if toks[0].eq_ignore_ascii_case("QUBITS") {
            if n_qubits.is_some() || !ops.is_empty() {
                bail!("line {line}: QUBITS must appear once, before any op");
            }
            expect_args(&toks, 1).with_context(|| format!("line {line}"))?;
            n_qubits = Some(index(toks[1]).with_context(|| format!("line {line}"))?);
            continue;
        }
        let n = n_qubits.ok_or_else(|| anyhow!("line {line}: QUBITS must come first"))?;
        let op = parse_op(&toks).with_context(|| format!("line {line}"))?;
        if let Some(q) = op.qubits().into_iter().find(|&q| q >= n) {
            bail!("line {line}: qubit {q} outside a {n}-qubit register");
        }
        ops.push((line, op));
    }
    let n_qubits = n_qubits.ok_or_else(|| anyhow!("script declares no QUBITS"))?;
    Ok(Script { n_qubits, ops })
}

/// One measurement of a script run.
#[derive(Debug, Clone, PartialEq)]
pub struct RecordRow {
    /// 1-based index of the op that made the measurement.
    pub step: usize,
    pub operator: String,
    pub outcome: i8,
    pub probability: f64,
}

pub struct ScriptRun {
    pub register: LogicalRegister,
    pub rows: Vec<RecordRow>,
}

pub fn run_script(script: &Script, mode: ExecutionMode, source: &mut dyn OutcomeSource) -> Result<ScriptRun> {
    let mut reg = LogicalRegister::new(script.n_qubits).map_err(|e| anyhow!("{e}"))?.with_mode(mode);
    let mut rows = Vec::new();
    for (k, (line, op)) in script.ops.iter().enumerate() {
        let before = reg.record().len();
        apply(&mut reg, op, source).map_err(|e| anyhow!("line {line}: {e}"))?;
        for e in &reg.record().entries[before..] {
            rows.push(RecordRow {
                step: k + 1,
                operator: e.operator.clone(),
                outcome: e.outcome,
                probability: e.probability,
            });
        }
    }
    Ok(ScriptRun { register: reg, rows })
}

fn apply(reg: &mut LogicalRegister, op: &ScriptOp, source: &mut dyn OutcomeSource) -> majorana_core::Result<()> {
    match op {
        ScriptOp::Prepare { qubit, state } => reg.prepare_qubit(*qubit, *state, source),
        ScriptOp::Braid { qubit, axis, sign } => reg.braid_gate(*qubit, *axis, *sign),
        ScriptOp::Pauli { qubit, axis } => reg.apply_pauli(*qubit, *axis),
        ScriptOp::Measure(spec) => reg.measure_parity(spec, source).map(|_| ()),
        ScriptOp::Cnot { control, target, ancilla } => cnot(reg, *control, *target, *ancilla, source).map(|_| ()),
        ScriptOp::Teleport { source: s, bell_a, bell_b } => teleport(reg, *s, *bell_a, *bell_b, source).map(|_| ()),
        ScriptOp::TGate { data, ancilla } => t_gate_injection(reg, *data, *ancilla, source).map(|_| ()),
        ScriptOp::Cluster { rows, cols } => prepare_cluster_state(reg, *rows, *cols, source).map(|_| ()),
    }
}

/// `step, operator, outcome, probability`.
pub fn record_table(rows: &[RecordRow]) -> CsvTable {
    let mut t = CsvTable::new(&["step", "operator", "outcome", "probability"]);
    for r in rows {
        t.push(vec![r.step.to_string(), r.operator.clone(), r.outcome.to_string(), num(r.probability)]);
    }
    t
}
