use alloc::collections::{BTreeMap, VecDeque};
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::FRAC_PI_2;

use super::schedule::{FluxSchedule, Ramp};
use crate::device::{ramm_phases, MajoranaLabel, PiPhases};
use crate::error::{Error, Result};

/// Which phase formulas govern a layout's couplings.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LayoutKind {
    /// The π-shaped demonstration circuit (one qubit, fluxes x_1 … x_3).
    Pi,
    /// The triangular-loop RAMM qubit (fluxes x_{n,1} … x_{n,5} per qubit).
    Triangle,
}

/// A flux-tunable coupling between two Majorana sites of one qubit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Edge {
    pub a: usize,
    pub b: usize,
    /// Index into the qubit's own flux block.
    pub flux: usize,
    /// Sign of the flux that switches the coupling on.
    pub sign: f64,
}

/// Majorana sites of one qubit and the couplings between them.
///
/// Sites are named after the Majorana that occupies them at rest.
#[derive(Debug, Clone, PartialEq)]
pub struct IslandLayout {
    pub kind: LayoutKind,
    pub edges: Vec<Edge>,
    /// Sites whose joint parity the readout measures.
    pub measure: (usize, usize),
    /// Strongly coupled ancilla edge at rest, as (junction site, partner site).
    pub rest: (usize, usize),
    pub fluxes_per_qubit: usize,
    /// Largest flux magnitude used by the compiler.
    pub x_max: f64,
}

fn site(l: MajoranaLabel) -> usize {
    l.index()
}

impl IslandLayout {
    /// The π-circuit: Δ_1 couples (B,E), Δ_2 couples (E,F), Δ_3 couples (E,C); the readout
    /// measures iγ_Aγ_B.
    pub fn pi_circuit(x_max: f64) -> Self {
        use MajoranaLabel::*;
        Self {
            kind: LayoutKind::Pi,
            edges: vec![
                Edge { a: site(B), b: site(E), flux: 0, sign: -1.0 },
                Edge { a: site(E), b: site(F), flux: 1, sign: 1.0 },
                Edge { a: site(E), b: site(C), flux: 2, sign: -1.0 },
            ],
            measure: (site(A), site(B)),
            rest: (site(E), site(F)),
            fluxes_per_qubit: 3,
            x_max,
        }
    }

    /// The triangular RAMM qubit: Δ_1 (F,E), Δ_2 (E,B), Δ_3 (B,A), Δ_4 (B,C), Δ_5 (E,C); γ_D is
    /// isolated and the readout measures iγ_Fγ_E.
    pub fn triangular_qubit(x_max: f64) -> Self {
        use MajoranaLabel::*;
        let e = |a: MajoranaLabel, b: MajoranaLabel, flux| Edge { a: site(a), b: site(b), flux, sign: 1.0 };
        Self {
            kind: LayoutKind::Triangle,
            edges: vec![e(F, E, 0), e(E, B, 1), e(B, A, 2), e(B, C, 3), e(E, C, 4)],
            measure: (site(F), site(E)),
            rest: (site(E), site(F)),
            fluxes_per_qubit: 5,
            x_max,
        }
    }

    fn edge(&self, a: usize, b: usize) -> Option<&Edge> {
        self.edges.iter().find(|e| (e.a == a && e.b == b) || (e.a == b && e.b == a))
    }

    fn neighbours(&self, s: usize) -> impl Iterator<Item = usize> + '_ {
        self.edges.iter().filter_map(move |e| {
            if e.a == s {
                Some(e.b)
            } else if e.b == s {
                Some(e.a)
            } else {
                None
            }
        })
    }
}

/// N identical qubits sharing the global readout flux x_0.
#[derive(Debug, Clone, PartialEq)]
pub struct RegisterLayout {
    pub qubit: IslandLayout,
    pub n_qubits: usize,
}

impl RegisterLayout {
    pub fn new(qubit: IslandLayout, n_qubits: usize) -> Self {
        Self { qubit, n_qubits }
    }

    /// x_0 followed by each qubit's flux block.
    pub fn width(&self) -> usize {
        1 + self.n_qubits * self.qubit.fluxes_per_qubit
    }

    fn flux_index(&self, qubit: usize, edge: &Edge) -> usize {
        1 + qubit * self.qubit.fluxes_per_qubit + edge.flux
    }

    /// Every qubit at rest with its ancilla edge on and x_0 = 0.
    pub fn rest_config(&self) -> Vec<f64> {
        let mut x = vec![0.0; self.width()];
        let (u, v) = self.qubit.rest;
        if let Some(e) = self.qubit.edge(u, v) {
            for q in 0..self.n_qubits {
                x[self.flux_index(q, e)] = e.sign * self.qubit.x_max;
            }
        }
        x
    }

    /// Checks |x| < π/2 and that no Aharonov-Bohm phase reaches π/2, so no coupling changes sign.
    pub fn check_config(&self, x: &[f64]) -> core::result::Result<(), String> {
        if let Some(v) = x.iter().find(|v| v.abs() >= FRAC_PI_2) {
            return Err(format!("flux {v} outside (-π/2, π/2)"));
        }
        let m = self.qubit.fluxes_per_qubit;
        for q in 0..self.n_qubits {
            let block = &x[1 + q * m..1 + (q + 1) * m];
            let worst = match self.qubit.kind {
                LayoutKind::Pi => {
                    let p = PiPhases::from_flux(&[x[0], block[0], block[1], block[2]]).map_err(|e| e.to_string())?;
                    [p.bg, p.g1, p.one_b, p.a12, p.a23, p.a31].iter().fold(0.0_f64, |a, b| a.max(b.abs()))
                }
                LayoutKind::Triangle => ramm_phases(block, x[0]).map_err(|e| e.to_string())?.max_abs(),
            };
            if worst >= FRAC_PI_2 {
                return Err(format!("qubit {q}: phase {worst:.3} reaches π/2, a coupling would change sign"));
            }
        }
        Ok(())
    }
}

/// A logical operation to lower onto fluxes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum MoveOp {
    /// Exchange of two Majoranas of one qubit; `first` leaves its site first.
    Exchange {
        qubit: usize,
        first: MajoranaLabel,
        second: MajoranaLabel,
    },
    /// Joint parity measurement of Π_n iγ_{n,X}γ_{n,Y} over the listed pairs.
    Measure { parts: Vec<(usize, MajoranaLabel, MajoranaLabel)> },
}

impl core::fmt::Display for MoveOp {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            MoveOp::Exchange { qubit, first, second } => write!(f, "exchange q{qubit} {first}{second}"),
            MoveOp::Measure { parts } => {
                write!(f, "measure")?;
                for (q, a, b) in parts {
                    write!(f, " q{q}:{a}{b}")?;
                }
                Ok(())
            }
        }
    }
}

/// Occupation of the sites of one qubit and its strongly coupled ancilla edge.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
struct QubitState {
    occupant: [MajoranaLabel; 6],
    active: (usize, usize),
}

impl QubitState {
    fn rest(layout: &IslandLayout) -> Self {
        Self {
            occupant: MajoranaLabel::ALL,
            active: layout.rest,
        }
    }

    fn site_of(&self, l: MajoranaLabel) -> usize {
        self.occupant.iter().position(|&o| o == l).unwrap_or(usize::MAX)
    }
}

/// One elementary hop: the Majorana at `from` moves to the far end of the active edge.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct Hop {
    junction: usize,
    from: usize,
    to: usize,
}

fn hops(layout: &IslandLayout, s: &QubitState) -> Vec<(Hop, QubitState)> {
    let mut out = Vec::new();
    let (a, b) = s.active;
    for (junction, partner) in [(a, b), (b, a)] {
        for from in layout.neighbours(junction) {
            if from == partner {
                continue;
            }
            let mut next = s.clone();
            next.occupant.swap(from, partner);
            next.active = (junction, from);
            out.push((Hop { junction, from, to: partner }, next));
        }
    }
    out
}

fn normalized(mut s: QubitState) -> QubitState {
    if s.active.0 > s.active.1 {
        s.active = (s.active.1, s.active.0);
    }
    s
}

fn search(layout: &IslandLayout, start: &QubitState, goal: impl Fn(&QubitState) -> bool) -> Option<Vec<(Hop, QubitState)>> {
    let mut seen: BTreeMap<QubitState, Option<(QubitState, Hop, QubitState)>> = BTreeMap::new();
    let mut queue = VecDeque::new();
    seen.insert(normalized(start.clone()), None);
    queue.push_back(start.clone());
    while let Some(s) = queue.pop_front() {
        if goal(&s) {
            let mut path = Vec::new();
            let mut key = normalized(s.clone());
            let mut cur = s;
            while let Some(Some((prev_key, hop, prev))) = seen.get(&key).cloned() {
                path.push((hop, cur));
                cur = prev;
                key = prev_key;
            }
            path.reverse();
            return Some(path);
        }
        for (hop, next) in hops(layout, &s) {
            let key = normalized(next.clone());
            if let alloc::collections::btree_map::Entry::Vacant(slot) = seen.entry(key) {
                slot.insert(Some((normalized(s.clone()), hop, s.clone())));
                queue.push_back(next);
            }
        }
    }
    None
}

/// A compiled program: the flux schedule plus, for each measurement, the ordered site pairs
/// whose parity the readout sees.
#[derive(Debug, Clone, PartialEq)]
pub struct CompiledProgram {
    pub schedule: FluxSchedule,
    /// Per "measure" step: (qubit, Majorana on the first measured site, on the second).
    pub measured: Vec<Vec<(usize, MajoranaLabel, MajoranaLabel)>>,
}

struct Emitter<'a> {
    layout: &'a RegisterLayout,
    schedule: FluxSchedule,
    current: Vec<f64>,
    step_duration: f64,
    counter: usize,
}

impl Emitter<'_> {
    fn emit(&mut self, label: String, next: Vec<f64>) -> core::result::Result<(), String> {
        self.layout.check_config(&next)?;
        self.schedule
            .push(&label, self.current.clone(), next.clone(), self.step_duration)
            .map_err(|e| e.to_string())?;
        self.current = next;
        self.counter += 1;
        Ok(())
    }

    fn edge_index(&self, q: usize, a: usize, b: usize) -> core::result::Result<usize, String> {
        let e = self
            .layout
            .qubit
            .edge(a, b)
            .ok_or_else(|| format!("sites {} and {} are not coupled", MajoranaLabel::ALL[a], MajoranaLabel::ALL[b]))?;
        Ok(self.layout.flux_index(q, e))
    }

    fn on_value(&self, a: usize, b: usize) -> f64 {
        self.layout.qubit.edge(a, b).map_or(0.0, |e| e.sign * self.layout.qubit.x_max)
    }

    /// Ramps the new coupling on, then the old ancilla coupling off.
    fn hop(&mut self, prefix: &str, q: usize, h: Hop) -> core::result::Result<(), String> {
        let on = self.edge_index(q, h.from, h.junction)?;
        let off = self.edge_index(q, h.junction, h.to)?;
        let mut x = self.current.clone();
        x[on] = self.on_value(h.from, h.junction);
        let label = format!("{prefix}-{}", self.counter);
        self.emit(label, x.clone())?;
        x[off] = 0.0;
        let label = format!("{prefix}-{}", self.counter);
        self.emit(label, x)
    }
}

fn compile_error(index: usize, op: &MoveOp, reason: impl Into<String>) -> Error {
    Error::Compile {
        index,
        op: op.to_string(),
        reason: reason.into(),
    }
}

/// Lowers logical operations to a flux schedule on `layout`, starting and ending at rest.
///
/// Rules: one coupling ramps per step; couplings switch between 0 and ±x_max; every qubit's
/// ancilla edge is on at op boundaries; measurement steps zero all qubit fluxes and raise x_0.
/// Exchanges use the three-hop T-junction sequence when both Majoranas and the ancilla partner
/// touch the junction, and otherwise a shortest hop sequence found by breadth-first search.
pub fn compile_schedule(ops: &[MoveOp], layout: &RegisterLayout, step_duration: f64) -> Result<CompiledProgram> {
    let width = layout.width();
    let rest = layout.rest_config();
    let mut em = Emitter {
        layout,
        schedule: FluxSchedule::empty(width).with_ramp(Ramp::default()),
        current: rest,
        step_duration,
        counter: 0,
    };
    let mut states: Vec<QubitState> = (0..layout.n_qubits).map(|_| QubitState::rest(&layout.qubit)).collect();
    let mut measured = Vec::new();
    for (index, op) in ops.iter().enumerate() {
        let fail = |r: String| compile_error(index, op, r);
        match op {
            MoveOp::Exchange { qubit, first, second } => {
                let q = *qubit;
                if q >= layout.n_qubits {
                    return Err(fail(format!("qubit {q} out of range")));
                }
                if first == second {
                    return Err(fail("cannot exchange a Majorana with itself".into()));
                }
                let s = states[q].clone();
                let (sp, sq) = (s.site_of(*first), s.site_of(*second));
                let mut sequence = None;
                for (u, v) in [s.active, (s.active.1, s.active.0)] {
                    let touches = |x: usize| layout.qubit.edge(u, x).is_some();
                    if sp != u && sq != u && sp != v && sq != v && touches(sp) && touches(sq) && touches(v) {
                        let h1 = Hop { junction: u, from: sp, to: v };
                        let h2 = Hop { junction: u, from: sq, to: sp };
                        let h3 = Hop { junction: u, from: v, to: sq };
                        sequence = Some(vec![h1, h2, h3]);
                        break;
                    }
                }
                let sequence = match sequence {
                    Some(h) => h,
                    None => {
                        let mut goal = s.clone();
                        goal.occupant.swap(sp, sq);
                        let target = normalized(goal);
                        search(&layout.qubit, &s, |c| normalized(c.clone()) == target)
                            .ok_or_else(|| fail(format!("{first} and {second} cannot be exchanged on this layout")))?
                            .into_iter()
                            .map(|(h, _)| h)
                            .collect()
                    }
                };
                let mut st = s;
                for h in sequence {
                    em.hop("braid", q, h).map_err(&fail)?;
                    st.occupant.swap(h.from, h.to);
                    st.active = (h.junction, h.from);
                }
                states[q] = st;
            }
            MoveOp::Measure { parts } => {
                if parts.is_empty() {
                    return Err(fail("empty parity".into()));
                }
                let mut moved: Vec<(usize, Vec<Hop>)> = Vec::new();
                let mut seen_qubits = Vec::new();
                for &(q, a, b) in parts {
                    if q >= layout.n_qubits {
                        return Err(fail(format!("qubit {q} out of range")));
                    }
                    if seen_qubits.contains(&q) {
                        return Err(fail(format!("qubit {q} listed twice")));
                    }
                    if a == b {
                        return Err(fail(format!("pair {a}{b} repeats a Majorana")));
                    }
                    seen_qubits.push(q);
                    let (m0, m1) = layout.qubit.measure;
                    let goal = |c: &QubitState| {
                        let on = [c.occupant[m0], c.occupant[m1]];
                        (on == [a, b] || on == [b, a]) && ![m0, m1].contains(&c.active.0) && ![m0, m1].contains(&c.active.1)
                    };
                    let path = search(&layout.qubit, &states[q], goal)
                        .ok_or_else(|| fail(format!("{a} and {b} cannot reach the measurement sites")))?;
                    let hops: Vec<Hop> = path.iter().map(|(h, _)| *h).collect();
                    for h in &hops {
                        em.hop("move", q, *h).map_err(&fail)?;
                    }
                    if let Some((_, last)) = path.last() {
                        states[q] = last.clone();
                    }
                    moved.push((q, hops));
                }
                let (m0, m1) = layout.qubit.measure;
                measured.push(
                    parts
                        .iter()
                        .map(|&(q, _, _)| (q, states[q].occupant[m0], states[q].occupant[m1]))
                        .collect(),
                );
                let before = em.current.clone();
                let mut readout = vec![0.0; width];
                readout[0] = layout.qubit.x_max;
                em.emit(format!("measure-{}", em.counter), readout).map_err(&fail)?;
                em.emit(format!("restore-{}", em.counter), before).map_err(&fail)?;
                for (q, hops) in moved.into_iter().rev() {
                    for h in hops.into_iter().rev() {
                        let back = Hop { junction: h.junction, from: h.to, to: h.from };
                        let on = em.edge_index(q, h.junction, h.to).map_err(&fail)?;
                        let off = em.edge_index(q, h.from, h.junction).map_err(&fail)?;
                        let mut x = em.current.clone();
                        x[on] = em.on_value(h.junction, h.to);
                        em.emit(format!("return-{}", em.counter), x.clone()).map_err(&fail)?;
                        x[off] = 0.0;
                        em.emit(format!("return-{}", em.counter), x).map_err(&fail)?;
                        let st = &mut states[q];
                        st.occupant.swap(back.from, back.to);
                        st.active = (h.junction, h.to);
                    }
                }
            }
        }
    }
    em.schedule.validate()?;
    Ok(CompiledProgram {
        schedule: em.schedule,
        measured,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use MajoranaLabel::*;

    #[test]
    fn empty_program() {
        let layout = RegisterLayout::new(IslandLayout::pi_circuit(1.0), 1);
        let p = compile_schedule(&[], &layout, 1.0).unwrap();
        assert!(p.schedule.is_empty());
    }

    #[test]
    fn isolated_majorana_cannot_move() {
        let layout = RegisterLayout::new(IslandLayout::triangular_qubit(0.7), 1);
        let op = MoveOp::Exchange { qubit: 0, first: D, second: A };
        let err = compile_schedule(&[op], &layout, 1.0).unwrap_err();
        assert!(matches!(err, Error::Compile { index: 0, .. }));
    }

    #[test]
    fn pi_exchange_is_six_steps() {
        let layout = RegisterLayout::new(IslandLayout::pi_circuit(1.0), 1);
        let op = MoveOp::Exchange { qubit: 0, first: B, second: C };
        let p = compile_schedule(&[op], &layout, 1.0).unwrap();
        assert_eq!(p.schedule.len(), 6);
        for s in p.schedule.steps() {
            assert_eq!(s.ramping().len(), 1);
        }
    }
}
