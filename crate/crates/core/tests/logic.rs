use majorana_core::algebra::MajoranaSet;
use majorana_core::device::MajoranaLabel::*;
use majorana_core::linalg::*;
use majorana_core::logic::*;
use majorana_core::Error;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn basis(n: usize, k: usize) -> CVec {
    let mut v = CVec::zeros(1 << n);
    v[k] = ONE;
    v
}

fn fidelity(a: &CVec, b: &CVec) -> f64 {
    inner(a, b).norm_sqr()
}

/// |ψ⟩ on qubit `q` of an n-qubit product with the others in |0⟩.
fn embed_single(n: usize, q: usize, psi: &CVec) -> CVec {
    let mut v = CVec::zeros(1 << n);
    v[0] = psi[0];
    v[1 << (n - 1 - q)] = psi[1];
    v
}

#[test]
fn pauli_algebra() {
    let reg = LogicalRegister::new(2).unwrap();
    let [x, y, z] = reg.pauli_operators(0).unwrap();
    let id = identity(reg.dim());
    for p in [&x, &y, &z] {
        assert!(max_abs(&(p * p - &id)) < 1e-12);
        assert!(is_hermitian(p, 1e-12));
    }
    assert!(max_abs(&(&z * &x - &y * IM)) < 1e-12);
    let [x2, _, _] = reg.pauli_operators(1).unwrap();
    assert!(max_abs(&commutator(&z, &x2)) < 1e-12);
}

#[test]
fn product_representation_matches_full_jordan_wigner() {
    // Two qubits as twelve Majoranas in one Jordan-Wigner chain, restricted to the states with
    // odd parity on each qubit.
    let set = MajoranaSet::new(12).unwrap();
    let g = |q: usize, l: majorana_core::device::MajoranaLabel| 6 * q + l.index();
    let p0 = set.product(&(0..6).collect::<Vec<_>>());
    let p1 = set.product(&(6..12).collect::<Vec<_>>());
    let phase = |p: &CMat| p * C64::new(0.0, -1.0).powi(3);
    let (q0, q1) = (phase(&p0), phase(&p1));
    let id = identity(set.dim());
    let proj = (&id - &q0) * re(0.5) * (&id - &q1) * re(0.5);
    let reg = LogicalRegister::new(2).unwrap();
    let specs = [
        ParitySpec::new(vec![(0, A, B), (1, B, C)]).unwrap(),
        ParitySpec::new(vec![(0, E, F), (1, A, C)]).unwrap(),
        ParitySpec::new(vec![(0, A, F), (1, C, E)]).unwrap(),
    ];
    let full = |s: &ParitySpec| {
        s.parts().iter().fold(id.clone(), |m, &(q, x, y)| set.bilinear(g(q, x), g(q, y)) * m)
    };
    // Spectra of products of the specs agree between representations.
    for a in &specs {
        for b in &specs {
            let small = reg.parity_operator(a).unwrap() * reg.parity_operator(b).unwrap();
            let big = &proj * full(a) * full(b) * &proj;
            let tr_small: C64 = small.trace();
            let tr_big: C64 = big.trace();
            assert!((tr_small - tr_big).norm() < 1e-9, "{a} · {b}: {tr_small} vs {tr_big}");
        }
    }
}

#[test]
fn braid_gates() {
    let mut reg = LogicalRegister::new(1).unwrap();
    reg.braid_gate(0, Axis::Z, 1).unwrap();
    let v = reg.logical_state().unwrap();
    assert!((v[0] - C64::from_polar(1.0, -std::f64::consts::FRAC_PI_4)).norm() < 1e-12);
    let mut reg = LogicalRegister::from_logical(1, &basis(1, 1)).unwrap();
    reg.braid_gate(0, Axis::Z, 1).unwrap();
    assert!((reg.logical_state().unwrap()[1] - C64::from_polar(1.0, std::f64::consts::FRAC_PI_4)).norm() < 1e-12);

    let [uz, ux] = braid_generators();
    let uy = exp_involution(&pauli_y(), -std::f64::consts::FRAC_PI_4);
    assert!(max_abs(&(ux.adjoint() * &uz * &ux - &uy)) < 1e-12);
    assert!(max_abs(&(&uz * &uz - pauli_z() * C64::new(0.0, -1.0))) < 1e-12);
}

#[test]
fn braid_y_matches_composite() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let psi = random_logical_state(1, &mut rng);
    let mut a = LogicalRegister::from_logical(1, &psi).unwrap();
    a.braid_gate(0, Axis::Y, 1).unwrap();
    let mut b = LogicalRegister::from_logical(1, &psi).unwrap();
    b.braid_gate(0, Axis::X, 1).unwrap();
    b.braid_gate(0, Axis::Z, 1).unwrap();
    b.braid_gate(0, Axis::X, -1).unwrap();
    assert!(fidelity(&a.logical_state().unwrap(), &b.logical_state().unwrap()) > 1.0 - 1e-12);
}

#[test]
fn clifford_closure_has_24_elements() {
    assert_eq!(group_closure(&braid_generators(), 100).unwrap().len(), 24);
}

#[test]
fn measurement_basics() {
    let mut reg = LogicalRegister::new(2).unwrap();
    let mut forced = ForcedOutcomes::new(vec![1]);
    assert_eq!(reg.measure_pauli(&[(0, Axis::Z)], &mut forced).unwrap(), 1);
    assert!((reg.record().entries[0].probability - 1.0).abs() < 1e-12);
    let mut impossible = ForcedOutcomes::new(vec![-1]);
    assert!(matches!(reg.measure_pauli(&[(0, Axis::Z)], &mut impossible), Err(Error::Replay(_))));

    // Ancilla pairs contribute +1.
    let spec = ParitySpec::new(vec![(0, A, B), (1, E, F)]).unwrap();
    assert!((reg.expectation(&spec).unwrap() - 1.0).abs() < 1e-12);
}

#[test]
fn bell_pair_parity_measurement() {
    let mut psi = CVec::zeros(4);
    psi[0] = re(std::f64::consts::FRAC_1_SQRT_2);
    psi[1] = re(std::f64::consts::FRAC_1_SQRT_2);
    // (|00⟩ + |01⟩)/√2: σ_zσ_z outcomes equiprobable.
    for branch in [1i8, -1] {
        let mut reg = LogicalRegister::from_logical(2, &psi).unwrap();
        let mut forced = ForcedOutcomes::new(vec![branch, branch]);
        reg.measure_pauli(&[(0, Axis::Z), (1, Axis::Z)], &mut forced).unwrap();
        assert!((reg.record().entries[0].probability - 0.5).abs() < 1e-12);
        reg.measure_pauli(&[(0, Axis::Z), (1, Axis::Z)], &mut forced).unwrap();
        assert!((reg.record().entries[1].probability - 1.0).abs() < 1e-12);
    }
}

fn run_branches(
    n: usize,
    psi: &CVec,
    k: usize,
    circuit: impl Fn(&mut LogicalRegister, &mut ForcedOutcomes) -> majorana_core::Result<MeasurementRecord>,
    check: impl Fn(&LogicalRegister),
) -> usize {
    let mut total = 0.0;
    let mut run = 0;
    for branch in ForcedOutcomes::all_branches(k) {
        let mut reg = LogicalRegister::from_logical(n, psi).unwrap();
        let mut forced = ForcedOutcomes::new(branch);
        match circuit(&mut reg, &mut forced) {
            Ok(rec) => {
                total += rec.branch_probability();
                run += 1;
                assert!(reg.ancilla_parities().iter().all(|&p| (p - 1.0).abs() < 1e-10));
                check(&reg);
            }
            Err(Error::Replay(_)) => {}
            Err(e) => panic!("{e}"),
        }
    }
    assert!((total - 1.0).abs() < 1e-12, "branch probabilities sum to {total}");
    run
}

#[test]
fn cnot_all_branches() {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    for (c, t) in [(0, 0), (0, 1), (1, 0), (1, 1)] {
        // Ancilla in |+⟩ so that the reset measurement is random.
        let mut psi = CVec::zeros(8);
        psi[(c << 2) | (t << 1)] = re(s);
        psi[(c << 2) | (t << 1) | 1] = re(s);
        let want = basis(3, (c << 2) | ((c ^ t) << 1));
        let runs = run_branches(3, &psi, 3, |r, f| cnot(r, 0, 1, 2, f), |r| {
            assert!(fidelity(&r.logical_state().unwrap(), &want) > 1.0 - 1e-12);
        });
        assert_eq!(runs, 8);
    }
}

#[test]
fn cnot_makes_bell_state() {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let mut psi = CVec::zeros(8);
    psi[0] = re(s);
    psi[4] = re(s);
    let mut bell = CVec::zeros(8);
    bell[0] = re(s);
    bell[6] = re(s);
    run_branches(3, &psi, 3, |r, f| cnot(r, 0, 1, 2, f), |r| {
        assert!(fidelity(&r.logical_state().unwrap(), &bell) > 1.0 - 1e-12);
    });
}

#[test]
fn teleportation_all_branches() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..20 {
        let one = random_logical_state(1, &mut rng);
        let psi = embed_single(3, 0, &one);
        let runs = run_branches(3, &psi, 3, |r, f| teleport(r, 0, 1, 2, f), |r| {
            let rho = r.reduced_density(&[2]).unwrap();
            let f = (one.adjoint() * &rho * &one)[(0, 0)].re;
            assert!(f > 1.0 - 1e-10, "fidelity {f}");
            let pair = r.reduced_density(&[0]).unwrap();
            assert!(max_abs(&(pair - identity(2) * re(0.5))) < 1e-10);
        });
        assert_eq!(runs, 8);
    }
}

#[test]
fn t_injection_all_branches() {
    let [a0, a1] = magic_state();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for k in 0..6 {
        let one = if k == 0 { CVec::from_vec(vec![re(std::f64::consts::FRAC_1_SQRT_2); 2]) } else { random_logical_state(1, &mut rng) };
        let mut psi = CVec::zeros(4);
        psi[0] = one[0] * a0;
        psi[1] = one[0] * a1;
        psi[2] = one[1] * a0;
        psi[3] = one[1] * a1;
        let want = CVec::from_vec(vec![one[0], one[1] * C64::from_polar(1.0, std::f64::consts::FRAC_PI_4)]);
        let runs = run_branches(2, &psi, 2, |r, f| t_gate_injection(r, 0, 1, f), |r| {
            let rho = r.reduced_density(&[0]).unwrap();
            assert!((want.adjoint() * &rho * &want)[(0, 0)].re > 1.0 - 1e-12);
        });
        assert_eq!(runs, 4);
    }
}

#[test]
fn eight_t_gates_are_identity() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let one = random_logical_state(1, &mut rng);
    let mut reg = LogicalRegister::from_logical(2, &embed_single(2, 0, &one)).unwrap();
    for _ in 0..8 {
        reg.prepare_qubit(1, magic_state(), &mut rng).unwrap();
        t_gate_injection(&mut reg, 0, 1, &mut rng).unwrap();
    }
    let rho = reg.reduced_density(&[0]).unwrap();
    assert!((one.adjoint() * &rho * &one)[(0, 0)].re > 1.0 - 1e-12);
}

#[test]
fn cluster_states() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut reg = LogicalRegister::new(9).unwrap();
    let rec = prepare_cluster_state(&mut reg, 3, 3, &mut rng).unwrap();
    assert_eq!(rec.len(), 9);
    for k in cluster_stabilizers(3, 3).unwrap() {
        assert!((reg.expectation(&k).unwrap() - 1.0).abs() < 1e-10);
    }

    let mut reg = LogicalRegister::new(2).unwrap();
    prepare_cluster_state(&mut reg, 1, 2, &mut rng).unwrap();
    let stabs = cluster_stabilizers(1, 2).unwrap();
    for k in &stabs {
        assert!((reg.expectation(k).unwrap() - 1.0).abs() < 1e-10);
    }
    // Hadamard on the second qubit gives the Bell state (|00⟩ + |11⟩)/√2.
    let v = reg.logical_state().unwrap();
    let h = (pauli_x() + pauli_z()) * re(std::f64::consts::FRAC_1_SQRT_2);
    let w = kron(&identity(2), &h) * v;
    let mut bell = CVec::zeros(4);
    bell[0] = re(std::f64::consts::FRAC_1_SQRT_2);
    bell[3] = re(std::f64::consts::FRAC_1_SQRT_2);
    assert!(fidelity(&w, &bell) > 1.0 - 1e-12);

    let before = reg.record().len();
    let o1 = reg.measure_parity(&stabs[0], &mut rng).unwrap();
    let o2 = reg.measure_parity(&stabs[0], &mut rng).unwrap();
    assert_eq!((o1, o2), (1, 1));
    assert_eq!(reg.record().len(), before + 2);
}

#[test]
fn bravyi_kitaev_identity() {
    let branches = bravyi_kitaev_all_branches().unwrap();
    let total: f64 = branches.iter().map(|b| b.probability).sum();
    assert!((total - 1.0).abs() < 1e-12);
    for b in &branches {
        assert!(b.discrepancy.unwrap() < 1e-10, "{b:?}");
    }
}

#[test]
fn bravyi_kitaev_needs_initialized_ancillas() {
    let set = MajoranaSet::new(6).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let psi = random_logical_state(3, &mut rng);
    let states = CMat::from_columns(&[psi]);
    let worst = [(1, 1), (1, -1), (-1, 1), (-1, -1)]
        .iter()
        .filter_map(|&(p1, p2)| bravyi_kitaev_check(&set, &states, p1, p2).unwrap().discrepancy)
        .fold(0.0, f64::max);
    assert!(worst > 1e-3);
}

#[test]
fn distillation() {
    assert!((distillation_error(0.01).unwrap() - 3.5e-5).abs() < 1e-15);
    assert_eq!(distillation_error(0.0).unwrap(), 0.0);
    let seq = distillation_sequence(0.1, 2e-3).unwrap();
    assert_eq!(seq.len(), 3);
    assert!((seq[2] - 35.0 * (35.0e-3f64).powi(3)).abs() < 1e-15);
    assert!(distillation_error(0.2).is_err());
}

#[test]
fn hardware_mode_compiles_moves() {
    use majorana_core::braid::IslandLayout;
    let mut reg = LogicalRegister::new(2).unwrap().with_mode(ExecutionMode::Hardware(IslandLayout::triangular_qubit(0.7)));
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    reg.braid_gate(0, Axis::X, 1).unwrap();
    reg.braid_gate(1, Axis::Y, 1).unwrap();
    reg.measure_pauli(&[(0, Axis::Z), (1, Axis::X)], &mut rng).unwrap();
    reg.measure_pauli(&[(0, Axis::Y)], &mut rng).unwrap();
}
