use std::time::Instant;

use majorana_core::algebra::{StateVector, UnitaryMatrix};
use majorana_core::braid::*;
use majorana_core::device::MajoranaLabel::*;
use majorana_core::linalg::*;
use majorana_core::readout::PhotonCountModel;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const X_MAX: f64 = 1.0;

fn device(ratio: f64) -> BraidDevice {
    BraidDevice::with_delta_ratio(ratio, X_MAX, 1.0).unwrap()
}

#[test]
fn holonomy_is_the_exchange_gate() {
    let start = Instant::now();
    let d = device(1e-4);
    assert!((d.delta_ratio() - 1e-4).abs() < 1e-10);
    let s = braid_cycle(X_MAX, 1.0).unwrap();
    let h = d.holonomy(&s, DEFAULT_WILSON_POINTS, None).unwrap();
    let err = h.qubit_unitary.distance(&ideal_braid_unitary());
    println!("distance {err:.3e}, leakage {:.3e}, min gap {:.3}", h.leakage, h.min_gap);
    assert!(err <= 1e-3);
    assert!(start.elapsed().as_secs_f64() < 10.0);

    let fine = device(1e-6).holonomy(&s, DEFAULT_WILSON_POINTS, None).unwrap();
    let err_fine = fine.qubit_unitary.distance(&ideal_braid_unitary());
    assert!(err_fine < err / 10.0, "{err_fine} vs {err}");
}

#[test]
fn leakage_is_small_when_gapped() {
    let s = braid_cycle(X_MAX, 1.0).unwrap();
    let h = device(1e-5).holonomy(&s, DEFAULT_WILSON_POINTS, None).unwrap();
    assert!(h.min_gap > 0.3);
    assert!(h.leakage < 1e-6, "leakage {}", h.leakage);
}

#[test]
fn trivial_path_gives_identity() {
    let d = device(1e-4);
    let rest = vec![0.0, 0.0, X_MAX, 0.0];
    let s = FluxSchedule::from_waypoints(&rest, &[("hold", rest.clone(), 5.0)], Ramp::Linear).unwrap();
    let h = d.holonomy(&s, 256, Some(64)).unwrap();
    assert!(h.qubit_unitary.distance(&identity(2)) < 1e-12);
    let path = ConstantPath { hamiltonian: d.hamiltonian(&rest).unwrap(), time: 5.0 };
    let w = wilson_line(&path, 64, d.qubit_basis()).unwrap();
    assert!(w.qubit_unitary.distance(&identity(2)) < 1e-12);
}

#[test]
fn reversed_cycle_gives_inverse() {
    let d = device(1e-4);
    let s = braid_cycle(X_MAX, 1.0).unwrap();
    let u = d.holonomy(&s, 4096, None).unwrap().qubit_unitary;
    let v = d.holonomy(&s.reversed(), 4096, None).unwrap().qubit_unitary;
    assert!(u.compose(&v).distance(&identity(2)) < 1e-6);
    assert!(v.distance(u.adjoint().matrix()) < 1e-6);
}

#[test]
fn holonomy_is_independent_of_timing() {
    let d = device(1e-4);
    let s = braid_cycle(X_MAX, 1.0).unwrap();
    let u = d.holonomy(&s, 4096, None).unwrap().qubit_unitary;
    let v = d.holonomy(&s.scaled(10.0), 4096, None).unwrap().qubit_unitary;
    assert!(u.distance(v.matrix()) < 1e-6);
}

#[test]
fn fourth_power_is_scalar() {
    let s = braid_cycle(X_MAX, 1.0).unwrap();
    let u = device(1e-6).holonomy(&s, DEFAULT_WILSON_POINTS, None).unwrap().qubit_unitary;
    assert!(u.pow(4).distance(&identity(2)) < 1e-4);
    assert!(u.pow(2).distance(&pauli_x()) < 1e-4);
}

#[test]
fn chirality_flips_with_operand_order() {
    let layout = RegisterLayout::new(IslandLayout::pi_circuit(X_MAX), 1);
    let op = MoveOp::Exchange { qubit: 0, first: C, second: B };
    let s = compile_schedule(&[op], &layout, 1.0).unwrap().schedule;
    let u = device(1e-6).holonomy(&s, DEFAULT_WILSON_POINTS, None).unwrap().qubit_unitary;
    assert!(u.distance(&ideal_braid_unitary().adjoint()) < 1e-4);
}

#[test]
fn wilson_line_agrees_with_time_evolution() {
    let d = device(1e-4);
    let s = braid_cycle(X_MAX, 1e3 / 6.0).unwrap();
    let h = d.holonomy(&s, DEFAULT_WILSON_POINTS, Some(4096)).unwrap();
    let diab = h.diabatic_error.unwrap();
    println!("Wilson line vs evolution: {diab:.3e}");
    assert!(diab <= 1e-4);
}

#[test]
fn braid_steps_keep_one_coupling_at_max() {
    let d = device(1e-4);
    let s = standard_braid_schedule(X_MAX, 1.0).unwrap();
    assert_eq!(s.len(), 10);
    for step in s.steps().iter().filter(|s| s.is_braiding()) {
        for k in 0..=20 {
            let t = step.t_start + step.duration() * k as f64 / 20.0;
            let x = s.config_at(t);
            assert_eq!(x[0], 0.0);
            assert!(x[1..].iter().any(|v| v.abs() == X_MAX), "{} at t = {t}", step.label);
            let c = d.couplings(&x).unwrap();
            let top = c.delta.iter().fold(0.0f64, |a, b| a.max(b.abs()));
            assert!(top > 0.3 * d.delta_max(), "{} at t = {t}", step.label);
        }
    }
}

#[test]
fn standard_schedule_contains_the_compiled_braid() {
    let s = standard_braid_schedule(X_MAX, 2.0).unwrap();
    let labels: Vec<&str> = s.steps().iter().map(|s| s.label.as_str()).collect();
    assert_eq!(
        labels,
        ["init-0", "init-1", "init-2", "braid-3", "braid-4", "braid-5", "braid-6", "braid-7", "braid-8", "measure-9"]
    );
    let block = s.select("braid");
    let compiled = braid_cycle(X_MAX, 2.0).unwrap();
    assert_eq!(block.len(), 6);
    for (a, b) in block.steps().iter().zip(compiled.steps()) {
        assert_eq!(a.start, b.start);
        assert_eq!(a.end, b.end);
        assert_eq!(a.duration(), b.duration());
    }
    assert_eq!(s.initial().unwrap(), &[X_MAX, 0.0, 0.0, 0.0]);
    assert_eq!(s.last().unwrap(), &[X_MAX, 0.0, 0.0, 0.0]);
}

#[test]
fn measure_z_then_x_visits_the_readout_sites() {
    let layout = RegisterLayout::new(IslandLayout::triangular_qubit(0.7), 1);
    let ops = [MoveOp::Measure { parts: vec![(0, A, B)] }, MoveOp::Measure { parts: vec![(0, B, C)] }];
    let p = compile_schedule(&ops, &layout, 1.0).unwrap();
    let pairs: Vec<[_; 2]> = p.measured.iter().map(|m| {
        let (_, a, b) = m[0];
        let mut v = [a, b];
        v.sort_by_key(|l| l.index());
        v
    }).collect();
    assert_eq!(pairs, vec![[A, B], [B, C]]);
    let measures: Vec<_> = p.schedule.steps().iter().filter(|s| s.label.starts_with("measure")).collect();
    assert_eq!(measures.len(), 2);
    for m in &measures {
        assert_eq!(m.end[0], 0.7);
        assert!(m.end[1..].iter().all(|&x| x == 0.0));
    }
    let first_measure = p.schedule.steps().iter().position(|s| s.label.starts_with("measure")).unwrap();
    assert!(p.schedule.steps()[..first_measure].iter().any(|s| s.label.starts_with("move")));
    assert!(p.schedule.steps().iter().any(|s| s.label.starts_with("return")));
    assert_eq!(p.schedule.last().unwrap(), layout.rest_config().as_slice());
}

#[test]
fn empty_program_gives_empty_schedule() {
    let layout = RegisterLayout::new(IslandLayout::pi_circuit(X_MAX), 1);
    let p = compile_schedule(&[], &layout, 1.0).unwrap();
    assert!(p.schedule.is_empty() && p.measured.is_empty());
}

fn arb_op() -> impl Strategy<Value = MoveOp> {
    let labels = prop_oneof![Just(A), Just(B), Just(C)];
    prop_oneof![
        (0usize..2, labels.clone(), labels.clone())
            .prop_filter("distinct", |(_, a, b)| a != b)
            .prop_map(|(qubit, first, second)| MoveOp::Exchange { qubit, first, second }),
        (labels.clone(), labels.clone(), proptest::bool::ANY)
            .prop_filter("distinct", |(a, b, _)| a != b)
            .prop_map(|(a, b, both)| {
                let mut parts = vec![(0, a, b)];
                if both {
                    parts.push((1, a, b));
                }
                MoveOp::Measure { parts }
            }),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn compiled_schedules_satisfy_invariants(ops in proptest::collection::vec(arb_op(), 0..6)) {
        let layout = RegisterLayout::new(IslandLayout::triangular_qubit(0.7), 2);
        let p = compile_schedule(&ops, &layout, 1.5).unwrap();
        let s = &p.schedule;
        prop_assert!(s.validate().is_ok());
        for w in s.steps().windows(2) {
            prop_assert_eq!(&w[0].end, &w[1].start);
            prop_assert_eq!(w[0].t_end, w[1].t_start);
        }
        for step in s.steps() {
            prop_assert!(step.ramping().len() <= 1 || step.label.starts_with("measure") || step.label.starts_with("restore"));
            for k in 0..=8 {
                let x = s.config_at(step.t_start + step.duration() * k as f64 / 8.0);
                prop_assert!(layout.check_config(&x).is_ok());
                if step.is_braiding() {
                    prop_assert_eq!(x[0], 0.0);
                }
            }
        }
        if !s.is_empty() {
            let rest = layout.rest_config();
            prop_assert_eq!(s.last().unwrap(), rest.as_slice());
        }
    }
}

#[test]
fn pflip_follows_the_gate_powers() {
    let start = Instant::now();
    let u = UnitaryMatrix::new(ideal_braid_unitary()).unwrap();
    let m = PhotonCountModel::from_rates(1e4, 10.0).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    let want = [0.5, 1.0, 0.5, 0.0];
    for n in 1..=8u32 {
        let r = pflip_experiment(&u, n, 10_000, &m, &mut rng).unwrap();
        let w = want[(n as usize - 1) % 4];
        assert!((r.expected - w).abs() < 1e-12);
        assert!(r.estimate.contains(w), "n = {n}: {:?}", r.estimate);
    }
    assert!(start.elapsed().as_secs_f64() < 60.0);
    assert!(pflip_experiment(&u, 1, 0, &m, &mut rng).is_err());
}

#[test]
fn pflip_is_reproducible() {
    let u = UnitaryMatrix::new(ideal_braid_unitary()).unwrap();
    let m = PhotonCountModel::from_rates(100.0, 49.0).unwrap();
    let run = || pflip_experiment(&u, 3, 2000, &m, &mut ChaCha8Rng::seed_from_u64(7)).unwrap();
    assert_eq!(run(), run());
}

fn rotating_field(theta_end: f64) -> impl Fn(f64, f64) -> CMat {
    move |t, total| {
        let th = theta_end * t / total;
        (pauli_z() * re(th.cos()) + pauli_x() * re(th.sin())) * re(-1.0)
    }
}

fn excitation(total: f64) -> f64 {
    let f = rotating_field(std::f64::consts::FRAC_PI_2);
    let path = FnPath { f: |t| f(t, total), time: total };
    let ground = StateVector::new(CVec::from_vec(vec![C64::new(1.0, 0.0), C64::new(0.0, 0.0)])).unwrap();
    let out = adiabatic_evolve(&path, 512, &ground, true).unwrap();
    let end = eigh(&path.at(total));
    1.0 - inner(&end.vectors.column(0).into_owned(), out.amplitudes()).norm_sqr()
}

#[test]
fn adiabatic_error_falls_as_inverse_square_time() {
    let envelope = |t0: f64| (0..120).map(|k| excitation(t0 * (1.0 + k as f64 / 120.0))).fold(0.0, f64::max);
    let e = [envelope(10.0), envelope(20.0), envelope(40.0)];
    for w in e.windows(2) {
        let r = w[0] / w[1];
        assert!((3.0..5.0).contains(&r), "envelope ratio {r}, {e:?}");
    }
}

#[test]
fn sudden_and_constant_limits() {
    let h = pauli_x() * re(0.3) + pauli_z() * re(1.1);
    let path = ConstantPath { hamiltonian: h.clone(), time: 2.5 };
    assert!(max_abs(&(propagator(&path, 16, true).unwrap() - expm_herm(&h, 2.5))) < 1e-10);
    let f = rotating_field(1.0);
    let fast = FnPath { f: |t| f(t, 1e-9), time: 1e-9 };
    assert!(max_abs(&(propagator_fixed(&fast, 4) - identity(2))) < 1e-8);
}
