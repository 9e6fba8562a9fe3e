use majorana_core::algebra::*;
use majorana_core::linalg::*;
use nalgebra::DMatrix;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[test]
fn clifford_relations() {
    for count in [2, 4, 6, 10] {
        let m = MajoranaSet::new(count).unwrap();
        assert_eq!(m.count(), count);
        assert_eq!(m.dim(), 1 << (count / 2));
        let id = identity(m.dim());
        for i in 0..count {
            let g = m.gamma(i);
            assert!(is_hermitian(g, 0.0));
            assert_eq!(max_abs(&(g * g - &id)), 0.0);
            for j in i + 1..count {
                assert!(max_abs(&anticommutator(g, m.gamma(j))) < 1e-12);
            }
        }
        assert!(m.algebra_defect() < 1e-12);
    }
    assert!(MajoranaSet::new(0).is_err());
    assert!(MajoranaSet::new(5).is_err());
}

#[test]
fn construction_is_deterministic() {
    let a = MajoranaSet::new(6).unwrap();
    let b = build_majorana_set(6).unwrap();
    for i in 0..6 {
        assert_eq!(a.gamma(i), b.gamma(i));
    }
}

#[test]
fn full_product_has_unit_eigenvalues() {
    let m = MajoranaSet::new(10).unwrap();
    let idx: Vec<usize> = (0..10).collect();
    // i^5 γ_0 … γ_9 is Hermitian for ten Majoranas.
    let p = m.product(&idx) * C64::new(0.0, 1.0).powi(5);
    assert!(is_hermitian(&p, 1e-12));
    for v in eigvalsh(&p) {
        assert!((v.abs() - 1.0).abs() < 1e-12, "{v}");
    }
    assert!(max_abs(&(p - m.total_parity())) < 1e-12);
}

#[test]
fn occupation_matches_pair_parity() {
    let m = MajoranaSet::new(6).unwrap();
    for j in 0..3 {
        let n = m.creation(j) * m.annihilation(j);
        let want = identity(8) - n * re(2.0);
        assert!(max_abs(&(m.bilinear(2 * j, 2 * j + 1) - want)) < 1e-14);
    }
    let vac = m.vacuum();
    for j in 0..3 {
        assert!(vec_norm(&(m.annihilation(j) * &vac)) < 1e-15);
    }
}

#[test]
fn sector_examples() {
    let m = MajoranaSet::new(6).unwrap();
    for parity in [1, -1] {
        let s = ParitySector::new(&m, parity).unwrap();
        assert_eq!(s.dim(), 4);
        let r = s.restrict(&identity(8)).unwrap();
        assert!(max_abs(&(r - identity(4))) < 1e-15);
        let p = s.projector();
        assert!(max_abs(&(p * p - p)) < 1e-14 && is_hermitian(p, 0.0));
        let pv = s.parity_operator() * s.basis();
        assert!(max_abs(&(pv - s.basis() * re(parity as f64))) < 1e-14);
    }
    let two = MajoranaSet::new(2).unwrap();
    let h = two.bilinear(0, 1);
    assert!((ParitySector::new(&two, 1).unwrap().restrict(&h).unwrap()[(0, 0)].re - 1.0).abs() < 1e-15);
    assert!((ParitySector::new(&two, -1).unwrap().restrict(&h).unwrap()[(0, 0)].re + 1.0).abs() < 1e-15);
    assert!(ParitySector::new(&m, 0).is_err());
    assert!(ParitySector::new(&m, 1).unwrap().restrict(m.gamma(0)).is_err());
}

fn is_submultiset(sub: &[f64], full: &[f64], tol: f64) -> bool {
    let mut used = vec![false; full.len()];
    sub.iter().all(|&v| {
        match (0..full.len()).find(|&k| !used[k] && (full[k] - v).abs() < tol) {
            Some(k) => {
                used[k] = true;
                true
            }
            None => false,
        }
    })
}

#[test]
fn braiding_hamiltonian_sector_spectrum() {
    let m = MajoranaSet::new(6).unwrap();
    let h = m.quadratic(&[(-0.3, 1, 4), (-1.0, 4, 5), (-0.6, 4, 2)]);
    let full = eigvalsh(&h);
    let mut union = Vec::new();
    for parity in [1, -1] {
        let part = eigvalsh(&ParitySector::new(&m, parity).unwrap().restrict(&h).unwrap());
        assert!(is_submultiset(&part, &full, 1e-12));
        union.extend(part);
    }
    union.sort_by(f64::total_cmp);
    assert!(union.iter().zip(&full).all(|(a, b)| (a - b).abs() < 1e-12));
}

#[test]
fn ground_subspace_examples() {
    let d = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![0.0, 0.0, 5.0, 5.0])).map(re);
    assert_eq!(ground_subspace(&d, 1e-6).ncols(), 2);

    let m = MajoranaSet::new(6).unwrap();
    let h = m.quadratic(&[(-1.0, 4, 5)]);
    let odd = ParitySector::new(&m, -1).unwrap();
    let g = ground_subspace(&odd.restrict(&h).unwrap(), 1e-9);
    assert_eq!(g.ncols(), 2);

    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for _ in 0..20 {
        let a = DMatrix::from_fn(4, 4, |_, _| C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)));
        let h = hermitian_part(&a);
        let b = ground_subspace(&h, 1e-9);
        assert_eq!(b.ncols(), 1);
        let e = eigh(&h);
        let v = e.vectors.column(0).into_owned();
        let want = &v * v.adjoint();
        assert!(max_abs(&(projector(&b) - want)) < 1e-10);
    }
}

#[test]
fn states_and_unitaries() {
    let m = MajoranaSet::new(4).unwrap();
    let odd = ParitySector::new(&m, -1).unwrap();
    let v = m.creation(0) * m.vacuum();
    let s = StateVector::in_sector(v.clone(), &odd).unwrap();
    assert!((vec_norm(s.amplitudes()) - 1.0).abs() < 1e-12);
    assert!(StateVector::in_sector(m.vacuum(), &odd).is_err());
    assert!(StateVector::new(v * re(2.0)).is_err());

    let u = UnitaryMatrix::new(exp_involution(&pauli_x(), 0.3)).unwrap();
    assert!(unitarity_defect(u.compose(&u.adjoint()).matrix()) < 1e-14);
    assert!(u.pow(4).distance(&exp_involution(&pauli_x(), 1.2)) < 1e-12);
    assert!(UnitaryMatrix::new(pauli_x() * re(2.0)).is_err());
}

proptest! {
    #[test]
    fn quadratic_hamiltonians_are_hermitian_and_parity_preserving(
        coeffs in proptest::collection::vec(-2.0f64..2.0, 15),
    ) {
        let m = MajoranaSet::new(6).unwrap();
        let mut terms = Vec::new();
        let mut k = 0;
        for a in 0..6 {
            for b in a + 1..6 {
                terms.push((coeffs[k], a, b));
                k += 1;
            }
        }
        let h = m.quadratic(&terms);
        prop_assert!(is_hermitian(&h, 1e-13));
        prop_assert!(max_abs(&commutator(&h, &m.total_parity())) < 1e-12);
        let full = eigvalsh(&h);
        for parity in [1, -1] {
            let part = eigvalsh(&ParitySector::new(&m, parity).unwrap().restrict(&h).unwrap());
            prop_assert!(is_submultiset(&part, &full, 1e-10));
        }
    }
}
