//! Majorana operators, parity sectors, states and unitaries.
//!
//! # Ordering convention
//!
//! A set of `2m` Majoranas acts on `m` fermion modes, one tensor factor each, with mode 0 the
//! most significant factor (leftmost in the Kronecker product). Mode `j` carries
//!
//! ```text
//! γ_{2j}   =  Z ⊗ … ⊗ Z ⊗ X ⊗ 1 ⊗ … ⊗ 1
//! γ_{2j+1} = -Z ⊗ … ⊗ Z ⊗ Y ⊗ 1 ⊗ … ⊗ 1
//! ```
//!
//! so that `c_j† = (γ_{2j} + iγ_{2j+1})/2` creates a fermion, the computational state `|0…0⟩` is
//! the vacuum, and `iγ_{2j}γ_{2j+1} = 1 - 2n_j`. The total parity is `Π_j iγ_{2j}γ_{2j+1}`.

use alloc::format;
use alloc::vec::Vec;

use crate::error::{bail, Result};
use crate::linalg::{self, CMat, CVec, C64, IM, ONE};

/// Hermitian, mutually anticommuting involutions γ_0 … γ_{2m-1}.
#[derive(Debug, Clone)]
pub struct MajoranaSet {
    gammas: Vec<CMat>,
}

/// Builds the Jordan-Wigner representation of `count` Majoranas.
pub fn build_majorana_set(count: usize) -> Result<MajoranaSet> {
    MajoranaSet::new(count)
}

impl MajoranaSet {
    pub fn new(count: usize) -> Result<Self> {
        if count == 0 || count % 2 != 0 {
            bail!(Argument, "Majorana count must be positive and even, got {count}");
        }
        if count > 24 {
            bail!(Argument, "{count} Majoranas exceed the dense-matrix budget");
        }
        let modes = count / 2;
        let x = linalg::pauli_x();
        let y = -linalg::pauli_y();
        let z = linalg::pauli_z();
        let id = linalg::identity(2);
        let mut gammas = Vec::with_capacity(count);
        for j in 0..modes {
            for local in [&x, &y] {
                let mut m = linalg::identity(1);
                for k in 0..modes {
                    let f = match k.cmp(&j) {
                        core::cmp::Ordering::Less => &z,
                        core::cmp::Ordering::Equal => local,
                        core::cmp::Ordering::Greater => &id,
                    };
                    m = linalg::kron(&m, f);
                }
                gammas.push(m);
            }
        }
        Ok(Self { gammas })
    }

    pub fn count(&self) -> usize {
        self.gammas.len()
    }

    pub fn modes(&self) -> usize {
        self.gammas.len() / 2
    }

    pub fn dim(&self) -> usize {
        1 << self.modes()
    }

    pub fn gamma(&self, i: usize) -> &CMat {
        &self.gammas[i]
    }

    pub fn gammas(&self) -> &[CMat] {
        &self.gammas
    }

    /// iγ_aγ_b.
    pub fn bilinear(&self, a: usize, b: usize) -> CMat {
        (&self.gammas[a] * &self.gammas[b]) * IM
    }

    /// Ordered product γ_{i_0} γ_{i_1} ….
    pub fn product(&self, indices: &[usize]) -> CMat {
        indices
            .iter()
            .fold(linalg::identity(self.dim()), |acc, &i| acc * &self.gammas[i])
    }

    /// Σ c · iγ_aγ_b over the given terms.
    pub fn quadratic(&self, terms: &[(f64, usize, usize)]) -> CMat {
        let mut h = CMat::zeros(self.dim(), self.dim());
        for &(c, a, b) in terms {
            h += self.bilinear(a, b) * linalg::re(c);
        }
        h
    }

    /// Π_j iγ_{2j}γ_{2j+1}.
    pub fn total_parity(&self) -> CMat {
        (0..self.modes()).fold(linalg::identity(self.dim()), |acc, j| {
            acc * self.bilinear(2 * j, 2 * j + 1)
        })
    }

    pub fn creation(&self, mode: usize) -> CMat {
        (&self.gammas[2 * mode] + &self.gammas[2 * mode + 1] * IM) * linalg::re(0.5)
    }

    pub fn annihilation(&self, mode: usize) -> CMat {
        self.creation(mode).adjoint()
    }

    pub fn vacuum(&self) -> CVec {
        let mut v = CVec::zeros(self.dim());
        v[0] = ONE;
        v
    }

    /// Standard pairing (γ_{2j}, γ_{2j+1}) of the Jordan-Wigner construction.
    pub fn standard_pairing(&self) -> Vec<(usize, usize)> {
        (0..self.modes()).map(|j| (2 * j, 2 * j + 1)).collect()
    }

    /// Maximal deviation from Hermiticity, γ² = 1 and {γ_i, γ_j} = 0.
    pub fn algebra_defect(&self) -> f64 {
        let n = self.count();
        let id = linalg::identity(self.dim());
        let mut worst: f64 = 0.0;
        for i in 0..n {
            let g = &self.gammas[i];
            worst = worst.max(linalg::max_abs(&(g - g.adjoint())));
            for j in i..n {
                let target = if i == j { &id * linalg::re(2.0) } else { CMat::zeros(self.dim(), self.dim()) };
                let ac = linalg::anticommutator(g, &self.gammas[j]);
                worst = worst.max(linalg::max_abs(&(ac - target)));
            }
        }
        worst
    }
}

/// Fixed-parity subspace of a [`MajoranaSet`].
#[derive(Debug, Clone)]
pub struct ParitySector {
    pairing: Vec<(usize, usize)>,
    parity: i8,
    parity_operator: CMat,
    basis: CMat,
    projector: CMat,
}

impl ParitySector {
    /// Sector of the total parity operator with eigenvalue `parity` under the standard pairing.
    ///
    /// Basis vectors are the computational states with matching occupation parity, in
    /// increasing index order.
    pub fn new(set: &MajoranaSet, parity: i8) -> Result<Self> {
        if parity != 1 && parity != -1 {
            bail!(Argument, "parity must be +1 or -1, got {parity}");
        }
        let dim = set.dim();
        let wanted = if parity == 1 { 0 } else { 1 };
        let states: Vec<usize> = (0..dim)
            .filter(|s| (s.count_ones() % 2) as usize == wanted)
            .collect();
        let mut basis = CMat::zeros(dim, states.len());
        for (col, &s) in states.iter().enumerate() {
            basis[(s, col)] = ONE;
        }
        let projector = linalg::projector(&basis);
        Ok(Self {
            pairing: set.standard_pairing(),
            parity,
            parity_operator: set.total_parity(),
            basis,
            projector,
        })
    }

    pub fn parity(&self) -> i8 {
        self.parity
    }

    pub fn pairing(&self) -> &[(usize, usize)] {
        &self.pairing
    }

    pub fn projector(&self) -> &CMat {
        &self.projector
    }

    pub fn parity_operator(&self) -> &CMat {
        &self.parity_operator
    }

    /// Isometry from the sector into the full space (columns are basis states).
    pub fn basis(&self) -> &CMat {
        &self.basis
    }

    pub fn dim(&self) -> usize {
        self.basis.ncols()
    }

    pub fn restrict(&self, h: &CMat) -> Result<CMat> {
        sector_restrict(h, self)
    }

    /// Restricts an operator without checking that it commutes with the parity.
    pub fn restrict_unchecked(&self, h: &CMat) -> CMat {
        self.basis.adjoint() * h * &self.basis
    }

    pub fn embed(&self, v: &CVec) -> CVec {
        &self.basis * v
    }

    pub fn restrict_vector(&self, v: &CVec) -> CVec {
        self.basis.adjoint() * v
    }
}

/// Restriction of `h` to the parity eigenspace of `sector`.
pub fn sector_restrict(h: &CMat, sector: &ParitySector) -> Result<CMat> {
    let full = sector.basis.nrows();
    if h.nrows() != full || h.ncols() != full {
        bail!(Argument, "operator is {}x{}, sector lives in dimension {full}", h.nrows(), h.ncols());
    }
    let defect = linalg::max_abs(&linalg::commutator(h, &sector.parity_operator));
    if defect > 1e-10 {
        bail!(Consistency, "operator does not commute with the total parity (defect {defect:.3e})");
    }
    Ok(sector.restrict_unchecked(h))
}

/// Default degeneracy tolerance: 1e-9 of the spectral range.
pub fn default_degeneracy_tol(values: &[f64]) -> f64 {
    match (values.first(), values.last()) {
        (Some(lo), Some(hi)) => 1e-9 * (hi - lo).abs(),
        _ => 0.0,
    }
}

/// Orthonormal basis (columns) of all eigenvectors within `tol` of the lowest eigenvalue.
pub fn ground_subspace(h: &CMat, degeneracy_tol: f64) -> CMat {
    let e = linalg::eigh(h);
    ground_from_eigen(&e, degeneracy_tol)
}

pub(crate) fn ground_from_eigen(e: &linalg::Eigen, tol: f64) -> CMat {
    let n = e.values.len();
    if n == 0 {
        return CMat::zeros(0, 0);
    }
    let e0 = e.values[0];
    let k = e.values.iter().take_while(|&&v| v - e0 <= tol).count();
    e.vectors.columns(0, k).into_owned()
}

/// Normalized state vector.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    amplitudes: CVec,
}

impl StateVector {
    /// Wraps a vector that is already unit-norm to 1e-12.
    pub fn new(amplitudes: CVec) -> Result<Self> {
        let n = linalg::vec_norm(&amplitudes);
        if (n - 1.0).abs() > 1e-12 {
            bail!(Argument, "state norm is {n}, expected 1");
        }
        Ok(Self { amplitudes })
    }

    /// Normalizes a nonzero vector.
    pub fn normalized(amplitudes: CVec) -> Result<Self> {
        let n = linalg::vec_norm(&amplitudes);
        if n < 1e-300 {
            bail!(Argument, "cannot normalize the zero vector");
        }
        Ok(Self {
            amplitudes: amplitudes / linalg::re(n),
        })
    }

    /// Checks that the state lies inside the sector's projector image.
    pub fn in_sector(amplitudes: CVec, sector: &ParitySector) -> Result<Self> {
        let s = Self::new(amplitudes)?;
        let outside = &s.amplitudes - sector.projector() * &s.amplitudes;
        let leak = linalg::vec_norm(&outside);
        if leak > 1e-12 {
            bail!(Consistency, "state has weight {leak:.3e} outside the parity sector");
        }
        Ok(s)
    }

    pub fn amplitudes(&self) -> &CVec {
        &self.amplitudes
    }

    pub fn into_inner(self) -> CVec {
        self.amplitudes
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn fidelity(&self, other: &StateVector) -> f64 {
        linalg::inner(&self.amplitudes, &other.amplitudes).norm_sqr()
    }
}

/// Square matrix with U†U = 1 to 1e-10.
#[derive(Debug, Clone, PartialEq)]
pub struct UnitaryMatrix {
    entries: CMat,
}

impl UnitaryMatrix {
    pub fn new(entries: CMat) -> Result<Self> {
        if !entries.is_square() {
            bail!(Argument, "unitary must be square, got {}x{}", entries.nrows(), entries.ncols());
        }
        let d = linalg::unitarity_defect(&entries);
        if d > 1e-10 {
            bail!(Consistency, "matrix is not unitary (defect {d:.3e})");
        }
        Ok(Self { entries })
    }

    /// Closest unitary (polar factor) of an invertible matrix.
    pub fn polar(m: &CMat) -> Result<Self> {
        Self::new(linalg::polar_unitary(m))
    }

    pub fn identity(n: usize) -> Self {
        Self {
            entries: linalg::identity(n),
        }
    }

    pub fn matrix(&self) -> &CMat {
        &self.entries
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn adjoint(&self) -> Self {
        Self {
            entries: self.entries.adjoint(),
        }
    }

    pub fn compose(&self, after: &UnitaryMatrix) -> Self {
        Self {
            entries: &after.entries * &self.entries,
        }
    }

    pub fn pow(&self, n: u32) -> Self {
        Self {
            entries: linalg::matrix_power(&self.entries, n),
        }
    }

    /// Spectral-norm distance modulo a global phase.
    pub fn distance(&self, other: &CMat) -> f64 {
        linalg::phase_distance(&self.entries, other)
    }

    pub fn apply(&self, v: &CVec) -> CVec {
        &self.entries * v
    }
}

impl core::fmt::Display for UnitaryMatrix {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        for i in 0..self.entries.nrows() {
            let row: Vec<_> = (0..self.entries.ncols())
                .map(|j| {
                    let z: C64 = self.entries[(i, j)];
                    format!("{:+.6}{:+.6}i", z.re, z.im)
                })
                .collect();
            writeln!(f, "[{}]", row.join(", "))?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::max_abs;

    #[test]
    fn rejects_odd_counts() {
        assert!(MajoranaSet::new(3).is_err());
        assert!(MajoranaSet::new(0).is_err());
    }

    #[test]
    fn two_majoranas_are_pauli_matrices() {
        let s = MajoranaSet::new(2).unwrap();
        assert_eq!(s.dim(), 2);
        assert!(s.algebra_defect() < 1e-12);
    }

    #[test]
    fn six_majoranas_satisfy_clifford_algebra() {
        let s = MajoranaSet::new(6).unwrap();
        assert!(s.algebra_defect() < 1e-12);
    }

    #[test]
    fn creation_operator_fills_mode() {
        let s = MajoranaSet::new(4).unwrap();
        let c0 = s.creation(0);
        let n0 = &c0 * s.annihilation(0);
        let expected = (linalg::identity(4) - s.bilinear(0, 1)) * linalg::re(0.5);
        assert!(max_abs(&(n0 - expected)) < 1e-14);
        let one = &c0 * s.vacuum();
        assert!((one[2].re - 1.0).abs() < 1e-14);
    }

    #[test]
    fn parity_of_vacuum_is_even() {
        let s = MajoranaSet::new(6).unwrap();
        let v = s.vacuum();
        let p = s.total_parity() * &v;
        assert!((p[0].re - 1.0).abs() < 1e-14);
    }

    #[test]
    fn identity_restricts_to_identity() {
        let s = MajoranaSet::new(6).unwrap();
        for parity in [1, -1] {
            let sec = ParitySector::new(&s, parity).unwrap();
            let r = sector_restrict(&linalg::identity(8), &sec).unwrap();
            assert!(max_abs(&(r - linalg::identity(4))) < 1e-15);
        }
    }

    #[test]
    fn single_pair_parity_in_even_sector() {
        let s = MajoranaSet::new(2).unwrap();
        let sec = ParitySector::new(&s, 1).unwrap();
        let r = sec.restrict(&s.bilinear(0, 1)).unwrap();
        assert_eq!(r.nrows(), 1);
        assert!((r[(0, 0)].re - 1.0).abs() < 1e-15);
    }

    #[test]
    fn odd_operator_is_rejected() {
        let s = MajoranaSet::new(4).unwrap();
        let sec = ParitySector::new(&s, 1).unwrap();
        assert!(sec.restrict(s.gamma(0)).is_err());
    }

    #[test]
    fn ground_subspace_of_diagonal() {
        let h = CMat::from_diagonal(&CVec::from_vec(alloc::vec![
            linalg::re(0.0),
            linalg::re(0.0),
            linalg::re(5.0),
            linalg::re(5.0)
        ]));
        assert_eq!(ground_subspace(&h, 1e-6).ncols(), 2);
    }

    #[test]
    fn unitary_rejects_non_unitary() {
        let m = linalg::identity(2) * linalg::re(2.0);
        assert!(UnitaryMatrix::new(m).is_err());
    }
}
