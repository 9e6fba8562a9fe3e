//! Dense complex linear algebra helpers on top of nalgebra.

use alloc::vec::Vec;
use nalgebra::{DMatrix, DVector};

pub use num_complex::Complex64 as C64;

pub type CMat = DMatrix<C64>;
pub type CVec = DVector<C64>;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);
pub const IM: C64 = C64::new(0.0, 1.0);

#[inline]
pub fn re(x: f64) -> C64 {
    C64::new(x, 0.0)
}

/// Eigen-decomposition of a Hermitian matrix with eigenvalues in ascending order.
#[derive(Debug, Clone)]
pub struct Eigen {
    pub values: Vec<f64>,
    /// Eigenvectors as columns, in the same order as `values`.
    pub vectors: CMat,
}

pub fn hermitian_part(h: &CMat) -> CMat {
    (h + h.adjoint()) * re(0.5)
}

pub fn eigh(h: &CMat) -> Eigen {
    let n = h.nrows();
    let se = hermitian_part(h).symmetric_eigen();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| se.eigenvalues[a].total_cmp(&se.eigenvalues[b]));
    let values = order.iter().map(|&i| se.eigenvalues[i]).collect();
    let mut vectors = CMat::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        vectors.set_column(dst, &se.eigenvectors.column(src));
    }
    Eigen { values, vectors }
}

pub fn eigvalsh(h: &CMat) -> Vec<f64> {
    eigh(h).values
}

/// Applies a real function to the spectrum of a Hermitian matrix.
pub fn hermitian_map(h: &CMat, f: impl Fn(f64) -> C64) -> CMat {
    let e = eigh(h);
    let d = CVec::from_iterator(e.values.len(), e.values.iter().map(|&v| f(v)));
    let scaled = &e.vectors * CMat::from_diagonal(&d);
    scaled * e.vectors.adjoint()
}

/// exp(-i t H) for Hermitian H.
pub fn expm_herm(h: &CMat, t: f64) -> CMat {
    hermitian_map(h, |v| C64::from_polar(1.0, -v * t))
}

/// Spectral norm.
pub fn op_norm(m: &CMat) -> f64 {
    if m.is_empty() {
        return 0.0;
    }
    let g = m.adjoint() * m;
    let top = eigvalsh(&g).last().copied().unwrap_or(0.0);
    libm::sqrt(top.max(0.0))
}

pub fn frobenius(m: &CMat) -> f64 {
    libm::sqrt(m.iter().map(|z| z.norm_sqr()).sum::<f64>())
}

pub fn max_abs(m: &CMat) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

pub fn identity(n: usize) -> CMat {
    CMat::identity(n, n)
}

pub fn kron(a: &CMat, b: &CMat) -> CMat {
    a.kronecker(b)
}

pub fn commutator(a: &CMat, b: &CMat) -> CMat {
    a * b - b * a
}

pub fn anticommutator(a: &CMat, b: &CMat) -> CMat {
    a * b + b * a
}

pub fn is_hermitian(m: &CMat, tol: f64) -> bool {
    m.is_square() && max_abs(&(m - m.adjoint())) <= tol
}

pub fn unitarity_defect(m: &CMat) -> f64 {
    op_norm(&(m.adjoint() * m - identity(m.ncols())))
}

/// Phase e^{iθ} maximizing Re tr(e^{-iθ} b† a), i.e. the best global phase aligning `b` to `a`.
pub fn optimal_phase(a: &CMat, b: &CMat) -> C64 {
    let t: C64 = b.iter().zip(a.iter()).map(|(x, y)| x.conj() * y).sum();
    if t.norm() < 1e-300 {
        ONE
    } else {
        t / t.norm()
    }
}

/// min over θ of ‖a - e^{iθ} b‖, evaluated in spectral norm at the Frobenius-optimal phase.
pub fn phase_distance(a: &CMat, b: &CMat) -> f64 {
    let ph = optimal_phase(a, b);
    op_norm(&(a - b * ph))
}

/// Unitary polar factor W (W†W)^{-1/2}.
pub fn polar_unitary(w: &CMat) -> CMat {
    let g = w.adjoint() * w;
    let inv_sqrt = hermitian_map(&g, |v| re(1.0 / libm::sqrt(v.max(1e-300))));
    w * inv_sqrt
}

/// Orthonormal basis for the column span, via the polar factor (columns must be independent).
pub fn orthonormalize(cols: &CMat) -> CMat {
    polar_unitary(cols)
}

pub fn projector(basis: &CMat) -> CMat {
    basis * basis.adjoint()
}

pub fn vec_norm(v: &CVec) -> f64 {
    libm::sqrt(v.iter().map(|z| z.norm_sqr()).sum::<f64>())
}

pub fn inner(a: &CVec, b: &CVec) -> C64 {
    a.iter().zip(b.iter()).map(|(x, y)| x.conj() * y).sum()
}

/// 1 - |⟨a|b⟩|² for unit vectors, i.e. infidelity modulo global phase.
pub fn state_infidelity(a: &CVec, b: &CVec) -> f64 {
    let na = vec_norm(a);
    let nb = vec_norm(b);
    1.0 - inner(a, b).norm_sqr() / (na * na * nb * nb)
}

pub fn from_rows(rows: &[&[C64]]) -> CMat {
    let n = rows.len();
    let m = rows.first().map_or(0, |r| r.len());
    CMat::from_fn(n, m, |i, j| rows[i][j])
}

pub fn pauli_x() -> CMat {
    from_rows(&[&[ZERO, ONE], &[ONE, ZERO]])
}

pub fn pauli_y() -> CMat {
    from_rows(&[&[ZERO, -IM], &[IM, ZERO]])
}

pub fn pauli_z() -> CMat {
    from_rows(&[&[ONE, ZERO], &[ZERO, -ONE]])
}

/// exp(i θ P) for an involution P (P² = 1).
pub fn exp_involution(p: &CMat, theta: f64) -> CMat {
    identity(p.nrows()) * re(libm::cos(theta)) + p * C64::new(0.0, libm::sin(theta))
}

/// Matrix power by repeated squaring.
pub fn matrix_power(m: &CMat, mut n: u32) -> CMat {
    let mut result = identity(m.nrows());
    let mut base = m.clone();
    while n > 0 {
        if n & 1 == 1 {
            result = &result * &base;
        }
        base = &base * &base;
        n >>= 1;
    }
    result
}
