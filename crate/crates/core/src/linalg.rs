//! Small dense-linear-algebra helpers shared across the crate.
//!
//! Everything here is a thin, deterministic wrapper around `nalgebra`:
//! Pauli-matrix constants in the two bases used by the crate, Hermitian
//! eigendecompositions with a fixed ordering convention, and the positive
//! square root needed by the Wootters concurrence.
//!
//! # Ordering convention
//!
//! Eigenvalues are always reported in *descending* order; ties are broken by
//! the original index returned by the factorization, so repeated runs on the
//! same input produce bit-identical output.

use nalgebra::{Matrix2, Matrix3, Matrix4, Vector3};
use num_complex::Complex64;

/// Shorthand complex constructor.
#[inline]
pub fn c64(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// The standard Pauli matrices `(σx, σy, σz)` in the conventional spin basis
/// whose first element is the spin-*up* eigenstate of `σz`.
pub fn pauli_spin() -> [Matrix2<Complex64>; 3] {
    [
        Matrix2::new(c64(0.0, 0.0), c64(1.0, 0.0), c64(1.0, 0.0), c64(0.0, 0.0)),
        Matrix2::new(c64(0.0, 0.0), c64(0.0, -1.0), c64(0.0, 1.0), c64(0.0, 0.0)),
        Matrix2::new(c64(1.0, 0.0), c64(0.0, 0.0), c64(0.0, 0.0), c64(-1.0, 0.0)),
    ]
}

/// The Pauli matrices expressed in the helicity-label basis `(R, L)` used for
/// all stored two-qubit matrices, where `R` is the spin-*down* eigenstate of
/// the triad z-axis (see the `state` module docs).
///
/// These are the standard matrices conjugated by the basis swap
/// `X = [[0,1],[1,0]]`; they satisfy the same su(2) algebra
/// `σ̃x σ̃y = i σ̃z` (cyclic), so every Pauli-basis identity holds verbatim.
pub fn pauli_helicity() -> [Matrix2<Complex64>; 3] {
    [
        Matrix2::new(c64(0.0, 0.0), c64(1.0, 0.0), c64(1.0, 0.0), c64(0.0, 0.0)),
        Matrix2::new(c64(0.0, 0.0), c64(0.0, 1.0), c64(0.0, -1.0), c64(0.0, 0.0)),
        Matrix2::new(c64(-1.0, 0.0), c64(0.0, 0.0), c64(0.0, 0.0), c64(1.0, 0.0)),
    ]
}

/// 2×2 identity over `Complex64`.
pub fn identity2() -> Matrix2<Complex64> {
    Matrix2::identity()
}

/// Contraction `n · σ` of a real direction with a Pauli triple.
pub fn dot_pauli(n: &Vector3<f64>, pauli: &[Matrix2<Complex64>; 3]) -> Matrix2<Complex64> {
    pauli[0] * c64(n.x, 0.0) + pauli[1] * c64(n.y, 0.0) + pauli[2] * c64(n.z, 0.0)
}

/// Largest entrywise deviation from Hermiticity, `max |m_ij - conj(m_ji)|`.
pub fn hermiticity_defect(m: &Matrix4<Complex64>) -> f64 {
    let mut defect: f64 = 0.0;
    for i in 0..4 {
        for j in 0..4 {
            defect = defect.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    defect
}

/// Hermitian part `(m + m†)/2`.
pub fn hermitize(m: &Matrix4<Complex64>) -> Matrix4<Complex64> {
    (m + m.adjoint()) * c64(0.5, 0.0)
}

/// Largest entrywise absolute difference between two complex matrices.
pub fn max_abs_diff(a: &Matrix4<Complex64>, b: &Matrix4<Complex64>) -> f64 {
    let mut d: f64 = 0.0;
    for i in 0..4 {
        for j in 0..4 {
            d = d.max((a[(i, j)] - b[(i, j)]).norm());
        }
    }
    d
}

/// Frobenius distance `||a - b||_F` between two complex matrices.
pub fn frobenius_distance(a: &Matrix4<Complex64>, b: &Matrix4<Complex64>) -> f64 {
    let mut sum = 0.0;
    for i in 0..4 {
        for j in 0..4 {
            sum += (a[(i, j)] - b[(i, j)]).norm_sqr();
        }
    }
    sum.sqrt()
}

/// Eigendecomposition of a Hermitian 4×4 matrix with eigenvalues sorted
/// descending (ties broken by original index). Returns `(values, vectors)`
/// with eigenvector `k` in column `k`.
///
/// The input is symmetrized before factorization so that callers holding a
/// matrix that is Hermitian only up to rounding get a well-posed problem.
pub fn hermitian_eigen_desc(m: &Matrix4<Complex64>) -> ([f64; 4], Matrix4<Complex64>) {
    let eig = nalgebra::SymmetricEigen::new(hermitize(m));
    let mut order: [usize; 4] = [0, 1, 2, 3];
    order.sort_by(|&a, &b| {
        eig.eigenvalues[b]
            .partial_cmp(&eig.eigenvalues[a])
            .expect("eigenvalues of a Hermitian matrix are finite")
            .then(a.cmp(&b))
    });
    let mut values = [0.0; 4];
    let mut vectors = Matrix4::zeros();
    for (slot, &k) in order.iter().enumerate() {
        values[slot] = eig.eigenvalues[k];
        vectors.set_column(slot, &eig.eigenvectors.column(k));
    }
    (values, vectors)
}

/// Eigendecomposition of a symmetric real 3×3 matrix, eigenvalues sorted
/// descending with index tie-breaking. Returns `(values, vectors)` with
/// eigenvector `k` in column `k`.
pub fn symmetric_eigen3_desc(m: &Matrix3<f64>) -> ([f64; 3], Matrix3<f64>) {
    let sym = (m + m.transpose()) * 0.5;
    let eig = nalgebra::SymmetricEigen::new(sym);
    let mut order: [usize; 3] = [0, 1, 2];
    order.sort_by(|&a, &b| {
        eig.eigenvalues[b]
            .partial_cmp(&eig.eigenvalues[a])
            .expect("eigenvalues of a symmetric matrix are finite")
            .then(a.cmp(&b))
    });
    let mut values = [0.0; 3];
    let mut vectors = Matrix3::zeros();
    for (slot, &k) in order.iter().enumerate() {
        values[slot] = eig.eigenvalues[k];
        vectors.set_column(slot, &eig.eigenvectors.column(k));
    }
    (values, vectors)
}

/// Positive square root of a Hermitian positive-semidefinite matrix.
/// Eigenvalues that dip below zero by rounding are clamped to zero.
pub fn psd_sqrt(m: &Matrix4<Complex64>) -> Matrix4<Complex64> {
    let (values, vectors) = hermitian_eigen_desc(m);
    let mut out = Matrix4::zeros();
    for (k, value) in values.iter().enumerate() {
        let lambda = value.max(0.0).sqrt();
        let col = vectors.column(k);
        // out += sqrt(lambda) * |v_k><v_k|
        for i in 0..4 {
            for j in 0..4 {
                out[(i, j)] += col[i] * col[j].conj() * c64(lambda, 0.0);
            }
        }
    }
    out
}
