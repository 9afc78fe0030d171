//! Small dense linear-algebra helpers shared by the other modules.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex;

pub type C = Complex<f64>;
pub type CMat = DMatrix<C>;
pub type CVec = DVector<C>;
pub type RMat = DMatrix<f64>;
pub type RVec = DVector<f64>;

pub fn c(re: f64, im: f64) -> C {
    Complex::new(re, im)
}

/// Kronecker product of complex matrices, row-major convention:
/// (A ⊗ B)[(i1*rb+i2),(j1*cb+j2)] = A[i1,j1]·B[i2,j2].
pub fn kron(a: &CMat, b: &CMat) -> CMat {
    a.kronecker(b)
}

/// Kronecker product of a list of matrices, left to right.
pub fn kron_all(ms: &[&CMat]) -> CMat {
    assert!(!ms.is_empty());
    let mut out = ms[0].clone();
    for m in &ms[1..] {
        out = out.kronecker(m);
    }
    out
}

/// Eigendecomposition of a Hermitian matrix: returns (eigenvalues ascending,
/// unitary of eigenvectors as columns).
pub fn hermitian_eigen(m: &CMat) -> (RVec, CMat) {
    let se = m.clone().symmetric_eigen();
    let mut idx: Vec<usize> = (0..se.eigenvalues.len()).collect();
    idx.sort_by(|&i, &j| se.eigenvalues[i].partial_cmp(&se.eigenvalues[j]).unwrap());
    let vals = RVec::from_iterator(idx.len(), idx.iter().map(|&i| se.eigenvalues[i]));
    let vecs = CMat::from_columns(
        &idx.iter()
            .map(|&i| se.eigenvectors.column(i).into_owned())
            .collect::<Vec<_>>(),
    );
    (vals, vecs)
}

/// Eigendecomposition of a real symmetric matrix.
pub fn symmetric_eigen(m: &RMat) -> (RVec, RMat) {
    let se = m.clone().symmetric_eigen();
    let mut idx: Vec<usize> = (0..se.eigenvalues.len()).collect();
    idx.sort_by(|&i, &j| se.eigenvalues[i].partial_cmp(&se.eigenvalues[j]).unwrap());
    let vals = RVec::from_iterator(idx.len(), idx.iter().map(|&i| se.eigenvalues[i]));
    let vecs = RMat::from_columns(
        &idx.iter()
            .map(|&i| se.eigenvectors.column(i).into_owned())
            .collect::<Vec<_>>(),
    );
    (vals, vecs)
}

/// Apply a real function to a Hermitian matrix through its spectrum.
pub fn hermitian_fn(m: &CMat, f: impl Fn(f64) -> f64) -> CMat {
    let (vals, q) = hermitian_eigen(m);
    let d = CMat::from_diagonal(&CVec::from_iterator(
        vals.len(),
        vals.iter().map(|&v| c(f(v), 0.0)),
    ));
    &q * d * q.adjoint()
}

/// exp(i s H) for Hermitian H.
pub fn exp_i_hermitian(h: &CMat, s: f64) -> CMat {
    let (vals, q) = hermitian_eigen(h);
    let d = CMat::from_diagonal(&CVec::from_iterator(
        vals.len(),
        vals.iter().map(|&v| c(0.0, s * v).exp()),
    ));
    &q * d * q.adjoint()
}

/// Apply a real function to a symmetric real matrix through its spectrum.
pub fn symmetric_fn(m: &RMat, f: impl Fn(f64) -> f64) -> RMat {
    let (vals, q) = symmetric_eigen(m);
    let d = RMat::from_diagonal(&RVec::from_iterator(
        vals.len(),
        vals.iter().map(|&v| f(v)),
    ));
    &q * d * q.transpose()
}

/// Spectral norm (largest singular value).
pub fn spectral_norm(m: &RMat) -> f64 {
    m.clone().svd(false, false).singular_values.max()
}

/// Frobenius / Schatten-2 norm.
pub fn frobenius_norm(m: &RMat) -> f64 {
    m.norm()
}

/// Promote a real matrix to complex.
pub fn to_complex(m: &RMat) -> CMat {
    CMat::from_fn(m.nrows(), m.ncols(), |i, j| c(m[(i, j)], 0.0))
}

/// Largest absolute entry, used for entrywise tolerance checks.
pub fn max_abs(m: &CMat) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

pub fn max_abs_real(m: &RMat) -> f64 {
    m.iter().map(|v| v.abs()).fold(0.0, f64::max)
}
