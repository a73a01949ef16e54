//! Dense complex linear-algebra helpers shared by the state, metric and
//! propagation modules.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type CMatrix = DMatrix<Complex64>;
pub type CVector = DVector<Complex64>;

pub(crate) const ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub(crate) const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Eigenvalues below this magnitude are treated as exact zeros when taking
/// matrix square roots of unit-trace operators.
pub(crate) const SQRT_CUTOFF: f64 = 1e-13;

/// Largest negative eigenvalue tolerated (and clamped) in a PSD operator.
pub(crate) const NEGATIVE_EIGEN_TOL: f64 = 1e-10;

/// Hermitian eigendecomposition with eigenvalues sorted ascending and the
/// eigenvector columns permuted to match.
pub fn hermitian_eigh(m: &CMatrix) -> Result<(Vec<f64>, CMatrix)> {
    let dim = m.nrows();
    if dim != m.ncols() {
        return Err(Error::DimensionMismatch {
            expected: dim,
            actual: m.ncols(),
        });
    }
    let eig = SymmetricEigen::try_new(m.clone(), f64::EPSILON, 10_000 * dim.max(1))
        .ok_or_else(|| Error::Eigensolver(format!("no convergence for {dim}x{dim} operator")))?;
    if eig.eigenvalues.iter().any(|v| !v.is_finite()) {
        return Err(Error::Eigensolver("non-finite eigenvalue".into()));
    }

    let mut order: Vec<usize> = (0..dim).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = CMatrix::from_fn(dim, dim, |r, c| eig.eigenvectors[(r, order[c])]);
    Ok((values, vectors))
}

/// `V diag(f(λ)) V†`.
pub fn spectral_apply(values: &[f64], vectors: &CMatrix, f: impl Fn(f64) -> Complex64) -> CMatrix {
    let mut scaled = vectors.clone();
    for (c, &v) in values.iter().enumerate() {
        let fv = f(v);
        for r in 0..scaled.nrows() {
            scaled[(r, c)] *= fv;
        }
    }
    scaled * vectors.adjoint()
}

/// Square root of a positive-semidefinite Hermitian operator. Eigenvalues in
/// `[-1e-10, 1e-13)` are set to zero; anything more negative is an error.
pub fn psd_sqrt(m: &CMatrix) -> Result<CMatrix> {
    let (values, vectors) = hermitian_eigh(m)?;
    check_psd(&values)?;
    Ok(spectral_apply(&values, &vectors, |v| {
        Complex64::new(if v < SQRT_CUTOFF { 0.0 } else { v.sqrt() }, 0.0)
    }))
}

pub(crate) fn check_psd(values: &[f64]) -> Result<()> {
    match values.iter().copied().find(|&v| v < -NEGATIVE_EIGEN_TOL) {
        Some(v) => Err(Error::Domain {
            what: "positive-semidefinite eigenvalue",
            value: v,
        }),
        None => Ok(()),
    }
}

/// `Tr(A B)` without forming the product.
pub fn trace_product(a: &CMatrix, b: &CMatrix) -> Complex64 {
    let n = a.nrows();
    let mut acc = ZERO;
    for i in 0..n {
        for j in 0..n {
            acc += a[(i, j)] * b[(j, i)];
        }
    }
    acc
}

pub fn frobenius_sq(a: &CMatrix) -> f64 {
    a.iter().map(|z| z.norm_sqr()).sum()
}

pub fn max_abs_diff(a: &CMatrix, b: &CMatrix) -> f64 {
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

/// Largest deviation from Hermiticity, `max |A_ij - conj(A_ji)|`.
pub fn hermiticity_defect(a: &CMatrix) -> f64 {
    let n = a.nrows();
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in i..n {
            worst = worst.max((a[(i, j)] - a[(j, i)].conj()).norm());
        }
    }
    worst
}

pub fn identity(dim: usize) -> CMatrix {
    CMatrix::identity(dim, dim)
}

/// `A B - B A`.
pub fn commutator(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a * b - b * a
}
