//! Pure states and density operators of N-qubit registers.
//!
//! Basis convention: qubit 0 is the most significant bit, so basis index `b`
//! encodes `|b_0 b_1 ... b_{N-1}>`. Every builder in the crate uses it.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix, CVector, ONE, ZERO};

/// Largest register handled by the dense representation (dimension 4096).
pub const MAX_QUBITS: usize = 12;

pub(crate) const NORM_TOL: f64 = 1e-12;
pub(crate) const HERMITIAN_TOL: f64 = 1e-12;
pub(crate) const TRACE_TOL: f64 = 1e-12;

fn check_register(n: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::InvalidRegister(
            "register needs at least one qubit".into(),
        ));
    }
    if n > MAX_QUBITS {
        return Err(Error::InvalidRegister(format!(
            "{n} qubits exceeds the dense limit of {MAX_QUBITS}"
        )));
    }
    Ok(())
}

/// Value (0 or 1) of `qubit` in basis index `index` of an `n`-qubit register.
#[inline]
pub fn bit_of(index: usize, qubit: usize, n: usize) -> usize {
    (index >> (n - 1 - qubit)) & 1
}

/// A normalized pure state of an N-qubit register.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    n_qubits: usize,
    amplitudes: CVector,
}

impl StateVector {
    /// Validates length and normalization (within 1e-12).
    pub fn new(n_qubits: usize, amplitudes: Vec<Complex64>) -> Result<Self> {
        check_register(n_qubits)?;
        let dim = 1usize << n_qubits;
        if amplitudes.len() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                actual: amplitudes.len(),
            });
        }
        let state = Self {
            n_qubits,
            amplitudes: CVector::from_vec(amplitudes),
        };
        let norm = state.norm_sqr();
        if (norm - 1.0).abs() > NORM_TOL {
            return Err(Error::NotNormalized(norm));
        }
        Ok(state)
    }

    /// Rescales arbitrary nonzero amplitudes to unit norm.
    pub fn normalized(n_qubits: usize, amplitudes: Vec<Complex64>) -> Result<Self> {
        check_register(n_qubits)?;
        let dim = 1usize << n_qubits;
        if amplitudes.len() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                actual: amplitudes.len(),
            });
        }
        let v = CVector::from_vec(amplitudes);
        let norm = v.norm();
        if !(norm.is_finite() && norm > 0.0) {
            return Err(Error::NotNormalized(norm * norm));
        }
        Ok(Self::from_raw(n_qubits, v.unscale(norm)))
    }

    pub(crate) fn from_raw(n_qubits: usize, amplitudes: CVector) -> Self {
        debug_assert_eq!(amplitudes.len(), 1 << n_qubits);
        Self {
            n_qubits,
            amplitudes,
        }
    }

    /// Computational basis state `|index>`.
    pub fn basis(n_qubits: usize, index: usize) -> Result<Self> {
        check_register(n_qubits)?;
        let dim = 1usize << n_qubits;
        if index >= dim {
            return Err(Error::InvalidArgument(format!(
                "basis index {index} out of range for dimension {dim}"
            )));
        }
        let mut v = CVector::zeros(dim);
        v[index] = ONE;
        Ok(Self::from_raw(n_qubits, v))
    }

    /// `(|0...0> + |1...1>)/sqrt(2)`.
    pub fn ghz(n_qubits: usize) -> Result<Self> {
        check_register(n_qubits)?;
        let dim = 1usize << n_qubits;
        let mut v = CVector::zeros(dim);
        let a = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        v[0] = a;
        v[dim - 1] = a;
        Ok(Self::from_raw(n_qubits, v))
    }

    /// Equal superposition of all single-excitation basis states.
    pub fn w(n_qubits: usize) -> Result<Self> {
        check_register(n_qubits)?;
        let dim = 1usize << n_qubits;
        let mut v = CVector::zeros(dim);
        let a = Complex64::new(1.0 / (n_qubits as f64).sqrt(), 0.0);
        for q in 0..n_qubits {
            v[1 << q] = a;
        }
        Ok(Self::from_raw(n_qubits, v))
    }

    /// Haar-random state (normalized complex Gaussian vector).
    pub fn random<R: Rng + ?Sized>(n_qubits: usize, rng: &mut R) -> Result<Self> {
        check_register(n_qubits)?;
        let dim = 1usize << n_qubits;
        let amps = (0..dim)
            .map(|_| Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
            .collect();
        Self::normalized(n_qubits, amps)
    }

    /// Tensor product of one normalized 2-vector per qubit, qubit 0 first.
    pub fn product_of(sites: &[[Complex64; 2]]) -> Result<Self> {
        check_register(sites.len())?;
        let n = sites.len();
        let dim = 1usize << n;
        let v = CVector::from_fn(dim, |b, _| {
            sites
                .iter()
                .enumerate()
                .fold(ONE, |acc, (q, site)| acc * site[bit_of(b, q, n)])
        });
        let norm = v.norm_squared();
        if (norm - 1.0).abs() > NORM_TOL {
            return Err(Error::NotNormalized(norm));
        }
        Ok(Self::from_raw(n, v))
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &CVector {
        &self.amplitudes
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.norm_squared()
    }

    /// `<self|other>`.
    pub fn inner(&self, other: &StateVector) -> Result<Complex64> {
        self.check_same_dim(other)?;
        Ok(self.amplitudes.dotc(&other.amplitudes))
    }

    pub(crate) fn check_same_dim(&self, other: &StateVector) -> Result<()> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                actual: other.dim(),
            });
        }
        Ok(())
    }

    /// Applies a 2x2 operator (row-major) to one qubit. The caller is
    /// responsible for unitarity; the result is renormalized.
    pub fn apply_single_qubit(&self, qubit: usize, op: &[[Complex64; 2]; 2]) -> Result<Self> {
        if qubit >= self.n_qubits {
            return Err(Error::InvalidArgument(format!(
                "qubit {qubit} outside {}-qubit register",
                self.n_qubits
            )));
        }
        let n = self.n_qubits;
        let stride = 1usize << (n - 1 - qubit);
        let mut out = self.amplitudes.clone();
        for b in 0..self.dim() {
            if b & stride == 0 {
                let a0 = self.amplitudes[b];
                let a1 = self.amplitudes[b | stride];
                out[b] = op[0][0] * a0 + op[0][1] * a1;
                out[b | stride] = op[1][0] * a0 + op[1][1] * a1;
            }
        }
        let norm = out.norm();
        Ok(Self::from_raw(n, out.unscale(norm)))
    }

    /// Multiplies every amplitude by `e^{i alpha}`.
    pub fn with_global_phase(&self, alpha: f64) -> Self {
        Self::from_raw(
            self.n_qubits,
            self.amplitudes
                .map(|a| a * Complex64::from_polar(1.0, alpha)),
        )
    }
}

/// `|phi>^{(x) n}` with `|phi> = cos(theta)|0> + e^{-i phi} sin(theta)|1>`.
pub fn product_state(theta: f64, phi: f64, n: usize) -> Result<StateVector> {
    check_register(n)?;
    if !theta.is_finite() || !phi.is_finite() {
        return Err(Error::InvalidArgument("non-finite state angle".into()));
    }
    let site = [
        Complex64::new(theta.cos(), 0.0),
        Complex64::from_polar(theta.sin(), -phi),
    ];
    StateVector::product_of(&vec![site; n])
}

/// Kronecker product; `a` occupies the leading (most significant) qubits.
pub fn tensor(a: &StateVector, b: &StateVector) -> Result<StateVector> {
    let n = a.n_qubits + b.n_qubits;
    check_register(n)?;
    let db = b.dim();
    let v = CVector::from_fn(a.dim() * db, |i, _| {
        a.amplitudes[i / db] * b.amplitudes[i % db]
    });
    Ok(StateVector::from_raw(n, v))
}

/// Hermitian, unit-trace, positive-semidefinite operator on an N-qubit register.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityOperator {
    n_qubits: usize,
    matrix: CMatrix,
}

impl DensityOperator {
    /// Validates Hermiticity (1e-12), unit trace (1e-12) and eigenvalues ≥ -1e-10.
    pub fn new(n_qubits: usize, matrix: CMatrix) -> Result<Self> {
        check_register(n_qubits)?;
        let dim = 1usize << n_qubits;
        if matrix.nrows() != dim || matrix.ncols() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                actual: matrix.nrows().max(matrix.ncols()),
            });
        }
        let herm = linalg::hermiticity_defect(&matrix);
        if herm > HERMITIAN_TOL {
            return Err(Error::InvalidDensity(format!(
                "not Hermitian (defect {herm:e})"
            )));
        }
        let tr = matrix.trace();
        if (tr.re - 1.0).abs() > TRACE_TOL || tr.im.abs() > TRACE_TOL {
            return Err(Error::InvalidDensity(format!("trace {tr} is not 1")));
        }
        let (vals, _) = linalg::hermitian_eigh(&matrix)?;
        if let Some(&v) = vals.first() {
            if v < -linalg::NEGATIVE_EIGEN_TOL {
                return Err(Error::InvalidDensity(format!("negative eigenvalue {v:e}")));
            }
        }
        Ok(Self { n_qubits, matrix })
    }

    pub(crate) fn from_raw(n_qubits: usize, matrix: CMatrix) -> Self {
        Self { n_qubits, matrix }
    }

    pub fn maximally_mixed(n_qubits: usize) -> Result<Self> {
        check_register(n_qubits)?;
        let dim = 1usize << n_qubits;
        Ok(Self::from_raw(
            n_qubits,
            linalg::identity(dim).unscale(dim as f64),
        ))
    }

    /// Normalized `A A†` for a complex Gaussian `A` (full rank almost surely).
    pub fn random<R: Rng + ?Sized>(n_qubits: usize, rng: &mut R) -> Result<Self> {
        check_register(n_qubits)?;
        let dim = 1usize << n_qubits;
        let a = CMatrix::from_fn(dim, dim, |_, _| {
            Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
        });
        let m = &a * a.adjoint();
        let tr = m.trace().re;
        let mut m = m.unscale(tr);
        symmetrize(&mut m);
        Ok(Self::from_raw(n_qubits, m))
    }

    /// `(1 - p) rho + p I/d`, the depolarizing channel.
    pub fn depolarized(&self, p: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::Domain {
                what: "depolarizing probability",
                value: p,
            });
        }
        let dim = self.dim();
        let m = self.matrix.scale(1.0 - p) + linalg::identity(dim).scale(p / dim as f64);
        Ok(Self::from_raw(self.n_qubits, m))
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    /// `Tr rho^2`.
    pub fn purity(&self) -> f64 {
        linalg::frobenius_sq(&self.matrix)
    }

    pub fn eigenvalues(&self) -> Result<Vec<f64>> {
        Ok(linalg::hermitian_eigh(&self.matrix)?.0)
    }

    /// `<psi|rho|psi>`.
    pub fn expectation(&self, psi: &StateVector) -> Result<f64> {
        if psi.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                actual: psi.dim(),
            });
        }
        Ok(psi.amplitudes().dotc(&(&self.matrix * psi.amplitudes())).re)
    }

    pub(crate) fn check_same_dim(&self, other: &DensityOperator) -> Result<()> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                actual: other.dim(),
            });
        }
        Ok(())
    }
}

/// Replaces `m` by `(m + m†)/2`.
pub(crate) fn symmetrize(m: &mut CMatrix) {
    let h = (&*m + m.adjoint()).unscale(2.0);
    *m = h;
}

/// `|psi><psi|`.
pub fn density_from_pure(psi: &StateVector) -> DensityOperator {
    let a = psi.amplitudes();
    DensityOperator::from_raw(psi.n_qubits(), a * a.adjoint())
}

/// Reduced operator on the `keep` qubits; kept qubits retain their relative order.
pub fn partial_trace(rho: &DensityOperator, keep: &[usize]) -> Result<DensityOperator> {
    let n = rho.n_qubits();
    let keep = normalize_index_set(keep, n)?;
    if keep.is_empty() {
        return Err(Error::InvalidArgument(
            "partial trace needs a nonempty keep set".into(),
        ));
    }
    let traced: Vec<usize> = (0..n).filter(|q| !keep.contains(q)).collect();
    let k = keep.len();
    let dim = rho.dim();
    let sub = |b: usize, set: &[usize]| {
        set.iter()
            .fold(0usize, |acc, &q| (acc << 1) | bit_of(b, q, n))
    };
    let mut out = CMatrix::from_element(1 << k, 1 << k, ZERO);
    for i in 0..dim {
        let ti = sub(i, &traced);
        let ki = sub(i, &keep);
        for j in 0..dim {
            if sub(j, &traced) == ti {
                out[(ki, sub(j, &keep))] += rho.matrix()[(i, j)];
            }
        }
    }
    Ok(DensityOperator::from_raw(k, out))
}

fn normalize_index_set(set: &[usize], n: usize) -> Result<Vec<usize>> {
    let mut v = set.to_vec();
    v.sort_unstable();
    v.dedup();
    if v.len() != set.len() {
        return Err(Error::InvalidArgument("duplicate qubit index".into()));
    }
    if let Some(&q) = v.iter().find(|&&q| q >= n) {
        return Err(Error::InvalidArgument(format!(
            "qubit {q} outside {n}-qubit register"
        )));
    }
    Ok(v)
}

/// A split of the register into two nonempty complementary sides.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Bipartition {
    left: Vec<usize>,
    right: Vec<usize>,
}

impl Bipartition {
    pub fn new(n_qubits: usize, left: &[usize]) -> Result<Self> {
        let left = normalize_index_set(left, n_qubits)
            .map_err(|e| Error::InvalidBipartition(e.to_string()))?;
        if left.is_empty() || left.len() == n_qubits {
            return Err(Error::InvalidBipartition(
                "both sides must be nonempty".into(),
            ));
        }
        let right = (0..n_qubits).filter(|q| !left.contains(q)).collect();
        Ok(Self { left, right })
    }

    /// The `2^{N-1} - 1` distinct cuts; the last qubit always sits on the right.
    pub fn all(n_qubits: usize) -> Result<Vec<Self>> {
        if n_qubits < 2 {
            return Err(Error::InvalidRegister(
                "bipartitions need at least two qubits".into(),
            ));
        }
        check_register(n_qubits)?;
        Ok((1usize..(1 << (n_qubits - 1)))
            .map(|mask| {
                let left: Vec<usize> = (0..n_qubits).filter(|q| mask >> q & 1 == 1).collect();
                let right = (0..n_qubits).filter(|q| mask >> q & 1 == 0).collect();
                Self { left, right }
            })
            .collect())
    }

    pub fn left(&self) -> &[usize] {
        &self.left
    }

    pub fn right(&self) -> &[usize] {
        &self.right
    }

    pub fn n_qubits(&self) -> usize {
        self.left.len() + self.right.len()
    }
}

/// Amplitudes of `psi` arranged as a `2^|left| x 2^|right|` matrix.
pub(crate) fn coefficient_matrix(psi: &StateVector, cut: &Bipartition) -> CMatrix {
    let n = psi.n_qubits();
    let mut m = CMatrix::from_element(1 << cut.left.len(), 1 << cut.right.len(), ZERO);
    for b in 0..psi.dim() {
        let (l, r) = split_index(b, cut, n);
        m[(l, r)] = psi.amplitudes()[b];
    }
    m
}

fn split_index(b: usize, cut: &Bipartition, n: usize) -> (usize, usize) {
    let l = cut
        .left
        .iter()
        .fold(0, |acc, &q| (acc << 1) | bit_of(b, q, n));
    let r = cut
        .right
        .iter()
        .fold(0, |acc, &q| (acc << 1) | bit_of(b, q, n));
    (l, r)
}

/// Inverse of [`coefficient_matrix`] for the rank-one matrix `u v^T`.
pub(crate) fn from_cut_product(u: &CVector, v: &CVector, cut: &Bipartition) -> StateVector {
    let n = cut.n_qubits();
    let amps = CVector::from_fn(1 << n, |b, _| {
        let (l, r) = split_index(b, cut, n);
        u[l] * v[r]
    });
    StateVector::from_raw(n, amps)
}

/// Dominant Schmidt component across one cut.
#[derive(Debug, Clone)]
pub(crate) struct TopSchmidt {
    /// Sum of all squared Schmidt coefficients but the largest.
    pub tail: f64,
    pub left: CVector,
    pub right: CVector,
}

/// Largest Schmidt component, via the 2x2 reduced operator when either side
/// is a single qubit, otherwise via SVD.
pub(crate) fn top_schmidt(psi: &StateVector, cut: &Bipartition) -> Result<TopSchmidt> {
    let m = coefficient_matrix(psi, cut);
    if m.nrows() == 2 {
        let (tail, u, v) = top_two_row(&m);
        Ok(TopSchmidt {
            tail,
            left: u,
            right: v,
        })
    } else if m.ncols() == 2 {
        let (tail, u, v) = top_two_row(&m.transpose());
        Ok(TopSchmidt {
            tail,
            left: v,
            right: u,
        })
    } else {
        let svd = m
            .try_svd(true, true, f64::EPSILON, 10_000)
            .ok_or_else(|| Error::Eigensolver("SVD did not converge".into()))?;
        let (top, _) =
            svd.singular_values
                .iter()
                .enumerate()
                .fold((0, f64::NEG_INFINITY), |best, (i, &s)| {
                    if s > best.1 {
                        (i, s)
                    } else {
                        best
                    }
                });
        let tail = svd
            .singular_values
            .iter()
            .enumerate()
            .filter(|&(i, _)| i != top)
            .map(|(_, s)| s * s)
            .sum();
        let u = svd.u.as_ref().expect("requested").column(top).into_owned();
        let v = svd.v_t.as_ref().expect("requested").row(top).transpose();
        Ok(TopSchmidt {
            tail,
            left: u,
            right: v,
        })
    }
}

/// For a 2 x M coefficient matrix: (tail weight, left 2-vector, right M-vector)
/// such that `u v^T` is the best rank-one approximation.
fn top_two_row(m: &CMatrix) -> (f64, CVector, CVector) {
    let rho = m * m.adjoint();
    let a = rho[(0, 0)].re;
    let d = rho[(1, 1)].re;
    let b = rho[(0, 1)];
    let half_diff = 0.5 * (a - d);
    let r = half_diff.hypot(b.norm());
    let lmax = 0.5 * (a + d) + r;
    let cand = if a >= d {
        [Complex64::new(lmax - d, 0.0), b.conj()]
    } else {
        [b, Complex64::new(lmax - a, 0.0)]
    };
    let cn = (cand[0].norm_sqr() + cand[1].norm_sqr()).sqrt();
    let u = if cn > 1e-300 {
        CVector::from_vec(vec![cand[0] / cn, cand[1] / cn])
    } else {
        CVector::from_vec(vec![ONE, ZERO])
    };
    // right factor maximizing the overlap: M^T conj(u), normalized
    let x = m.transpose() * u.map(|z| z.conj());
    let xn = x.norm();
    let v = if xn > 1e-300 {
        x.unscale(xn)
    } else {
        let mut e = CVector::zeros(m.ncols());
        e[0] = ONE;
        e
    };
    // weight outside the top left vector, without the a*d - |b|^2 cancellation
    let perp = [-u[1].conj(), u[0].conj()];
    let off: f64 = (0..m.ncols())
        .map(|c| (perp[0].conj() * m[(0, c)] + perp[1].conj() * m[(1, c)]).norm_sqr())
        .sum();
    let total = a + d;
    let tail = if total > 0.0 {
        (off / total).min(0.5)
    } else {
        0.0
    };
    (tail, u, v)
}

/// Squared Schmidt coefficients across `cut`, descending.
pub fn schmidt_squared(psi: &StateVector, cut: &Bipartition) -> Result<Vec<f64>> {
    if cut.n_qubits() != psi.n_qubits() {
        return Err(Error::InvalidBipartition(format!(
            "cut covers {} qubits, state has {}",
            cut.n_qubits(),
            psi.n_qubits()
        )));
    }
    let m = coefficient_matrix(psi, cut);
    let mut values: Vec<f64> = if m.nrows() == 2 || m.ncols() == 2 {
        let reduced = if m.nrows() == 2 {
            &m * m.adjoint()
        } else {
            m.adjoint() * &m
        };
        let a = reduced[(0, 0)].re;
        let d = reduced[(1, 1)].re;
        let r = (0.5 * (a - d)).hypot(reduced[(0, 1)].norm());
        let lmax = 0.5 * (a + d) + r;
        let det = (a * d - reduced[(0, 1)].norm_sqr()).max(0.0);
        vec![lmax, if lmax > 0.0 { det / lmax } else { 0.0 }]
    } else {
        let svd = m
            .try_svd(false, false, f64::EPSILON, 10_000)
            .ok_or_else(|| Error::Eigensolver("SVD did not converge".into()))?;
        svd.singular_values.iter().map(|s| s * s).collect()
    };
    values.sort_by(|a, b| b.total_cmp(a));
    Ok(values)
}

/// Dense `2^n x 2^n` matrix of a single-qubit operator acting on `qubit`.
pub fn embed_single_qubit(n: usize, qubit: usize, op: &[[Complex64; 2]; 2]) -> CMatrix {
    let dim = 1usize << n;
    DMatrix::from_fn(dim, dim, |i, j| {
        let mask = 1usize << (n - 1 - qubit);
        if (i & !mask) != (j & !mask) {
            ZERO
        } else {
            op[bit_of(i, qubit, n)][bit_of(j, qubit, n)]
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};

    fn assert_close(a: f64, b: f64, tol: f64) {
        assert!((a - b).abs() <= tol, "{a} vs {b} (tol {tol})");
    }

    #[test]
    fn product_state_poles_and_equator() {
        let s = product_state(0.0, 0.0, 3).unwrap();
        assert_eq!(s.amplitudes()[0], ONE);
        assert!(s.amplitudes().iter().skip(1).all(|a| a.norm() == 0.0));

        let s = product_state(FRAC_PI_2, 0.0, 3).unwrap();
        assert_close(s.amplitudes()[7].re, 1.0, 1e-15);
        assert!(s.amplitudes().iter().take(7).all(|a| a.norm() < 1e-15));

        let s = product_state(FRAC_PI_4, 0.0, 2).unwrap();
        for a in s.amplitudes().iter() {
            assert_close(a.re, 0.5, 1e-15);
            assert_close(a.im, 0.0, 1e-15);
        }
    }

    #[test]
    fn product_state_rejects_empty_register() {
        assert!(matches!(
            product_state(0.3, 0.0, 0),
            Err(Error::InvalidRegister(_))
        ));
    }

    #[test]
    fn product_state_phase_convention() {
        let s = product_state(FRAC_PI_4, FRAC_PI_2, 1).unwrap();
        assert_close(
            s.amplitudes()[1].im,
            -std::f64::consts::FRAC_1_SQRT_2,
            1e-15,
        );
    }

    #[test]
    fn tensor_examples() {
        let zero = StateVector::basis(1, 0).unwrap();
        let one = StateVector::basis(1, 1).unwrap();
        let t = tensor(&zero, &one).unwrap();
        assert_eq!(t.n_qubits(), 2);
        assert_eq!(t.amplitudes().as_slice(), &[ZERO, ONE, ZERO, ZERO]);

        let plus = product_state(FRAC_PI_4, 0.0, 1).unwrap();
        let pp = tensor(&plus, &plus).unwrap();
        for a in pp.amplitudes().iter() {
            assert_close(a.re, 0.5, 1e-15);
        }
    }

    #[test]
    fn density_from_pure_examples() {
        let rho = density_from_pure(&StateVector::basis(1, 0).unwrap());
        assert_eq!(rho.matrix()[(0, 0)], ONE);
        assert_eq!(rho.matrix()[(1, 1)], ZERO);
        assert_eq!(rho.matrix()[(0, 1)], ZERO);

        let plus = product_state(FRAC_PI_4, 0.0, 1).unwrap();
        let rho = density_from_pure(&plus);
        for z in rho.matrix().iter() {
            assert_close(z.re, 0.5, 1e-15);
        }
        assert_close(rho.purity(), 1.0, 1e-14);
    }

    #[test]
    fn density_validation() {
        let bad = CMatrix::from_diagonal(&CVector::from_vec(vec![ONE, ONE]));
        assert!(DensityOperator::new(1, bad).is_err());
        let neg = CMatrix::from_diagonal(&CVector::from_vec(vec![
            Complex64::new(1.1, 0.0),
            Complex64::new(-0.1, 0.0),
        ]));
        assert!(DensityOperator::new(1, neg).is_err());
        let ok = CMatrix::from_diagonal(&CVector::from_vec(vec![
            Complex64::new(0.25, 0.0),
            Complex64::new(0.75, 0.0),
        ]));
        assert!(DensityOperator::new(1, ok).is_ok());
    }

    #[test]
    fn partial_trace_examples() {
        let rho = density_from_pure(&StateVector::basis(2, 0).unwrap());
        let red = partial_trace(&rho, &[0]).unwrap();
        assert_eq!(red.matrix()[(0, 0)], ONE);
        assert_eq!(red.matrix()[(1, 1)], ZERO);

        let ghz = density_from_pure(&StateVector::ghz(3).unwrap());
        let red = partial_trace(&ghz, &[0]).unwrap();
        assert_close(red.matrix()[(0, 0)].re, 0.5, 1e-15);
        assert_close(red.matrix()[(1, 1)].re, 0.5, 1e-15);
        assert_close(red.matrix()[(0, 1)].norm(), 0.0, 1e-15);

        assert!(partial_trace(&ghz, &[]).is_err());
        assert!(partial_trace(&ghz, &[3]).is_err());
    }

    #[test]
    fn partial_trace_of_product_operator() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let a = DensityOperator::random(1, &mut rng).unwrap();
        let b = DensityOperator::random(2, &mut rng).unwrap();
        let ab = a.matrix().kronecker(b.matrix());
        let rho = DensityOperator::new(3, ab).unwrap();
        let ra = partial_trace(&rho, &[0]).unwrap();
        let rb = partial_trace(&rho, &[1, 2]).unwrap();
        assert!(linalg::max_abs_diff(ra.matrix(), a.matrix()) < 1e-14);
        assert!(linalg::max_abs_diff(rb.matrix(), b.matrix()) < 1e-14);
    }

    #[test]
    fn schmidt_examples() {
        let prod = product_state(0.4, 0.3, 3).unwrap();
        for cut in Bipartition::all(3).unwrap() {
            let s = schmidt_squared(&prod, &cut).unwrap();
            assert_close(s[0], 1.0, 1e-12);
            assert!(s[1..].iter().all(|&x| x.abs() < 1e-12));
        }

        let cut = Bipartition::new(3, &[0]).unwrap();
        let ghz = schmidt_squared(&StateVector::ghz(3).unwrap(), &cut).unwrap();
        assert_close(ghz[0], 0.5, 1e-14);
        assert_close(ghz[1], 0.5, 1e-14);

        let w = schmidt_squared(&StateVector::w(3).unwrap(), &cut).unwrap();
        assert_close(w[0], 2.0 / 3.0, 1e-14);
        assert_close(w[1], 1.0 / 3.0, 1e-14);
    }

    #[test]
    fn schmidt_rejects_mismatched_cut() {
        let cut = Bipartition::new(2, &[0]).unwrap();
        assert!(schmidt_squared(&StateVector::ghz(3).unwrap(), &cut).is_err());
        assert!(Bipartition::new(3, &[0, 1, 2]).is_err());
        assert!(Bipartition::new(3, &[]).is_err());
        assert!(Bipartition::new(3, &[0, 0]).is_err());
    }

    #[test]
    fn bipartition_count() {
        for n in 2..=6 {
            assert_eq!(Bipartition::all(n).unwrap().len(), (1 << (n - 1)) - 1);
        }
    }

    #[test]
    fn svd_path_on_larger_cuts() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let psi = StateVector::random(4, &mut rng).unwrap();
        let cut = Bipartition::new(4, &[0, 2]).unwrap();
        let s = schmidt_squared(&psi, &cut).unwrap();
        assert_eq!(s.len(), 4);
        assert_close(s.iter().sum::<f64>(), 1.0, 1e-12);
        let red = partial_trace(&density_from_pure(&psi), &[0, 2]).unwrap();
        let ev = red.eigenvalues().unwrap();
        for (a, b) in s.iter().zip(ev.iter().rev()) {
            assert_close(*a, *b, 1e-12);
        }
        let top = top_schmidt(&psi, &cut).unwrap();
        assert_close(top.tail, 1.0 - s[0], 1e-12);
        let w = from_cut_product(&top.left, &top.right, &cut);
        assert_close(w.inner(&psi).unwrap().norm_sqr(), s[0], 1e-12);
    }
}
