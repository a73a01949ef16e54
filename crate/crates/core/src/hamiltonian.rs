//! Model Hamiltonians as weighted Pauli strings.
//!
//! Energies are in units of the coupling `J` and ħ = 1, so evolution times
//! are dimensionless `Jτ/ħ` values when `J = 1`.

use std::collections::BTreeMap;
use std::fmt;

use num_complex::Complex64;
use once_cell::sync::OnceCell;
use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix, ZERO};
use crate::qstate::{bit_of, MAX_QUBITS};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Pauli {
    X,
    Y,
    Z,
}

/// `coefficient * prod_q sigma^{factors[q]}_q`, identity on absent qubits.
#[derive(Debug, Clone, PartialEq)]
pub struct PauliTerm {
    pub coefficient: f64,
    pub factors: BTreeMap<usize, Pauli>,
}

impl PauliTerm {
    pub fn new(coefficient: f64, factors: impl IntoIterator<Item = (usize, Pauli)>) -> Self {
        Self {
            coefficient,
            factors: factors.into_iter().collect(),
        }
    }

    /// `(flip mask, phase)` such that the term maps `|b>` to
    /// `coefficient * phase(b) |b ^ mask>`.
    fn action(&self, n: usize, b: usize) -> (usize, Complex64) {
        let mut mask = 0usize;
        let mut phase = Complex64::new(1.0, 0.0);
        for (&q, &p) in &self.factors {
            let bit = bit_of(b, q, n);
            let sign = if bit == 1 { -1.0 } else { 1.0 };
            match p {
                Pauli::X => mask |= 1 << (n - 1 - q),
                Pauli::Y => {
                    mask |= 1 << (n - 1 - q);
                    phase *= Complex64::new(0.0, sign);
                }
                Pauli::Z => phase *= sign,
            }
        }
        (mask, phase)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Topology {
    Open,
    Ring,
}

/// Which builder produced a spec, with its parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "model", rename_all = "lowercase")]
pub enum ModelTag {
    Cluster {
        j: f64,
        topology: Topology,
    },
    Xyz {
        j: f64,
        gamma: f64,
        mu: f64,
        h: f64,
        topology: Topology,
    },
    Custom,
}

impl ModelTag {
    pub fn label(&self) -> &'static str {
        match self {
            ModelTag::Cluster { .. } => "cluster",
            ModelTag::Xyz { .. } => "xyz",
            ModelTag::Custom => "custom",
        }
    }
}

impl fmt::Display for ModelTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// Eigenvalues ascending, eigenvectors as matching unitary columns.
#[derive(Debug, Clone)]
pub struct SpectralDecomposition {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: CMatrix,
}

impl SpectralDecomposition {
    /// `V diag(E) V†`.
    pub fn reconstruct(&self) -> CMatrix {
        linalg::spectral_apply(&self.eigenvalues, &self.eigenvectors, |e| {
            Complex64::new(e, 0.0)
        })
    }

    /// `max |V†V - I|`.
    pub fn orthonormality_residual(&self) -> f64 {
        let dim = self.eigenvectors.ncols();
        linalg::max_abs_diff(
            &(self.eigenvectors.adjoint() * &self.eigenvectors),
            &linalg::identity(dim),
        )
    }
}

/// A Hamiltonian on `n_qubits`: Pauli terms plus a constant offset. The dense
/// matrix and its eigendecomposition are computed once on first use.
#[derive(Debug, Clone)]
pub struct HamiltonianSpec {
    n_qubits: usize,
    terms: Vec<PauliTerm>,
    constant_offset: f64,
    model: ModelTag,
    dense: OnceCell<CMatrix>,
    spectral: OnceCell<SpectralDecomposition>,
}

impl HamiltonianSpec {
    pub fn new(n_qubits: usize, terms: Vec<PauliTerm>, constant_offset: f64) -> Result<Self> {
        Self::with_model(n_qubits, terms, constant_offset, ModelTag::Custom)
    }

    fn with_model(
        n_qubits: usize,
        terms: Vec<PauliTerm>,
        constant_offset: f64,
        model: ModelTag,
    ) -> Result<Self> {
        if n_qubits == 0 || n_qubits > MAX_QUBITS {
            return Err(Error::InvalidRegister(format!(
                "{n_qubits} qubits outside 1..={MAX_QUBITS}"
            )));
        }
        if !constant_offset.is_finite() {
            return Err(Error::InvalidArgument("non-finite constant offset".into()));
        }
        for t in &terms {
            if !t.coefficient.is_finite() {
                return Err(Error::InvalidArgument(
                    "non-finite Pauli coefficient".into(),
                ));
            }
            if let Some((&q, _)) = t.factors.iter().find(|(&q, _)| q >= n_qubits) {
                return Err(Error::InvalidArgument(format!(
                    "Pauli factor on qubit {q} outside {n_qubits}-qubit register"
                )));
            }
        }
        Ok(Self {
            n_qubits,
            terms,
            constant_offset,
            model,
            dense: OnceCell::new(),
            spectral: OnceCell::new(),
        })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        1 << self.n_qubits
    }

    pub fn terms(&self) -> &[PauliTerm] {
        &self.terms
    }

    pub fn constant_offset(&self) -> f64 {
        self.constant_offset
    }

    pub fn model(&self) -> ModelTag {
        self.model
    }

    /// Cached dense matrix.
    pub fn dense(&self) -> &CMatrix {
        self.dense.get_or_init(|| assemble_dense(self))
    }

    /// Cached eigendecomposition; computed at most once even under concurrent
    /// first access.
    pub fn spectral(&self) -> Result<&SpectralDecomposition> {
        self.spectral.get_or_try_init(|| {
            let (eigenvalues, eigenvectors) = linalg::hermitian_eigh(self.dense())?;
            Ok(SpectralDecomposition {
                eigenvalues,
                eigenvectors,
            })
        })
    }

    /// `-H`, generating the time-reversed evolution.
    pub fn negated(&self) -> Self {
        let terms = self
            .terms
            .iter()
            .map(|t| PauliTerm {
                coefficient: -t.coefficient,
                factors: t.factors.clone(),
            })
            .collect();
        Self {
            n_qubits: self.n_qubits,
            terms,
            constant_offset: -self.constant_offset,
            model: ModelTag::Custom,
            dense: OnceCell::new(),
            spectral: OnceCell::new(),
        }
    }
}

/// `(J/4) Σ_i (I - σ^z_i)(I - σ^z_{i+1})` on an open chain.
pub fn cluster_ising(n: usize, j: f64) -> Result<HamiltonianSpec> {
    cluster_ising_on(n, j, Topology::Open)
}

pub fn cluster_ising_on(n: usize, j: f64, topology: Topology) -> Result<HamiltonianSpec> {
    if n < 2 {
        return Err(Error::InvalidRegister("cluster model needs n >= 2".into()));
    }
    check_energy(j)?;
    let q = j / 4.0;
    let mut terms = Vec::new();
    let mut offset = 0.0;
    for (a, b) in bonds(n, topology) {
        offset += q;
        terms.push(PauliTerm::new(-q, [(a, Pauli::Z)]));
        terms.push(PauliTerm::new(-q, [(b, Pauli::Z)]));
        terms.push(PauliTerm::new(q, [(a, Pauli::Z), (b, Pauli::Z)]));
    }
    HamiltonianSpec::with_model(n, terms, offset, ModelTag::Cluster { j, topology })
}

/// Anisotropic XYZ chain with longitudinal field:
/// `J Σ_i [(1+γ) XX + (1-γ) YY + μ ZZ + h Z_i]`. The ring adds the bond
/// `(N-1, 0)`; the open chain drops it but keeps all N field terms.
pub fn heisenberg_xyz(
    n: usize,
    j: f64,
    gamma: f64,
    mu: f64,
    h: f64,
    topology: Topology,
) -> Result<HamiltonianSpec> {
    if n < 2 {
        return Err(Error::InvalidRegister("XYZ model needs n >= 2".into()));
    }
    check_energy(j)?;
    if !(0.0..=1.0).contains(&gamma) {
        return Err(Error::Domain {
            what: "anisotropy gamma",
            value: gamma,
        });
    }
    if !mu.is_finite() || !h.is_finite() {
        return Err(Error::InvalidArgument("non-finite XYZ parameter".into()));
    }
    let mut terms = Vec::new();
    for (a, b) in bonds(n, topology) {
        terms.push(PauliTerm::new(
            j * (1.0 + gamma),
            [(a, Pauli::X), (b, Pauli::X)],
        ));
        if gamma != 1.0 {
            terms.push(PauliTerm::new(
                j * (1.0 - gamma),
                [(a, Pauli::Y), (b, Pauli::Y)],
            ));
        }
        if mu != 0.0 {
            terms.push(PauliTerm::new(j * mu, [(a, Pauli::Z), (b, Pauli::Z)]));
        }
    }
    if h != 0.0 {
        for q in 0..n {
            terms.push(PauliTerm::new(j * h, [(q, Pauli::Z)]));
        }
    }
    HamiltonianSpec::with_model(
        n,
        terms,
        0.0,
        ModelTag::Xyz {
            j,
            gamma,
            mu,
            h,
            topology,
        },
    )
}

/// `n_terms` random Pauli strings on `n` qubits with coefficients uniform in
/// `[-1, 1]`; every string has at least one non-identity factor.
pub fn random_pauli_hamiltonian<R: Rng + ?Sized>(
    n: usize,
    n_terms: usize,
    rng: &mut R,
) -> Result<HamiltonianSpec> {
    let paulis = [Pauli::X, Pauli::Y, Pauli::Z];
    let terms = (0..n_terms)
        .map(|_| {
            let forced = rng.random_range(0..n);
            let factors: Vec<_> = (0..n)
                .filter_map(|q| {
                    let pick = rng.random_range(0..4usize);
                    match (pick, q == forced) {
                        (3, false) => None,
                        (3, true) => Some((q, paulis[rng.random_range(0..3usize)])),
                        (k, _) => Some((q, paulis[k])),
                    }
                })
                .collect();
            PauliTerm::new(rng.random_range(-1.0..=1.0), factors)
        })
        .collect();
    HamiltonianSpec::new(n, terms, 0.0)
}

fn check_energy(j: f64) -> Result<()> {
    if !j.is_finite() {
        return Err(Error::InvalidArgument("non-finite coupling J".into()));
    }
    Ok(())
}

fn bonds(n: usize, topology: Topology) -> Vec<(usize, usize)> {
    let mut v: Vec<_> = (0..n - 1).map(|i| (i, i + 1)).collect();
    if topology == Topology::Ring {
        v.push((n - 1, 0));
    }
    v
}

/// Dense `2^N x 2^N` matrix of the spec.
pub fn assemble_dense(spec: &HamiltonianSpec) -> CMatrix {
    let n = spec.n_qubits;
    let dim = spec.dim();
    let mut m = CMatrix::from_element(dim, dim, ZERO);
    for b in 0..dim {
        m[(b, b)] += spec.constant_offset;
        for t in &spec.terms {
            let (mask, phase) = t.action(n, b);
            m[(b ^ mask, b)] += phase * t.coefficient;
        }
    }
    m
}
