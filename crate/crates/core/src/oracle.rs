//! Independent reference computations used to cross-check the main routes.
//!
//! Nothing here shares code paths with the production evaluators beyond the
//! state containers: Hamiltonians are rebuilt from Kronecker products,
//! propagation uses a Padé matrix exponential, expectations are plain dense
//! algebra, bipartite overlaps come from power iteration instead of the
//! closed 2x2 or SVD route, and speeds are finite differences.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::hamiltonian::{HamiltonianSpec, Pauli};
use crate::linalg::{CMatrix, CVector, ONE, ZERO};
use crate::qstate::{Bipartition, DensityOperator, StateVector};

fn pauli_matrix(p: Option<Pauli>) -> CMatrix {
    let i = Complex64::i();
    let entries = match p {
        None => [ONE, ZERO, ZERO, ONE],
        Some(Pauli::X) => [ZERO, ONE, ONE, ZERO],
        Some(Pauli::Y) => [ZERO, -i, i, ZERO],
        Some(Pauli::Z) => [ONE, ZERO, ZERO, -ONE],
    };
    DMatrix::from_row_slice(2, 2, &entries)
}

/// Dense Hamiltonian as a sum of Kronecker products, qubit 0 leftmost.
pub fn kron_hamiltonian(spec: &HamiltonianSpec) -> CMatrix {
    let n = spec.n_qubits();
    let dim = 1 << n;
    let mut h = CMatrix::identity(dim, dim) * Complex64::from(spec.constant_offset());
    for term in spec.terms() {
        let mut op = CMatrix::identity(1, 1);
        for q in 0..n {
            op = op.kronecker(&pauli_matrix(term.factors.get(&q).copied()));
        }
        h += op * Complex64::from(term.coefficient);
    }
    h
}

/// `exp(-iHt)` by scaling and squaring.
pub fn propagator(h: &CMatrix, t: f64) -> CMatrix {
    (h * Complex64::new(0.0, -t)).exp()
}

/// `(<H>, sqrt(<H²> - <H>²))` by dense expectation values.
pub fn energy_moments(h: &CMatrix, psi: &StateVector) -> (f64, f64) {
    let a = psi.amplitudes();
    let h_psi = h * a;
    let mean = a.dotc(&h_psi).re;
    let second = h_psi.dotc(&h_psi).re;
    (mean, (second - mean * mean).max(0.0).sqrt())
}

/// Best bipartite-product overlap² across one cut, by alternating power
/// iteration `u ← M conj(v)`, `v ← M^T conj(u)` from several deterministic
/// starts.
pub fn bipartite_overlap_sq(psi: &StateVector, cut: &Bipartition) -> f64 {
    let n = psi.n_qubits();
    let left = cut.left();
    let right = cut.right();
    let rows = 1 << left.len();
    let cols = 1 << right.len();
    let mut m = CMatrix::zeros(rows, cols);
    for (b, amp) in psi.amplitudes().iter().enumerate() {
        let pick = |qs: &[usize]| {
            qs.iter()
                .fold(0usize, |acc, &q| (acc << 1) | ((b >> (n - 1 - q)) & 1))
        };
        m[(pick(left), pick(right))] = *amp;
    }
    let mut best: f64 = 0.0;
    for start in 0..cols.min(4) {
        let mut v = CVector::from_fn(cols, |k, _| {
            Complex64::new(1.0 + (k + start) as f64 * 0.37, 0.21 * (k * start) as f64)
        });
        v.unscale_mut(v.norm());
        let mut s = 0.0;
        for _ in 0..2000 {
            let mut u = &m * v.map(|z| z.conj());
            let un = u.norm();
            if un == 0.0 {
                break;
            }
            u.unscale_mut(un);
            let mut next = m.transpose() * u.map(|z| z.conj());
            let vn = next.norm();
            next.unscale_mut(vn);
            v = next;
            let gain = vn - s;
            s = vn;
            if gain.abs() < 1e-15 {
                break;
            }
        }
        best = best.max(s * s);
    }
    best
}

/// Generalized geometric measure by direct bipartite optimization.
pub fn ggm_direct(psi: &StateVector) -> Result<f64> {
    let cuts = Bipartition::all(psi.n_qubits())?;
    let best = cuts
        .iter()
        .map(|c| bipartite_overlap_sq(psi, c))
        .fold(0.0, f64::max);
    Ok(1.0 - best)
}

/// Mixed Fubini-Study speed from `dS² = 4(1 - Tr[ρ ρ(dt)]/Tr ρ²)`, with
/// Richardson extrapolation over steps `dt` and `2 dt`.
pub fn mixed_fs_speed_fd(h: &CMatrix, rho: &DensityOperator, dt: f64) -> Result<f64> {
    if dt <= 0.0 {
        return Err(Error::InvalidArgument(
            "finite-difference step must be positive".into(),
        ));
    }
    let r = rho.matrix();
    let purity = (r * r).trace().re;
    let sq_speed = |step: f64| {
        let u = propagator(h, step);
        let moved = &u * r * u.adjoint();
        let overlap = (r * moved).trace().re / purity;
        4.0 * (1.0 - overlap) / (step * step)
    };
    let v2 = (4.0 * sq_speed(dt) - sq_speed(2.0 * dt)) / 3.0;
    Ok(v2.max(0.0).sqrt())
}

/// Closed-form values at `N = 2`, cluster model, `θ = π/4`, `Jτ = π`.
#[derive(Debug, Clone, Copy)]
pub struct ClusterPoint {
    pub lhs: f64,
    pub e_g: f64,
    pub rhs_entanglement: f64,
    pub delta: f64,
}

/// The N = 2 cluster point evaluated from scratch: Kronecker H, Padé
/// propagation, dense ΔH and power-iteration GGM.
pub fn cluster_point_numeric(
    spec: &HamiltonianSpec,
    psi0: &StateVector,
    tau: f64,
) -> Result<ClusterPoint> {
    let h = kron_hamiltonian(spec);
    let (_, dh) = energy_moments(&h, psi0);
    let psi_t = StateVector::normalized(
        psi0.n_qubits(),
        (propagator(&h, tau) * psi0.amplitudes())
            .iter()
            .copied()
            .collect(),
    )?;
    let e_g = ggm_direct(&psi_t)?;
    let lhs = tau * dh;
    let g = e_g.clamp(0.0, 1.0).sqrt().asin();
    Ok(ClusterPoint {
        lhs,
        e_g,
        rhs_entanglement: g,
        delta: lhs - g,
    })
}

pub fn cluster_point_exact() -> ClusterPoint {
    use std::f64::consts::PI;
    let s3 = 3f64.sqrt();
    ClusterPoint {
        lhs: PI * s3 / 4.0,
        e_g: 0.5,
        rhs_entanglement: PI / 4.0,
        delta: PI * (s3 - 1.0) / 4.0,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hamiltonian::{cluster_ising, heisenberg_xyz, Topology};
    use crate::linalg::max_abs_diff;
    use crate::qstate::product_state;
    use std::f64::consts::{FRAC_PI_4, PI};

    #[test]
    fn kron_matches_bitmask_assembly() {
        for spec in [
            cluster_ising(3, 1.0).unwrap(),
            heisenberg_xyz(3, 0.7, 0.5, 0.5, 1.5, Topology::Ring).unwrap(),
        ] {
            assert!(max_abs_diff(&kron_hamiltonian(&spec), spec.dense()) < 1e-14);
        }
    }

    #[test]
    fn numeric_cluster_point_matches_closed_form() {
        let spec = cluster_ising(2, 1.0).unwrap();
        let psi = product_state(FRAC_PI_4, 0.0, 2).unwrap();
        let num = cluster_point_numeric(&spec, &psi, PI).unwrap();
        let ex = cluster_point_exact();
        assert!((num.lhs - ex.lhs).abs() < 1e-12);
        assert!((num.e_g - ex.e_g).abs() < 1e-10);
        assert!((num.delta - ex.delta).abs() < 1e-9);
    }

    #[test]
    fn ggm_direct_examples() {
        assert!((ggm_direct(&StateVector::ghz(3).unwrap()).unwrap() - 0.5).abs() < 1e-10);
        assert!((ggm_direct(&StateVector::w(3).unwrap()).unwrap() - 1.0 / 3.0).abs() < 1e-10);
    }
}
