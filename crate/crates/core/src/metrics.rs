//! Distances between pure states and between density operators.
//!
//! Pure-state distances are computed from the overlap modulus `|c|` and the
//! norm of the component of `ψ2` orthogonal to `ψ1`, `‖ψ2 - cψ1‖ = sqrt(1-|c|²)`,
//! so nearly identical states give distances accurate to round-off instead of
//! `sqrt(eps)`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix};
use crate::qstate::{DensityOperator, StateVector};

/// Arguments of `arccos`-type expressions may exceed the unit interval by at
/// most this much before being reported as a domain error.
pub const ARCCOS_SLACK: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum MetricKind {
    FsChordal,
    Bargmann,
    MinNormed,
    HilbertSchmidt,
    FsMixedGeodesic,
    BuresAngle,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DistanceValue {
    pub value: f64,
    pub kind: MetricKind,
}

impl DistanceValue {
    fn new(value: f64, kind: MetricKind) -> Self {
        Self { value, kind }
    }
}

/// `(|<ψ1|ψ2>|, ‖ψ2 - <ψ1|ψ2> ψ1‖)`.
fn overlap_parts(psi1: &StateVector, psi2: &StateVector) -> Result<(f64, f64)> {
    psi1.check_same_dim(psi2)?;
    if psi1.amplitudes() == psi2.amplitudes() {
        return Ok((1.0, 0.0));
    }
    let c = psi1.inner(psi2)?;
    let orth = (psi2.amplitudes() - psi1.amplitudes() * c).norm();
    Ok((c.norm(), orth))
}

/// `sqrt(4(1 - |<ψ1|ψ2>|²))`.
pub fn fs_distance(psi1: &StateVector, psi2: &StateVector) -> Result<DistanceValue> {
    let (_, orth) = overlap_parts(psi1, psi2)?;
    Ok(DistanceValue::new(
        (2.0 * orth).min(2.0),
        MetricKind::FsChordal,
    ))
}

/// `2 arccos |<ψ1|ψ2>|`, in `[0, π]`.
pub fn bargmann_angle(psi1: &StateVector, psi2: &StateVector) -> Result<DistanceValue> {
    let (modulus, orth) = overlap_parts(psi1, psi2)?;
    Ok(DistanceValue::new(
        2.0 * orth.atan2(modulus),
        MetricKind::Bargmann,
    ))
}

/// `arccos |<ψ1|ψ2>|`, half the Bargmann angle. This is the right-hand side of
/// the pure-state uncertainty relation `τΔH ≥ arccos|<ψ(0)|ψ(τ)>|`.
pub fn overlap_angle(psi1: &StateVector, psi2: &StateVector) -> Result<f64> {
    let (modulus, orth) = overlap_parts(psi1, psi2)?;
    Ok(orth.atan2(modulus))
}

/// `sqrt(2(1 - |<ψ1|ψ2>|))`.
pub fn min_normed_distance(psi1: &StateVector, psi2: &StateVector) -> Result<DistanceValue> {
    let (modulus, orth) = overlap_parts(psi1, psi2)?;
    let gap = orth * orth / (1.0 + modulus.min(1.0));
    Ok(DistanceValue::new(
        (2.0 * gap).sqrt().min(std::f64::consts::SQRT_2),
        MetricKind::MinNormed,
    ))
}

/// `sqrt(Tr (ρ1 - ρ2)²)`.
pub fn hs_distance(rho1: &DensityOperator, rho2: &DensityOperator) -> Result<DistanceValue> {
    rho1.check_same_dim(rho2)?;
    let diff: CMatrix = rho1.matrix() - rho2.matrix();
    Ok(DistanceValue::new(
        linalg::frobenius_sq(&diff).sqrt(),
        MetricKind::HilbertSchmidt,
    ))
}

/// Geodesic `S_0 = 2 arccos sqrt(Tr[ρ_ref ρ2] / Tr[ρ_ref²])`.
///
/// Not symmetric: the first argument fixes the normalization. The ratio can
/// exceed one when `ρ2` is purer than `ρ_ref`; beyond `1 + 1e-9` that is a
/// domain error.
pub fn fs_mixed_geodesic(
    rho_ref: &DensityOperator,
    rho2: &DensityOperator,
) -> Result<DistanceValue> {
    rho_ref.check_same_dim(rho2)?;
    let purity = rho_ref.purity();
    if !(purity > 0.0) {
        return Err(Error::Domain {
            what: "reference purity",
            value: purity,
        });
    }
    let ratio = linalg::trace_product(rho_ref.matrix(), rho2.matrix()).re / purity;
    if ratio > 1.0 + ARCCOS_SLACK {
        return Err(Error::Domain {
            what: "mixed Fubini-Study overlap ratio",
            value: ratio,
        });
    }
    // 1 - ratio = Tr[ρ_ref(ρ_ref - ρ2)] / Tr ρ_ref², accurate near coincidence
    let diff: CMatrix = rho_ref.matrix() - rho2.matrix();
    let gap = (linalg::trace_product(rho_ref.matrix(), &diff).re / purity).clamp(0.0, 1.0);
    let cos2 = ratio.clamp(0.0, 1.0);
    Ok(DistanceValue::new(
        2.0 * gap.sqrt().atan2(cos2.sqrt()),
        MetricKind::FsMixedGeodesic,
    ))
}

/// `(Tr sqrt(sqrt(ρ1) ρ2 sqrt(ρ1)))²`.
pub fn uhlmann_fidelity(rho1: &DensityOperator, rho2: &DensityOperator) -> Result<f64> {
    rho1.check_same_dim(rho2)?;
    if rho1 == rho2 {
        return Ok(1.0);
    }
    let root = linalg::psd_sqrt(rho1.matrix())?;
    let mut inner = &root * rho2.matrix() * &root;
    crate::qstate::symmetrize(&mut inner);
    let (values, _) = linalg::hermitian_eigh(&inner)?;
    linalg::check_psd(&values)?;
    let trace_root: f64 = values
        .iter()
        .filter(|&&v| v >= linalg::SQRT_CUTOFF)
        .map(|v| v.sqrt())
        .sum();
    let f = trace_root * trace_root;
    if f > 1.0 + ARCCOS_SLACK {
        return Err(Error::Domain {
            what: "Uhlmann fidelity",
            value: f,
        });
    }
    Ok(f.min(1.0))
}

/// `arccos sqrt(F(ρ1, ρ2))`, in `[0, π/2]`.
pub fn bures_angle(rho1: &DensityOperator, rho2: &DensityOperator) -> Result<DistanceValue> {
    let f = uhlmann_fidelity(rho1, rho2)?;
    Ok(DistanceValue::new(f.sqrt().acos(), MetricKind::BuresAngle))
}
