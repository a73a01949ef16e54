//! Geometric uncertainty relations and the entanglement bound on evolution.
//!
//! Every report compares a path-length side `lhs` with two lower bounds: the
//! geodesic distance between the initial and final states (`rhs_geodesic`)
//! and the angle `G(E)` of the final state's entanglement (`rhs_entanglement`).
//! All angles are in arccos units, so that for pure states
//! `lhs = τΔH ≥ arccos|<ψ(0)|ψ(τ)>| ≥ G(E_G(ψ(τ)))` when `ψ(0)` is a product.

use serde::Serialize;

use crate::entangle::{self, AlsOptions, MeasureKind, MixedMetric};
use crate::error::{Error, Result};
use crate::evolve::{self, SpeedMetric, Trajectory};
use crate::hamiltonian::{HamiltonianSpec, ModelTag};
use crate::metrics;
use crate::qstate::{product_state, DensityOperator, StateVector};

/// Tolerance for asserted inequalities.
pub const BOUND_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundFlavor {
    PureFs,
    MixedFs,
    Bures,
}

/// How the path-length side of a mixed check is evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Quadrature {
    /// `τ × speed(ρ0)`; exact for a time-independent H, whose speed is constant.
    ClosedForm,
    /// Trapezoid rule on this many intervals (at least 2).
    Trapezoid(usize),
}

/// Which measure supplies `E` in a pure check.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum PureMeasure {
    Ggm,
    /// Upper bound on the fully separable measure; δ is then only indicative.
    Gm(AlsOptions),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BoundParams {
    #[serde(flatten)]
    pub model: ModelTag,
    pub n_qubits: usize,
    pub theta: Option<f64>,
    pub phi: Option<f64>,
    pub tau: f64,
    pub mixing_p: Option<f64>,
}

impl BoundParams {
    fn new(spec: &HamiltonianSpec, tau: f64) -> Self {
        Self {
            model: spec.model(),
            n_qubits: spec.n_qubits(),
            theta: None,
            phi: None,
            tau,
            mixing_p: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundReport {
    pub lhs: f64,
    pub rhs_geodesic: f64,
    pub rhs_entanglement: f64,
    /// `lhs - rhs_entanglement`.
    pub delta: f64,
    /// `lhs - rhs_geodesic`.
    pub geodesic_margin: f64,
    /// `rhs_geodesic - rhs_entanglement`.
    pub chain_gap: f64,
    /// Energy fluctuation of the initial state (`ΔH`, or `ΔH_Q` for the
    /// mixed Fubini-Study flavor).
    pub fluctuation: f64,
    /// Entanglement value `E` of the final state.
    pub entanglement: f64,
    pub measure: MeasureKind,
    pub flavor: BoundFlavor,
    pub surrogate: bool,
    pub params: BoundParams,
}

impl BoundReport {
    #[allow(clippy::too_many_arguments)]
    fn assemble(
        lhs: f64,
        rhs_geodesic: f64,
        entanglement: &entangle::EntanglementValue,
        fluctuation: f64,
        flavor: BoundFlavor,
        params: BoundParams,
    ) -> Self {
        let rhs_entanglement = entanglement.g;
        Self {
            lhs,
            rhs_geodesic,
            rhs_entanglement,
            delta: lhs - rhs_entanglement,
            geodesic_margin: lhs - rhs_geodesic,
            chain_gap: rhs_geodesic - rhs_entanglement,
            fluctuation,
            entanglement: entanglement.e,
            measure: entanglement.kind,
            flavor,
            surrogate: entanglement.surrogate,
            params,
        }
    }

    /// Cells whose asserted inequality fails: δ for exact pure checks, the
    /// geodesic margin otherwise.
    pub fn is_violation(&self) -> bool {
        if self.surrogate || self.measure == MeasureKind::Gm {
            self.geodesic_margin < -BOUND_TOL
        } else {
            self.delta < -BOUND_TOL
        }
    }

    pub fn at_angles(mut self, theta: f64, phi: f64) -> Self {
        self.params.theta = Some(theta);
        self.params.phi = Some(phi);
        self
    }

    pub fn with_mixing(mut self, p: f64) -> Self {
        self.params.mixing_p = Some(p);
        self
    }
}

fn check_tau(tau: f64) -> Result<()> {
    if !tau.is_finite() || tau < 0.0 {
        return Err(Error::Domain {
            what: "evolution time",
            value: tau,
        });
    }
    Ok(())
}

/// Pure-state check with the generalized geometric measure.
pub fn check_pure(spec: &HamiltonianSpec, psi0: &StateVector, tau: f64) -> Result<BoundReport> {
    check_pure_with(spec, psi0, tau, PureMeasure::Ggm)
}

pub fn check_pure_with(
    spec: &HamiltonianSpec,
    psi0: &StateVector,
    tau: f64,
    measure: PureMeasure,
) -> Result<BoundReport> {
    check_tau(tau)?;
    let stats = evolve::energy_stats_pure(spec, psi0)?;
    let psi_t = evolve::propagate_pure(spec, psi0, tau)?;
    let rhs_geodesic = metrics::overlap_angle(psi0, &psi_t)?;
    let ent = match measure {
        PureMeasure::Ggm => entangle::ggm(&psi_t)?,
        PureMeasure::Gm(opts) => entangle::gm_als(&psi_t, &opts)?,
    };
    Ok(BoundReport::assemble(
        tau * stats.fluctuation,
        rhs_geodesic,
        &ent,
        stats.fluctuation,
        BoundFlavor::PureFs,
        BoundParams::new(spec, tau),
    ))
}

/// [`check_pure`] from the uniform product state `product_state(θ, φ, N)`.
pub fn check_pure_product(
    spec: &HamiltonianSpec,
    theta: f64,
    phi: f64,
    tau: f64,
) -> Result<BoundReport> {
    let psi0 = product_state(theta, phi, spec.n_qubits())?;
    Ok(check_pure(spec, &psi0, tau)?.at_angles(theta, phi))
}

fn mixed_lhs(
    spec: &HamiltonianSpec,
    rho0: &DensityOperator,
    tau: f64,
    quadrature: Quadrature,
    metric: SpeedMetric,
    speed0: f64,
) -> Result<f64> {
    match quadrature {
        Quadrature::ClosedForm => Ok(tau * speed0),
        Quadrature::Trapezoid(steps) => {
            if steps < 2 {
                return Err(Error::InvalidArgument(
                    "trapezoid quadrature needs at least 2 intervals".into(),
                ));
            }
            if tau == 0.0 {
                return Ok(0.0);
            }
            let traj = Trajectory::mixed(spec, rho0, tau, steps)?;
            evolve::path_length(&traj, metric)
        }
    }
}

/// Mixed-state relation under the Fubini-Study-type metric
/// `dS² = 4(1 - Tr[ρ(t)ρ(t+dt)]/Tr ρ²)`.
///
/// `lhs` is half the path length, `τ ΔH_Q / sqrt 2`, and `rhs_geodesic` is half
/// the geodesic `S_0`, so both reduce to the pure-state values.
pub fn check_mixed_fs(
    spec: &HamiltonianSpec,
    rho0: &DensityOperator,
    tau: f64,
    quadrature: Quadrature,
    opts: &AlsOptions,
) -> Result<BoundReport> {
    check_tau(tau)?;
    let speed0 = evolve::mixed_fs_speed(spec, rho0)?;
    let lhs = 0.5 * mixed_lhs(spec, rho0, tau, quadrature, SpeedMetric::MixedFs, speed0)?;
    let rho_t = evolve::propagate_density(spec, rho0, tau)?;
    let rhs_geodesic = 0.5 * metrics::fs_mixed_geodesic(rho0, &rho_t)?.value;
    let ent = entangle::mixed_measure_surrogate(&rho_t, MixedMetric::Fs, opts)?;
    let stats = evolve::energy_stats_mixed(spec, rho0)?;
    Ok(BoundReport::assemble(
        lhs,
        rhs_geodesic,
        &ent,
        stats.quantum_fluctuation.unwrap_or(stats.fluctuation),
        BoundFlavor::MixedFs,
        BoundParams::new(spec, tau),
    ))
}

/// Mixed-state relation under the Bures metric: `∫ΔH dt ≥ arccos sqrt F`.
pub fn check_bures(
    spec: &HamiltonianSpec,
    rho0: &DensityOperator,
    tau: f64,
    quadrature: Quadrature,
    opts: &AlsOptions,
) -> Result<BoundReport> {
    check_tau(tau)?;
    let stats = evolve::energy_stats_mixed(spec, rho0)?;
    let lhs = mixed_lhs(
        spec,
        rho0,
        tau,
        quadrature,
        SpeedMetric::Bures,
        stats.fluctuation,
    )?;
    let rho_t = evolve::propagate_density(spec, rho0, tau)?;
    let rhs_geodesic = metrics::bures_angle(rho0, &rho_t)?.value;
    let ent = entangle::mixed_measure_surrogate(&rho_t, MixedMetric::Bures, opts)?;
    Ok(BoundReport::assemble(
        lhs,
        rhs_geodesic,
        &ent,
        stats.fluctuation,
        BoundFlavor::Bures,
        BoundParams::new(spec, tau),
    ))
}
