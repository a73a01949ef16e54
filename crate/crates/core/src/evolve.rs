//! Exact unitary propagation, energy statistics and path lengths.
//!
//! ħ = 1 throughout. Propagators are built from the cached eigendecomposition
//! of the Hamiltonian, so time-independent evolution is exact up to round-off.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::hamiltonian::HamiltonianSpec;
use crate::linalg::{self, CMatrix};
use crate::qstate::{DensityOperator, StateVector};

/// Variance round-off below this magnitude is clamped to zero.
pub const VARIANCE_ROUNDOFF: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EnergyStats {
    pub mean: f64,
    /// Standard deviation of H.
    pub fluctuation: f64,
    /// `sqrt(2 [Tr ρ²H² - Tr (ρH)²] / Tr ρ²)`; only defined for mixed input.
    pub quantum_fluctuation: Option<f64>,
}

/// Speed used when integrating a path length.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SpeedMetric {
    /// `2 ΔH`.
    PureFs,
    /// `sqrt(4 [Tr ρ²H² - Tr (ρH)²] / Tr ρ²)`; equals `2 ΔH` on pure states.
    MixedFs,
    /// `ΔH`, comparable with the Bures angle `arccos sqrt(F)`.
    Bures,
}

fn check_dim(spec: &HamiltonianSpec, dim: usize) -> Result<()> {
    if spec.dim() != dim {
        return Err(Error::DimensionMismatch {
            expected: spec.dim(),
            actual: dim,
        });
    }
    Ok(())
}

/// `e^{-iHt} |psi0>`.
pub fn propagate_pure(spec: &HamiltonianSpec, psi0: &StateVector, t: f64) -> Result<StateVector> {
    check_dim(spec, psi0.dim())?;
    if t == 0.0 {
        return Ok(psi0.clone());
    }
    let s = spec.spectral()?;
    let mut c = s.eigenvectors.adjoint() * psi0.amplitudes();
    for (ck, &e) in c.iter_mut().zip(&s.eigenvalues) {
        *ck *= Complex64::from_polar(1.0, -e * t);
    }
    Ok(StateVector::from_raw(psi0.n_qubits(), &s.eigenvectors * c))
}

/// `U rho0 U†` with `U = e^{-iHt}`.
pub fn propagate_density(
    spec: &HamiltonianSpec,
    rho0: &DensityOperator,
    t: f64,
) -> Result<DensityOperator> {
    check_dim(spec, rho0.dim())?;
    if t == 0.0 {
        return Ok(rho0.clone());
    }
    let s = spec.spectral()?;
    let v = &s.eigenvectors;
    let mut m = v.adjoint() * rho0.matrix() * v;
    let phases: Vec<Complex64> = s
        .eigenvalues
        .iter()
        .map(|&e| Complex64::from_polar(1.0, -e * t))
        .collect();
    for j in 0..m.nrows() {
        for k in 0..m.ncols() {
            m[(j, k)] *= phases[j] * phases[k].conj();
        }
    }
    let mut out = v * m * v.adjoint();
    crate::qstate::symmetrize(&mut out);
    Ok(DensityOperator::from_raw(rho0.n_qubits(), out))
}

/// Mean and standard deviation of H in a pure state. The variance is taken as
/// `‖(H - <H>)ψ‖²`, which stays accurate for near-stationary states.
pub fn energy_stats_pure(spec: &HamiltonianSpec, psi: &StateVector) -> Result<EnergyStats> {
    check_dim(spec, psi.dim())?;
    let a = psi.amplitudes();
    let h_psi = spec.dense() * a;
    let mean = a.dotc(&h_psi).re;
    let residual = h_psi - a.scale(mean);
    Ok(EnergyStats {
        mean,
        fluctuation: residual.norm(),
        quantum_fluctuation: None,
    })
}

pub fn energy_stats_mixed(spec: &HamiltonianSpec, rho: &DensityOperator) -> Result<EnergyStats> {
    check_dim(spec, rho.dim())?;
    let h = spec.dense();
    let mean = linalg::trace_product(rho.matrix(), h).re;
    let shifted = h - linalg::identity(h.nrows()).scale(mean);
    let variance = linalg::trace_product(&(rho.matrix() * &shifted), &shifted).re;
    let fluctuation = clamp_variance(variance)?.sqrt();
    Ok(EnergyStats {
        mean,
        fluctuation,
        quantum_fluctuation: Some((2.0 * coherence_term(h, rho) / rho.purity()).sqrt()),
    })
}

fn clamp_variance(v: f64) -> Result<f64> {
    if v >= 0.0 {
        Ok(v)
    } else if v >= -VARIANCE_ROUNDOFF {
        Ok(0.0)
    } else {
        Err(Error::NegativeVariance(v))
    }
}

/// `Tr ρ²H² - Tr (ρH)²`, evaluated as `‖[H, ρ]‖²/2` so it is nonnegative by
/// construction.
fn coherence_term(h: &CMatrix, rho: &DensityOperator) -> f64 {
    0.5 * linalg::frobenius_sq(&linalg::commutator(h, rho.matrix()))
}

/// Instantaneous speed of a mixed state under the Fubini-Study-type metric
/// `dS² = 4(1 - Tr[ρ(t+dt)ρ(t)]/Tr ρ²)`.
pub fn mixed_fs_speed(spec: &HamiltonianSpec, rho: &DensityOperator) -> Result<f64> {
    check_dim(spec, rho.dim())?;
    Ok((4.0 * coherence_term(spec.dense(), rho) / rho.purity()).sqrt())
}

/// Sampled states of one trajectory.
#[derive(Debug, Clone)]
pub enum TrajectoryStates {
    Pure(Vec<StateVector>),
    Mixed(Vec<DensityOperator>),
}

impl TrajectoryStates {
    fn len(&self) -> usize {
        match self {
            TrajectoryStates::Pure(v) => v.len(),
            TrajectoryStates::Mixed(v) => v.len(),
        }
    }
}

/// A sampled curve `t -> state`. Piecewise-constant Hamiltonians are supported
/// by tagging each sample with its generator; segment boundaries are sampled
/// on both sides, so `times` is non-decreasing rather than strictly ascending.
#[derive(Debug, Clone)]
pub struct Trajectory<'a> {
    times: Vec<f64>,
    states: TrajectoryStates,
    generators: Vec<&'a HamiltonianSpec>,
}

impl<'a> Trajectory<'a> {
    pub fn new(
        times: Vec<f64>,
        states: TrajectoryStates,
        generators: Vec<&'a HamiltonianSpec>,
    ) -> Result<Self> {
        if times.len() != states.len() || times.len() != generators.len() {
            return Err(Error::InvalidArgument(
                "trajectory times, states and generators differ in length".into(),
            ));
        }
        if times.first().is_some_and(|&t| t != 0.0) {
            return Err(Error::InvalidArgument(
                "trajectory must start at t = 0".into(),
            ));
        }
        if times.windows(2).any(|w| !(w[1] >= w[0])) {
            return Err(Error::InvalidArgument(
                "trajectory times must be non-decreasing".into(),
            ));
        }
        Ok(Self {
            times,
            states,
            generators,
        })
    }

    /// `steps + 1` uniformly spaced samples of `e^{-iHt}|psi0>` on `[0, tau]`.
    pub fn pure(
        spec: &'a HamiltonianSpec,
        psi0: &StateVector,
        tau: f64,
        steps: usize,
    ) -> Result<Self> {
        Self::pure_schedule(&[(tau, spec)], psi0, steps)
    }

    pub fn mixed(
        spec: &'a HamiltonianSpec,
        rho0: &DensityOperator,
        tau: f64,
        steps: usize,
    ) -> Result<Self> {
        Self::mixed_schedule(&[(tau, spec)], rho0, steps)
    }

    /// Piecewise-constant evolution: each `(duration, H)` segment is sampled
    /// with `steps_per_segment` intervals.
    pub fn pure_schedule(
        segments: &[(f64, &'a HamiltonianSpec)],
        psi0: &StateVector,
        steps_per_segment: usize,
    ) -> Result<Self> {
        let mut current = psi0.clone();
        Self::sample_schedule(segments, steps_per_segment, |spec, dt, keep| {
            let next = propagate_pure(spec, &current, dt)?;
            if keep {
                current = next.clone();
            }
            Ok(next)
        })
        .map(|(times, states, generators)| Self {
            times,
            states: TrajectoryStates::Pure(states),
            generators,
        })
    }

    pub fn mixed_schedule(
        segments: &[(f64, &'a HamiltonianSpec)],
        rho0: &DensityOperator,
        steps_per_segment: usize,
    ) -> Result<Self> {
        let mut current = rho0.clone();
        Self::sample_schedule(segments, steps_per_segment, |spec, dt, keep| {
            let next = propagate_density(spec, &current, dt)?;
            if keep {
                current = next.clone();
            }
            Ok(next)
        })
        .map(|(times, states, generators)| Self {
            times,
            states: TrajectoryStates::Mixed(states),
            generators,
        })
    }

    /// Drives `advance(spec, dt_from_segment_start, is_segment_end)`; the
    /// closure returns the state at that offset within the current segment.
    #[allow(clippy::type_complexity)]
    fn sample_schedule<S>(
        segments: &[(f64, &'a HamiltonianSpec)],
        steps: usize,
        mut advance: impl FnMut(&HamiltonianSpec, f64, bool) -> Result<S>,
    ) -> Result<(Vec<f64>, Vec<S>, Vec<&'a HamiltonianSpec>)> {
        if steps == 0 || segments.is_empty() {
            return Err(Error::InvalidArgument(
                "need at least one segment and one step".into(),
            ));
        }
        let mut times = Vec::new();
        let mut states = Vec::new();
        let mut generators = Vec::new();
        let mut start = 0.0;
        for &(duration, spec) in segments {
            if !(duration >= 0.0 && duration.is_finite()) {
                return Err(Error::Domain {
                    what: "segment duration",
                    value: duration,
                });
            }
            for k in 0..=steps {
                let dt = duration * k as f64 / steps as f64;
                times.push(start + dt);
                states.push(advance(spec, dt, k == steps)?);
                generators.push(spec);
            }
            start += duration;
        }
        Ok((times, states, generators))
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn states(&self) -> &TrajectoryStates {
        &self.states
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    fn speed_at(&self, i: usize, metric: SpeedMetric) -> Result<f64> {
        let spec = self.generators[i];
        match (&self.states, metric) {
            (TrajectoryStates::Pure(s), SpeedMetric::PureFs | SpeedMetric::MixedFs) => {
                Ok(2.0 * energy_stats_pure(spec, &s[i])?.fluctuation)
            }
            (TrajectoryStates::Pure(s), SpeedMetric::Bures) => {
                Ok(energy_stats_pure(spec, &s[i])?.fluctuation)
            }
            (TrajectoryStates::Mixed(_), SpeedMetric::PureFs) => Err(Error::InvalidArgument(
                "pure Fubini-Study speed requested for a mixed trajectory".into(),
            )),
            (TrajectoryStates::Mixed(s), SpeedMetric::MixedFs) => mixed_fs_speed(spec, &s[i]),
            (TrajectoryStates::Mixed(s), SpeedMetric::Bures) => {
                Ok(energy_stats_mixed(spec, &s[i])?.fluctuation)
            }
        }
    }
}

/// Composite-trapezoid integral of the instantaneous speed.
pub fn path_length(trajectory: &Trajectory<'_>, metric: SpeedMetric) -> Result<f64> {
    if trajectory.len() < 2 {
        return Err(Error::InvalidArgument(
            "path length needs at least two samples".into(),
        ));
    }
    let speeds = (0..trajectory.len())
        .map(|i| trajectory.speed_at(i, metric))
        .collect::<Result<Vec<_>>>()?;
    Ok(trajectory
        .times
        .windows(2)
        .zip(speeds.windows(2))
        .map(|(t, v)| 0.5 * (t[1] - t[0]) * (v[0] + v[1]))
        .sum())
}
