//! (θ, τ) grid sweeps of the bound reports, and their summaries.

use rayon::prelude::*;
use serde::Serialize;

use crate::bounds::{self, BoundFlavor, BoundReport, Quadrature};
use crate::entangle::AlsOptions;
use crate::error::{CellError, Error, Result};
use crate::hamiltonian::{cluster_ising_on, heisenberg_xyz, HamiltonianSpec, Topology};
use crate::qstate::{density_from_pure, product_state};

pub const DEFAULT_SATURATION_THRESHOLD: f64 = 0.1;
pub const DEFAULT_GRID_STEPS: usize = 61;
pub const DEFAULT_TAU_MAX: f64 = 3.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Model {
    Cluster,
    Xyz,
}

/// Inclusive uniform grid `min, ..., max` with `steps` points.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GridRange {
    pub min: f64,
    pub max: f64,
    pub steps: usize,
}

impl GridRange {
    pub fn new(min: f64, max: f64, steps: usize) -> Self {
        Self { min, max, steps }
    }

    pub fn values(&self) -> Vec<f64> {
        let last = self.steps - 1;
        (0..self.steps)
            .map(|i| {
                if i == last {
                    self.max
                } else {
                    self.min + (self.max - self.min) * i as f64 / last as f64
                }
            })
            .collect()
    }

    fn spacing(&self) -> f64 {
        (self.max - self.min) / (self.steps - 1) as f64
    }

    fn validate(&self, what: &str) -> Result<()> {
        if self.steps < 2 {
            return Err(Error::InvalidArgument(format!(
                "{what}: at least 2 steps required"
            )));
        }
        if !(self.min.is_finite() && self.max.is_finite()) || self.min > self.max {
            return Err(Error::InvalidArgument(format!(
                "{what}: range [{}, {}] is not ordered",
                self.min, self.max
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepConfig {
    pub model: Model,
    pub n_qubits: usize,
    pub j: f64,
    pub gamma: f64,
    pub mu: f64,
    pub h: f64,
    /// Chain topology; `None` selects the model default (open cluster chain,
    /// XYZ ring).
    pub topology: Option<Topology>,
    pub phi: f64,
    pub theta_range: GridRange,
    pub tau_range: GridRange,
    pub flavor: BoundFlavor,
    /// Depolarizing weight of the initial state for mixed flavors.
    pub mixing_p: Option<f64>,
    pub seed: u64,
    pub saturation_threshold: f64,
    /// Optimizer settings for the mixed-flavor entanglement surrogates.
    pub restarts: usize,
    pub max_iters: usize,
    pub tol: f64,
}

impl Default for SweepConfig {
    fn default() -> Self {
        let als = AlsOptions::default();
        Self {
            model: Model::Cluster,
            n_qubits: 3,
            j: 1.0,
            gamma: 0.0,
            mu: 0.0,
            h: 0.0,
            topology: None,
            phi: 0.0,
            theta_range: GridRange::new(0.0, std::f64::consts::PI, DEFAULT_GRID_STEPS),
            tau_range: GridRange::new(0.0, DEFAULT_TAU_MAX, DEFAULT_GRID_STEPS),
            flavor: BoundFlavor::PureFs,
            mixing_p: None,
            seed: 0,
            saturation_threshold: DEFAULT_SATURATION_THRESHOLD,
            restarts: als.restarts,
            max_iters: als.max_iters,
            tol: als.tol,
        }
    }
}

impl SweepConfig {
    pub fn validate(&self) -> Result<()> {
        self.theta_range.validate("theta range")?;
        self.tau_range.validate("tau range")?;
        if self.theta_range.min < 0.0 || self.theta_range.max > std::f64::consts::PI {
            return Err(Error::InvalidArgument(
                "theta must lie within [0, pi]".into(),
            ));
        }
        if self.tau_range.min < 0.0 {
            return Err(Error::InvalidArgument("tau must be nonnegative".into()));
        }
        if self.n_qubits < 2 {
            return Err(Error::InvalidRegister(
                "sweeps need at least two qubits".into(),
            ));
        }
        if let Some(p) = self.mixing_p {
            if self.flavor == BoundFlavor::PureFs {
                return Err(Error::InvalidArgument(
                    "mixing_p requires a mixed flavor".into(),
                ));
            }
            if !(0.0..=1.0).contains(&p) {
                return Err(Error::Domain {
                    what: "depolarizing probability",
                    value: p,
                });
            }
        }
        if !self.saturation_threshold.is_finite() {
            return Err(Error::InvalidArgument(
                "saturation threshold must be finite".into(),
            ));
        }
        Ok(())
    }

    pub fn effective_topology(&self) -> Topology {
        self.topology.unwrap_or(match self.model {
            Model::Cluster => Topology::Open,
            Model::Xyz => Topology::Ring,
        })
    }

    pub fn hamiltonian(&self) -> Result<HamiltonianSpec> {
        let topology = self.effective_topology();
        match self.model {
            Model::Cluster => cluster_ising_on(self.n_qubits, self.j, topology),
            Model::Xyz => {
                heisenberg_xyz(self.n_qubits, self.j, self.gamma, self.mu, self.h, topology)
            }
        }
    }

    pub fn als_options(&self) -> AlsOptions {
        AlsOptions {
            restarts: self.restarts,
            max_iters: self.max_iters,
            tol: self.tol,
            seed: self.seed,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct CellIndex {
    pub theta_index: usize,
    pub tau_index: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct SweepResult {
    pub config: SweepConfig,
    pub theta_values: Vec<f64>,
    pub tau_values: Vec<f64>,
    /// Row-major: θ outer, τ inner.
    pub cells: Vec<BoundReport>,
    pub min_delta: f64,
    pub max_delta: f64,
    pub saturation_fraction: f64,
    pub violations: Vec<CellIndex>,
}

impl SweepResult {
    pub fn cell(&self, theta_index: usize, tau_index: usize) -> &BoundReport {
        &self.cells[theta_index * self.tau_values.len() + tau_index]
    }

    fn index_of(&self, flat: usize) -> CellIndex {
        CellIndex {
            theta_index: flat / self.tau_values.len(),
            tau_index: flat % self.tau_values.len(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Execution {
    Parallel,
    Serial,
}

fn evaluate_cell(
    config: &SweepConfig,
    spec: &HamiltonianSpec,
    opts: &AlsOptions,
    theta: f64,
    tau: f64,
) -> Result<BoundReport> {
    if config.flavor == BoundFlavor::PureFs {
        return bounds::check_pure_product(spec, theta, config.phi, tau);
    }
    let p = config.mixing_p.unwrap_or(0.0);
    let rho0 =
        density_from_pure(&product_state(theta, config.phi, config.n_qubits)?).depolarized(p)?;
    let report = match config.flavor {
        BoundFlavor::MixedFs => {
            bounds::check_mixed_fs(spec, &rho0, tau, Quadrature::ClosedForm, opts)?
        }
        _ => bounds::check_bures(spec, &rho0, tau, Quadrature::ClosedForm, opts)?,
    };
    Ok(report.at_angles(theta, config.phi).with_mixing(p))
}

pub fn run_sweep(config: &SweepConfig) -> Result<SweepResult> {
    run_sweep_with(config, Execution::Parallel)
}

/// Evaluates every (θ, τ) cell; the Hamiltonian is diagonalized once and
/// shared read-only by all workers.
pub fn run_sweep_with(config: &SweepConfig, execution: Execution) -> Result<SweepResult> {
    config.validate()?;
    let spec = config.hamiltonian()?;
    spec.spectral()?;
    let opts = config.als_options();
    let theta_values = config.theta_range.values();
    let tau_values = config.tau_range.values();
    let n_tau = tau_values.len();
    let eval = |flat: usize| {
        let (i, j) = (flat / n_tau, flat % n_tau);
        evaluate_cell(config, &spec, &opts, theta_values[i], tau_values[j]).map_err(|e| CellError {
            theta_index: i,
            tau_index: j,
            message: e.to_string(),
        })
    };
    let total = theta_values.len() * n_tau;
    let outcomes: Vec<std::result::Result<BoundReport, CellError>> = match execution {
        Execution::Parallel => (0..total).into_par_iter().map(eval).collect(),
        Execution::Serial => (0..total).map(eval).collect(),
    };
    let mut cells = Vec::with_capacity(total);
    let mut failures = Vec::new();
    for outcome in outcomes {
        match outcome {
            Ok(r) => cells.push(r),
            Err(e) => failures.push(e),
        }
    }
    if !failures.is_empty() {
        return Err(Error::Sweep(failures));
    }
    let mut result = SweepResult {
        config: config.clone(),
        theta_values,
        tau_values,
        cells,
        min_delta: 0.0,
        max_delta: 0.0,
        saturation_fraction: 0.0,
        violations: Vec::new(),
    };
    let summary = summarize(&result);
    result.min_delta = summary.min_delta;
    result.max_delta = summary.max_delta;
    result.saturation_fraction = summary.saturation_fraction;
    result.violations = (0..result.cells.len())
        .filter(|&k| result.cells[k].is_violation())
        .map(|k| result.index_of(k))
        .collect();
    Ok(result)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SweepSummary {
    pub min_delta: f64,
    pub max_delta: f64,
    pub argmin: CellIndex,
    pub saturation_threshold: f64,
    pub saturation_fraction: f64,
    pub violation_count: usize,
    /// Largest `|Δδ| / spacing` between adjacent cells along either axis.
    pub lipschitz_estimate: f64,
}

/// Share of cells with `delta < threshold`.
pub fn saturation_fraction(cells: &[BoundReport], threshold: f64) -> f64 {
    if cells.is_empty() {
        return 0.0;
    }
    cells.iter().filter(|c| c.delta < threshold).count() as f64 / cells.len() as f64
}

pub fn summarize(result: &SweepResult) -> SweepSummary {
    let cells = &result.cells;
    let mut argmin = 0;
    let mut max_delta = f64::NEG_INFINITY;
    for (k, c) in cells.iter().enumerate() {
        if c.delta < cells[argmin].delta {
            argmin = k;
        }
        max_delta = max_delta.max(c.delta);
    }
    let n_theta = result.theta_values.len();
    let n_tau = result.tau_values.len();
    let d_theta = result.config.theta_range.spacing();
    let d_tau = result.config.tau_range.spacing();
    let mut lipschitz: f64 = 0.0;
    for i in 0..n_theta {
        for j in 0..n_tau {
            let here = result.cell(i, j).delta;
            if i + 1 < n_theta && d_theta > 0.0 {
                lipschitz = lipschitz.max((result.cell(i + 1, j).delta - here).abs() / d_theta);
            }
            if j + 1 < n_tau && d_tau > 0.0 {
                lipschitz = lipschitz.max((result.cell(i, j + 1).delta - here).abs() / d_tau);
            }
        }
    }
    let threshold = result.config.saturation_threshold;
    SweepSummary {
        min_delta: cells.get(argmin).map_or(0.0, |c| c.delta),
        max_delta: if cells.is_empty() { 0.0 } else { max_delta },
        argmin: result.index_of(argmin),
        saturation_threshold: threshold,
        saturation_fraction: saturation_fraction(cells, threshold),
        violation_count: cells.iter().filter(|c| c.is_violation()).count(),
        lipschitz_estimate: lipschitz,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small(theta_steps: usize, tau_steps: usize) -> SweepConfig {
        SweepConfig {
            theta_range: GridRange::new(0.0, std::f64::consts::PI, theta_steps),
            tau_range: GridRange::new(0.0, 3.0, tau_steps),
            ..Default::default()
        }
    }

    #[test]
    fn grid_endpoints_are_exact() {
        let v = GridRange::new(0.0, std::f64::consts::PI, 61).values();
        assert_eq!(v[0], 0.0);
        assert_eq!(v[60], std::f64::consts::PI);
        assert_eq!(GridRange::new(0.0, 3.0, 61).values()[20], 1.0);
    }

    #[test]
    fn zero_tau_range_gives_zero_deltas() {
        let mut c = small(7, 2);
        c.tau_range = GridRange::new(0.0, 0.0, 2);
        let r = run_sweep(&c).unwrap();
        assert!(r.cells.iter().all(|c| c.delta == 0.0));
        let s = summarize(&r);
        assert_eq!(
            (s.min_delta, s.max_delta, s.saturation_fraction),
            (0.0, 0.0, 1.0)
        );
    }

    #[test]
    fn pure_sweep_has_no_violations() {
        let r = run_sweep(&small(13, 13)).unwrap();
        assert!(r.violations.is_empty());
        assert!(r.min_delta >= -1e-9);
        assert_eq!(r.cells.len(), 169);
        assert_eq!(r.cell(3, 4).params.theta, Some(r.theta_values[3]));
    }

    #[test]
    fn serial_and_parallel_agree() {
        let mut c = small(5, 5);
        c.model = Model::Xyz;
        c.gamma = 0.5;
        c.mu = 0.5;
        c.h = 1.5;
        let a = run_sweep_with(&c, Execution::Parallel).unwrap();
        let b = run_sweep_with(&c, Execution::Serial).unwrap();
        assert_eq!(a.cells, b.cells);
    }

    #[test]
    fn mixed_sweep_runs() {
        let mut c = small(4, 4);
        c.flavor = BoundFlavor::Bures;
        c.mixing_p = Some(0.2);
        c.restarts = 4;
        let r = run_sweep(&c).unwrap();
        assert!(r.cells.iter().all(|c| c.surrogate));
        assert!(r.violations.is_empty());
    }

    #[test]
    fn saturation_fraction_is_monotone_in_threshold() {
        let r = run_sweep(&small(9, 9)).unwrap();
        let mut last = 0.0;
        for t in [-0.1, 0.0, 0.05, 0.1, 0.3, 1.0, 10.0] {
            let f = saturation_fraction(&r.cells, t);
            assert!(f >= last);
            last = f;
        }
        assert_eq!(last, 1.0);
    }

    #[test]
    fn invalid_configs_are_rejected() {
        let mut c = small(1, 5);
        assert!(run_sweep(&c).is_err());
        c = small(5, 5);
        c.theta_range.max = 4.0;
        assert!(run_sweep(&c).is_err());
        c = small(5, 5);
        c.mixing_p = Some(0.1);
        assert!(run_sweep(&c).is_err());
        c = small(5, 5);
        c.tau_range = GridRange::new(2.0, 1.0, 5);
        assert!(run_sweep(&c).is_err());
    }
}
