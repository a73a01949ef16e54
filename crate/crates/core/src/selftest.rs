//! Built-in cross-check suite: production routes against [`crate::oracle`].

use std::f64::consts::{FRAC_PI_4, PI};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::bounds;
use crate::entangle::{self, AlsOptions, DEFAULT_GRID_PER_ANGLE};
use crate::error::Result;
use crate::evolve;
use crate::hamiltonian::{cluster_ising, random_pauli_hamiltonian};
use crate::oracle;
use crate::qstate::{density_from_pure, product_state, DensityOperator, StateVector};
use crate::sweeps::{self, GridRange, SweepConfig};

/// Deliberate defects for checking that the suite can fail.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Fault {
    /// Report `-ΔH` instead of `ΔH`.
    DhSign,
}

#[derive(Debug, Clone, Serialize)]
pub struct CheckRow {
    pub name: &'static str,
    pub passed: bool,
    /// Largest observed deviation (or violation count) and its tolerance.
    pub worst: f64,
    pub tolerance: f64,
}

impl CheckRow {
    fn new(name: &'static str, worst: f64, tolerance: f64) -> Self {
        Self {
            name,
            passed: worst <= tolerance,
            worst,
            tolerance,
        }
    }
}

const SEED: u64 = 20_240_501;

fn dh(fault: Option<Fault>, value: f64) -> f64 {
    match fault {
        Some(Fault::DhSign) => -value,
        None => value,
    }
}

fn energy_fluctuation(fault: Option<Fault>) -> Result<CheckRow> {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let mut worst: f64 = 0.0;
    for _ in 0..20 {
        let spec = random_pauli_hamiltonian(3, 6, &mut rng)?;
        let psi = StateVector::random(3, &mut rng)?;
        let lib = dh(fault, evolve::energy_stats_pure(&spec, &psi)?.fluctuation);
        let (_, reference) = oracle::energy_moments(&oracle::kron_hamiltonian(&spec), &psi);
        worst = worst.max((lib - reference).abs());
    }
    Ok(CheckRow::new(
        "energy fluctuation vs dense expectation",
        worst,
        1e-10,
    ))
}

fn cluster_point(fault: Option<Fault>) -> Result<CheckRow> {
    let spec = cluster_ising(2, 1.0)?;
    let psi = product_state(FRAC_PI_4, 0.0, 2)?;
    let report = bounds::check_pure(&spec, &psi, PI)?;
    let lhs = PI * dh(fault, report.fluctuation);
    let delta = lhs - report.rhs_entanglement;
    let numeric = oracle::cluster_point_numeric(&spec, &psi, PI)?;
    let exact = oracle::cluster_point_exact();
    let worst = [
        (lhs - numeric.lhs).abs(),
        (report.entanglement - numeric.e_g).abs(),
        (delta - numeric.delta).abs(),
        (lhs - exact.lhs).abs(),
        (report.entanglement - exact.e_g).abs(),
        (report.rhs_entanglement - exact.rhs_entanglement).abs(),
        (delta - exact.delta).abs(),
    ]
    .into_iter()
    .fold(0.0, f64::max);
    Ok(CheckRow::new("two-qubit cluster point", worst, 1e-9))
}

fn ggm_direct() -> Result<CheckRow> {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED + 1);
    let mut worst: f64 = 0.0;
    for _ in 0..20 {
        let psi = StateVector::random(3, &mut rng)?;
        worst = worst.max((entangle::ggm(&psi)?.e - oracle::ggm_direct(&psi)?).abs());
    }
    Ok(CheckRow::new(
        "GGM closed form vs bipartite optimization",
        worst,
        1e-8,
    ))
}

fn gm_brute() -> Result<CheckRow> {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED + 2);
    let opts = AlsOptions::default();
    let mut worst: f64 = 0.0;
    for _ in 0..10 {
        let psi = StateVector::random(3, &mut rng)?;
        let als = entangle::gm_als(&psi, &opts)?.e;
        let brute = entangle::gm_brute(&psi, DEFAULT_GRID_PER_ANGLE)?.e;
        worst = worst.max((als - brute).abs());
    }
    Ok(CheckRow::new("GM alternating vs brute force", worst, 1e-3))
}

fn reference_states() -> Result<CheckRow> {
    let opts = AlsOptions::default();
    let ghz = StateVector::ghz(3)?;
    let w = StateVector::w(3)?;
    let worst = [
        (entangle::ggm(&ghz)?.e - 0.5).abs(),
        (entangle::gm_als(&ghz, &opts)?.e - 0.5).abs(),
        (entangle::ggm(&w)?.e - 1.0 / 3.0).abs(),
        (entangle::gm_als(&w, &opts)?.e - 5.0 / 9.0).abs(),
    ]
    .into_iter()
    .fold(0.0, f64::max);
    Ok(CheckRow::new("GHZ and W reference values", worst, 1e-3))
}

fn mixed_speed() -> Result<CheckRow> {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED + 3);
    let mut worst: f64 = 0.0;
    for _ in 0..10 {
        let spec = random_pauli_hamiltonian(2, 5, &mut rng)?;
        let rho = DensityOperator::random(2, &mut rng)?;
        let closed = evolve::mixed_fs_speed(&spec, &rho)?;
        let fd = oracle::mixed_fs_speed_fd(&oracle::kron_hamiltonian(&spec), &rho, 1e-3)?;
        worst = worst.max((closed - fd).abs() / closed.max(1e-300));
    }
    Ok(CheckRow::new(
        "mixed speed vs finite difference (relative)",
        worst,
        1e-5,
    ))
}

fn pure_speed_limit(fault: Option<Fault>) -> Result<CheckRow> {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED + 4);
    let mut worst: f64 = 0.0;
    for _ in 0..10 {
        let spec = random_pauli_hamiltonian(3, 6, &mut rng)?;
        let psi = StateVector::random(3, &mut rng)?;
        let speed = evolve::mixed_fs_speed(&spec, &density_from_pure(&psi))?;
        let pure = 2.0 * dh(fault, evolve::energy_stats_pure(&spec, &psi)?.fluctuation);
        worst = worst.max((speed - pure).abs());
    }
    Ok(CheckRow::new(
        "mixed speed on pure states equals 2 dH",
        worst,
        1e-10,
    ))
}

fn small_sweep() -> Result<CheckRow> {
    let config = SweepConfig {
        theta_range: GridRange::new(0.0, PI, 21),
        tau_range: GridRange::new(0.0, 3.0, 21),
        ..Default::default()
    };
    let result = sweeps::run_sweep(&config)?;
    Ok(CheckRow::new(
        "cluster sweep violations",
        result.violations.len() as f64,
        0.0,
    ))
}

/// Runs every check; a check that errors is reported as failed.
pub fn run_selftest(fault: Option<Fault>) -> Vec<CheckRow> {
    type Check = (&'static str, Box<dyn Fn() -> Result<CheckRow>>);
    let checks: Vec<Check> = vec![
        (
            "energy fluctuation",
            Box::new(move || energy_fluctuation(fault)),
        ),
        ("cluster point", Box::new(move || cluster_point(fault))),
        ("ggm direct", Box::new(ggm_direct)),
        ("gm brute", Box::new(gm_brute)),
        ("reference states", Box::new(reference_states)),
        ("mixed speed", Box::new(mixed_speed)),
        ("pure speed", Box::new(move || pure_speed_limit(fault))),
        ("sweep", Box::new(small_sweep)),
    ];
    checks
        .into_iter()
        .map(|(name, check)| {
            check().unwrap_or(CheckRow {
                name,
                passed: false,
                worst: f64::INFINITY,
                tolerance: 0.0,
            })
        })
        .collect()
}
