//! Acceptance gate: one line per criterion, nonzero exit if any fails.

use std::f64::consts::{FRAC_PI_4, PI};
use std::process::{Command, ExitCode};
use std::time::Instant;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use qslgeom::bounds::{self, Quadrature};
use qslgeom::entangle::{self, AlsOptions, DEFAULT_GRID_PER_ANGLE};
use qslgeom::evolve;
use qslgeom::hamiltonian::{cluster_ising, heisenberg_xyz, random_pauli_hamiltonian, Topology};
use qslgeom::metrics;
use qslgeom::oracle;
use qslgeom::qstate::{density_from_pure, product_state, DensityOperator, StateVector};
use qslgeom::sweeps::{self, GridRange, Model, SweepConfig, SweepResult};

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(passed: bool, detail: String) -> Outcome {
    Outcome { passed, detail }
}

fn cluster_grid_config() -> SweepConfig {
    SweepConfig {
        model: Model::Cluster,
        n_qubits: 3,
        theta_range: GridRange::new(0.0, PI, 61),
        tau_range: GridRange::new(0.0, 3.0, 61),
        ..Default::default()
    }
}

fn cluster_grid_on_four_threads() -> (SweepResult, f64) {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(4)
        .build()
        .expect("thread pool");
    let start = Instant::now();
    let result = pool.install(|| sweeps::run_sweep(&cluster_grid_config()).expect("fig1 sweep"));
    (result, start.elapsed().as_secs_f64())
}

fn criterion_1() -> Outcome {
    let (result, secs) = cluster_grid_on_four_threads();
    let bad = result.cells.iter().filter(|c| c.delta < -1e-9).count();
    outcome(
        bad == 0 && secs <= 10.0,
        format!(
            "{} cells, {bad} with delta < -1e-9, min delta {:.3e}, {secs:.3} s on 4 threads",
            result.cells.len(),
            result.min_delta
        ),
    )
}

fn criterion_2() -> Outcome {
    let (result, _) = cluster_grid_on_four_threads();
    let worst_margin = result
        .cells
        .iter()
        .map(|c| c.lhs - c.rhs_geodesic)
        .fold(f64::INFINITY, f64::min);
    let worst_gap = result
        .cells
        .iter()
        .map(|c| c.rhs_geodesic - c.rhs_entanglement)
        .fold(f64::INFINITY, f64::min);
    outcome(
        worst_margin >= -1e-9 && worst_gap >= -1e-9,
        format!("min(lhs - rhs_geodesic) {worst_margin:.3e}, min(rhs_geodesic - rhs_entanglement) {worst_gap:.3e}"),
    )
}

fn criterion_3() -> Outcome {
    let spec = cluster_ising(2, 1.0).unwrap();
    let psi = product_state(FRAC_PI_4, 0.0, 2).unwrap();
    let report = bounds::check_pure(&spec, &psi, PI).unwrap();
    let numeric = oracle::cluster_point_numeric(&spec, &psi, PI).unwrap();
    let exact = oracle::cluster_point_exact();
    let pairs = [
        ("lhs", report.lhs, numeric.lhs, exact.lhs),
        ("E_G", report.entanglement, numeric.e_g, exact.e_g),
        (
            "rhs_entanglement",
            report.rhs_entanglement,
            numeric.rhs_entanglement,
            exact.rhs_entanglement,
        ),
        ("delta", report.delta, numeric.delta, exact.delta),
    ];
    let worst = pairs
        .iter()
        .map(|&(_, v, n, e)| (v - n).abs().max((v - e).abs()))
        .fold(0.0, f64::max);
    let listing: Vec<String> = pairs
        .iter()
        .map(|&(name, v, _, e)| format!("{name}={v:.12} (exact {e:.12})"))
        .collect();
    outcome(
        worst <= 1e-9,
        format!("{}; worst deviation {worst:.2e}", listing.join(", ")),
    )
}

fn max_delta_at(tau: f64) -> f64 {
    let spec = cluster_ising(3, 1.0).unwrap();
    GridRange::new(0.0, PI, 61)
        .values()
        .into_iter()
        .map(|theta| {
            bounds::check_pure_product(&spec, theta, 0.0, tau)
                .unwrap()
                .delta
        })
        .fold(f64::NEG_INFINITY, f64::max)
}

fn criterion_4() -> Outcome {
    let small = max_delta_at(0.05);
    let large = max_delta_at(3.0);
    let spec = cluster_ising(3, 1.0).unwrap();
    let zero_exact = GridRange::new(0.0, PI, 61)
        .values()
        .into_iter()
        .all(|theta| {
            bounds::check_pure_product(&spec, theta, 0.0, 0.0)
                .unwrap()
                .delta
                == 0.0
        });
    outcome(
        small <= 0.2 * large && zero_exact,
        format!(
            "max delta {small:.4e} at tau=0.05 vs {large:.4e} at tau=3 (ratio {:.4}); delta(tau=0) == 0 on all 61 thetas: {zero_exact}",
            small / large
        ),
    )
}

fn xyz_fraction(gamma: f64, mu: f64, h: f64) -> f64 {
    let config = SweepConfig {
        model: Model::Xyz,
        gamma,
        mu,
        h,
        saturation_threshold: 0.1,
        ..Default::default()
    };
    sweeps::run_sweep(&config).unwrap().saturation_fraction
}

fn criterion_5() -> Outcome {
    let mut passed = true;
    let mut parts = Vec::new();
    for (gamma, mu) in [(0.0, 0.5), (0.5, 0.0), (0.5, 0.5)] {
        let low = xyz_fraction(gamma, mu, 0.0);
        let high = xyz_fraction(gamma, mu, 1.5);
        let ok = high >= low;
        passed &= ok;
        parts.push(format!(
            "(gamma={gamma}, mu={mu}): h=0 {low:.4}, h=1.5 {high:.4} {}",
            if ok { "ok" } else { "reversed" }
        ));
    }
    outcome(passed, parts.join("; "))
}

fn criterion_6() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let opts = AlsOptions::default();
    let (mut ggm_dev, mut gm_dev): (f64, f64) = (0.0, 0.0);
    for _ in 0..100 {
        let psi = StateVector::random(3, &mut rng).unwrap();
        ggm_dev =
            ggm_dev.max((entangle::ggm(&psi).unwrap().e - oracle::ggm_direct(&psi).unwrap()).abs());
        let als = entangle::gm_als(&psi, &opts).unwrap().e;
        let brute = entangle::gm_brute(&psi, DEFAULT_GRID_PER_ANGLE).unwrap().e;
        gm_dev = gm_dev.max((als - brute).abs());
    }
    let ghz = StateVector::ghz(3).unwrap();
    let w = StateVector::w(3).unwrap();
    let refs = [
        entangle::ggm(&ghz).unwrap().e - 0.5,
        entangle::gm_als(&ghz, &opts).unwrap().e - 0.5,
        entangle::ggm(&w).unwrap().e - 1.0 / 3.0,
        entangle::gm_als(&w, &opts).unwrap().e - 5.0 / 9.0,
    ]
    .iter()
    .fold(0.0f64, |m, d| m.max(d.abs()));
    outcome(
        ggm_dev <= 1e-3 && gm_dev <= 1e-3 && refs <= 1e-3,
        format!("|ggm - direct| {ggm_dev:.2e}, |gm_als - gm_brute| {gm_dev:.2e}, GHZ/W {refs:.2e}"),
    )
}

fn criterion_7() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut rel: f64 = 0.0;
    for k in 0..50 {
        let n = 2 + k % 2;
        let spec = random_pauli_hamiltonian(n, 5, &mut rng).unwrap();
        let rho = DensityOperator::random(n, &mut rng).unwrap();
        let closed = evolve::mixed_fs_speed(&spec, &rho).unwrap();
        let fd = oracle::mixed_fs_speed_fd(&oracle::kron_hamiltonian(&spec), &rho, 1e-4).unwrap();
        rel = rel.max((closed - fd).abs() / closed);
    }
    let mut pure_dev: f64 = 0.0;
    for _ in 0..50 {
        let spec = random_pauli_hamiltonian(3, 6, &mut rng).unwrap();
        let psi = StateVector::random(3, &mut rng).unwrap();
        let speed = evolve::mixed_fs_speed(&spec, &density_from_pure(&psi)).unwrap();
        let (_, dh) = oracle::energy_moments(&oracle::kron_hamiltonian(&spec), &psi);
        pure_dev = pure_dev.max((speed - 2.0 * dh).abs());
    }
    outcome(
        rel <= 1e-5 && pure_dev <= 1e-10,
        format!(
            "finite-difference relative error {rel:.2e}, pure limit |speed - 2 dH| {pure_dev:.2e}"
        ),
    )
}

fn random_product(n: usize, rng: &mut ChaCha8Rng) -> StateVector {
    let sites: Vec<[Complex64; 2]> = (0..n)
        .map(|_| {
            let theta: f64 = rng.random_range(0.0..PI);
            let phi: f64 = rng.random_range(0.0..2.0 * PI);
            [
                Complex64::new((theta / 2.0).cos(), 0.0),
                Complex64::from_polar((theta / 2.0).sin(), phi),
            ]
        })
        .collect();
    StateVector::product_of(&sites).unwrap()
}

fn criterion_8() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let opts = AlsOptions {
        restarts: 4,
        ..Default::default()
    };
    let (mut fs_margin, mut bures_margin) = (f64::INFINITY, f64::INFINITY);
    for k in 0..100 {
        let spec = if k % 2 == 0 {
            cluster_ising(3, 1.0).unwrap()
        } else {
            heisenberg_xyz(
                3,
                1.0,
                rng.random_range(0.0..=1.0),
                rng.random_range(-1.0..1.0),
                rng.random_range(0.0..2.0),
                Topology::Ring,
            )
            .unwrap()
        };
        let p: f64 = rng.random_range(0.0..1.0);
        let rho0 = density_from_pure(&random_product(3, &mut rng))
            .depolarized(p)
            .unwrap();
        let tau = 3.0 - rng.random_range(0.0..3.0);
        let fs = bounds::check_mixed_fs(&spec, &rho0, tau, Quadrature::ClosedForm, &opts).unwrap();
        let b = bounds::check_bures(&spec, &rho0, tau, Quadrature::ClosedForm, &opts).unwrap();
        fs_margin = fs_margin.min(fs.geodesic_margin);
        bures_margin = bures_margin.min(b.geodesic_margin);
    }
    let mut contraction = f64::NEG_INFINITY;
    for _ in 0..100 {
        let a = DensityOperator::random(2, &mut rng).unwrap();
        let b = DensityOperator::random(2, &mut rng).unwrap();
        let p: f64 = rng.random_range(0.0..1.0);
        let before = metrics::bures_angle(&a, &b).unwrap().value;
        let after = metrics::bures_angle(&a.depolarized(p).unwrap(), &b.depolarized(p).unwrap())
            .unwrap()
            .value;
        contraction = contraction.max(after - before);
    }
    outcome(
        fs_margin >= -1e-9 && bures_margin >= -1e-9 && contraction <= 1e-9,
        format!(
            "min geodesic margin mixed_fs {fs_margin:.3e}, bures {bures_margin:.3e}; max Bures growth under depolarizing {contraction:.3e}"
        ),
    )
}

fn criterion_9() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let (mut sym, mut ident, mut tri): (f64, f64, f64) = (0.0, 0.0, f64::NEG_INFINITY);
    for k in 0..200 {
        let a = StateVector::random(3, &mut rng).unwrap();
        let b = StateVector::random(3, &mut rng).unwrap();
        let c = if k % 4 == 0 {
            // near-coincident third point
            evolve::propagate_pure(&random_pauli_hamiltonian(3, 4, &mut rng).unwrap(), &a, 1e-4)
                .unwrap()
        } else {
            StateVector::random(3, &mut rng).unwrap()
        };
        let d = |x: &StateVector, y: &StateVector| metrics::bargmann_angle(x, y).unwrap().value;
        sym = sym.max((d(&a, &b) - d(&b, &a)).abs());
        ident = ident.max(d(&a, &a)).max(d(&a, &a.with_global_phase(0.7)));
        tri = tri.max(d(&a, &c) - d(&a, &b) - d(&b, &c));
        tri = tri.max(d(&a, &b) - d(&a, &c) - d(&c, &b));

        let x = DensityOperator::random(2, &mut rng).unwrap();
        let y = DensityOperator::random(2, &mut rng).unwrap();
        let z = if k % 4 == 0 {
            x.depolarized(1e-6).unwrap()
        } else {
            DensityOperator::random(2, &mut rng).unwrap()
        };
        let db =
            |p: &DensityOperator, q: &DensityOperator| metrics::bures_angle(p, q).unwrap().value;
        sym = sym.max((db(&x, &y) - db(&y, &x)).abs());
        ident = ident.max(db(&x, &x));
        tri = tri.max(db(&x, &z) - db(&x, &y) - db(&y, &z));
        tri = tri.max(db(&x, &y) - db(&x, &z) - db(&z, &y));
    }
    outcome(
        sym <= 1e-9 && ident <= 1e-9 && tri <= 1e-9,
        format!("symmetry {sym:.2e}, d(x,x) {ident:.2e}, triangle excess {tri:.2e}"),
    )
}

fn sweep_twice(dir: &std::path::Path, tag: &str, args: &[&str]) -> (bool, usize) {
    let mut outputs = Vec::new();
    for k in 0..2 {
        let out = dir.join(format!("{tag}{k}.csv"));
        let status = Command::new(env!("CARGO_BIN_EXE_qslgeom"))
            .arg("sweep")
            .args(args)
            .arg("--out")
            .arg(&out)
            .status()
            .expect("run qslgeom");
        if !status.success() {
            return (false, 0);
        }
        outputs.push(std::fs::read(&out).unwrap_or_default());
    }
    (
        !outputs[0].is_empty() && outputs[0] == outputs[1],
        outputs[0].len(),
    )
}

fn criterion_10() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let conf = dir.path().join("mixed.conf");
    std::fs::write(
        &conf,
        "model = xyz\ngamma = 0.5\nmu = 0.5\nh = 1.5\nflavor = bures\nmixing-p = 0.2\nseed = 11\ntheta-steps = 9\ntau-steps = 9\nrestarts = 4\n",
    )
    .unwrap();
    let (mixed_same, mixed_len) =
        sweep_twice(dir.path(), "mixed", &["--config", conf.to_str().unwrap()]);
    let (pure_same, pure_len) = sweep_twice(
        dir.path(),
        "pure",
        &["--theta-steps", "21", "--tau-steps", "21"],
    );
    outcome(
        mixed_same && pure_same,
        format!(
            "seeded bures sweep ({mixed_len} bytes) identical: {mixed_same}; pure cluster sweep ({pure_len} bytes) identical: {pure_same}"
        ),
    )
}

type Criterion = fn() -> Outcome;

fn main() -> ExitCode {
    let criteria: [(&str, Criterion); 10] = [
        ("cluster theorem sweep", criterion_1),
        ("chain inequality", criterion_2),
        ("two-qubit cluster point", criterion_3),
        ("small-tau tightness", criterion_4),
        ("field enlarges saturation area", criterion_5),
        ("entanglement oracles", criterion_6),
        ("mixed speed consistency", criterion_7),
        ("mixed uncertainty relations", criterion_8),
        ("metric axioms", criterion_9),
        ("determinism", criterion_10),
    ];
    let mut failures = 0;
    for (k, (name, run)) in criteria.iter().enumerate() {
        let result = std::panic::catch_unwind(run).unwrap_or_else(|e| {
            let msg = e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            outcome(false, format!("panicked: {msg}"))
        });
        if !result.passed {
            failures += 1;
        }
        println!(
            "criterion {:>2} {:<32} {}  {}",
            k + 1,
            name,
            if result.passed { "PASS" } else { "FAIL" },
            result.detail
        );
    }
    println!(
        "acceptance: {} passed, {failures} failed",
        criteria.len() - failures
    );
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
