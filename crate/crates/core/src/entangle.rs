//! Geometric multipartite entanglement measures.
//!
//! * [`ggm`]: generalized geometric measure, `1 - max_cut λ²_max`, exact.
//! * [`gm_als`]: geometric measure against fully separable states by
//!   alternating single-site maximization; an upper bound on the true value.
//! * [`gm_brute`]: grid-search oracle for `gm_als` on up to three qubits.
//! * [`mixed_measure_surrogate`]: mixed-state measures minimized over pure
//!   product states only, hence upper bounds flagged as surrogates.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{self, CVector, ONE, ZERO};
use crate::qstate::{self, bit_of, Bipartition, DensityOperator, StateVector};

type Site = [Complex64; 2];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum MeasureKind {
    Ggm,
    Gm,
    FsMixed,
    BuresMixed,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum MixedMetric {
    Fs,
    Bures,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EntanglementValue {
    pub kind: MeasureKind,
    /// Measure value in `[0, 1]`.
    pub e: f64,
    /// `arccos sqrt(1 - e)`.
    pub g: f64,
    /// Objective value at the witness as seen by the optimizer: `|<w|ψ>|²`
    /// for pure input, `<w|ρ|w>` for mixed input.
    pub best_overlap: f64,
    /// Optimal (or best found) separable state.
    pub witness: StateVector,
    pub converged: bool,
    pub restarts_used: usize,
    /// Minimization ran over a restricted set, so `e` is an upper bound.
    pub surrogate: bool,
}

/// Options for the alternating product-state optimizer.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AlsOptions {
    pub restarts: usize,
    pub max_iters: usize,
    /// Stop once a full sweep improves the objective by less than this.
    pub tol: f64,
    pub seed: u64,
}

impl Default for AlsOptions {
    fn default() -> Self {
        Self {
            restarts: 16,
            max_iters: 500,
            tol: 1e-12,
            seed: 0,
        }
    }
}

pub const DEFAULT_GRID_PER_ANGLE: usize = 60;

const E_SLACK: f64 = 1e-12;

/// Schmidt tails below this are round-off of an exactly rank-one cut and are
/// reported as 0, so product states give `E_G = 0` exactly.
pub const SCHMIDT_TAIL_FLOOR: f64 = 1e-28;

/// `arccos sqrt(1 - e)`, evaluated as `atan2(sqrt(e), sqrt(1 - e))`.
pub fn g_of_e(e: f64) -> Result<f64> {
    if !(-E_SLACK..=1.0 + E_SLACK).contains(&e) {
        return Err(Error::Domain {
            what: "entanglement value",
            value: e,
        });
    }
    let e = e.clamp(0.0, 1.0);
    Ok(e.sqrt().atan2((1.0 - e).sqrt()))
}

/// Generalized geometric measure over all `2^{N-1} - 1` bipartitions.
pub fn ggm(psi: &StateVector) -> Result<EntanglementValue> {
    let n = psi.n_qubits();
    if n < 2 {
        return Err(Error::InvalidRegister(
            "GGM needs at least two qubits".into(),
        ));
    }
    let mut best: Option<(qstate::TopSchmidt, Bipartition)> = None;
    for cut in Bipartition::all(n)? {
        let top = qstate::top_schmidt(psi, &cut)?;
        if best.as_ref().is_none_or(|(b, _)| top.tail < b.tail) {
            best = Some((top, cut));
        }
    }
    let (top, cut) = best.expect("at least one bipartition");
    let e = if top.tail < SCHMIDT_TAIL_FLOOR {
        0.0
    } else {
        top.tail.clamp(0.0, 1.0)
    };
    Ok(EntanglementValue {
        kind: MeasureKind::Ggm,
        e,
        g: g_of_e(e)?,
        best_overlap: 1.0 - top.tail,
        witness: qstate::from_cut_product(&top.left, &top.right, &cut),
        converged: true,
        restarts_used: 0,
        surrogate: false,
    })
}

/// Target of the product-state maximization `max_φ <φ|A|φ>`.
#[derive(Clone, Copy)]
enum Target<'a> {
    Pure(&'a StateVector),
    Mixed(&'a DensityOperator),
}

impl Target<'_> {
    fn n_qubits(&self) -> usize {
        match self {
            Target::Pure(p) => p.n_qubits(),
            Target::Mixed(r) => r.n_qubits(),
        }
    }

    /// Product of all site amplitudes except `skip` for each basis index.
    fn environment(sites: &[Site], skip: Option<usize>) -> CVector {
        let n = sites.len();
        CVector::from_fn(1 << n, |b, _| {
            sites
                .iter()
                .enumerate()
                .filter(|&(q, _)| Some(q) != skip)
                .fold(ONE, |acc, (q, s)| acc * s[bit_of(b, q, n)])
        })
    }

    /// Effective 2x2 Hermitian operator on site `k` with the other sites fixed.
    fn local_operator(&self, sites: &[Site], k: usize) -> [[Complex64; 2]; 2] {
        let n = sites.len();
        let w = Self::environment(sites, Some(k));
        let mut m = [[ZERO; 2]; 2];
        match self {
            Target::Pure(psi) => {
                let mut v = [ZERO; 2];
                for (b, amp) in psi.amplitudes().iter().enumerate() {
                    v[bit_of(b, k, n)] += w[b].conj() * amp;
                }
                for a in 0..2 {
                    for c in 0..2 {
                        m[a][c] = v[a] * v[c].conj();
                    }
                }
            }
            Target::Mixed(rho) => {
                let r = rho.matrix();
                let dim = r.nrows();
                for i in 0..dim {
                    let wi = w[i].conj();
                    let a = bit_of(i, k, n);
                    for j in 0..dim {
                        m[a][bit_of(j, k, n)] += wi * r[(i, j)] * w[j];
                    }
                }
            }
        }
        m
    }

    fn value(&self, sites: &[Site]) -> f64 {
        let w = Self::environment(sites, None);
        match self {
            Target::Pure(psi) => w.dotc(psi.amplitudes()).norm_sqr(),
            Target::Mixed(rho) => w.dotc(&(rho.matrix() * &w)).re,
        }
    }
}

/// Top eigenpair of a 2x2 Hermitian matrix; `None` when the eigenvalues are
/// degenerate (any vector is optimal).
fn top_eigvec_2x2(m: &[[Complex64; 2]; 2]) -> Option<(f64, Site)> {
    let a = m[0][0].re;
    let d = m[1][1].re;
    let b = m[0][1];
    let r = (0.5 * (a - d)).hypot(b.norm());
    let lmax = 0.5 * (a + d) + r;
    let scale = a.abs() + d.abs() + b.norm();
    if r <= 1e-15 * scale || scale == 0.0 {
        return None;
    }
    let cand = if a >= d {
        [Complex64::new(lmax - d, 0.0), b.conj()]
    } else {
        [b, Complex64::new(lmax - a, 0.0)]
    };
    let cn = (cand[0].norm_sqr() + cand[1].norm_sqr()).sqrt();
    Some((lmax, [cand[0] / cn, cand[1] / cn]))
}

/// Area-uniform random point on the Bloch sphere.
fn random_site<R: Rng + ?Sized>(rng: &mut R) -> Site {
    let z: f64 = rng.random_range(-1.0..=1.0);
    let phi: f64 = rng.random_range(0.0..2.0 * PI);
    let half = z.clamp(-1.0, 1.0).acos() / 2.0;
    [
        Complex64::new(half.cos(), 0.0),
        Complex64::from_polar(half.sin(), phi),
    ]
}

fn restart_rng(seed: u64, restart: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(restart as u64);
    rng
}

struct AlsRun {
    value: f64,
    sites: Vec<Site>,
    converged: bool,
}

fn als_single(target: Target<'_>, opts: &AlsOptions, restart: usize) -> AlsRun {
    let n = target.n_qubits();
    let mut rng = restart_rng(opts.seed, restart);
    let mut sites: Vec<Site> = (0..n).map(|_| random_site(&mut rng)).collect();
    let mut prev = target.value(&sites);
    let mut converged = false;
    let mut degenerate_events = 0usize;
    for _ in 0..opts.max_iters {
        let mut reseeded = false;
        for k in 0..n {
            let m = target.local_operator(&sites, k);
            let zero = m.iter().flatten().all(|z| z.norm() == 0.0);
            if zero {
                sites[k] = random_site(&mut rng);
                reseeded = true;
                degenerate_events += 1;
            } else if let Some((_, v)) = top_eigvec_2x2(&m) {
                sites[k] = v;
            }
        }
        let current = target.value(&sites);
        if !reseeded && current - prev < opts.tol {
            converged = true;
            prev = current;
            break;
        }
        prev = current;
    }
    AlsRun {
        value: prev,
        sites,
        converged: converged && degenerate_events == 0,
    }
}

fn als(target: Target<'_>, opts: &AlsOptions) -> Result<AlsRun> {
    if opts.restarts == 0 {
        return Err(Error::InvalidArgument(
            "at least one restart is required".into(),
        ));
    }
    if opts.max_iters == 0 || !(opts.tol >= 0.0) {
        return Err(Error::InvalidArgument(
            "max_iters must be positive and tol nonnegative".into(),
        ));
    }
    let runs: Vec<AlsRun> = (0..opts.restarts)
        .into_par_iter()
        .map(|r| als_single(target, opts, r))
        .collect();
    // strict comparison: ties go to the lowest restart index
    Ok(runs
        .into_iter()
        .reduce(|best, run| if run.value > best.value { run } else { best })
        .expect("restarts > 0"))
}

/// `1 - |<w|ψ>|²` evaluated as `‖ψ - <w|ψ> w‖²`.
fn infidelity(witness: &StateVector, psi: &StateVector) -> Result<f64> {
    let c = witness.inner(psi)?;
    Ok((psi.amplitudes() - witness.amplitudes() * c)
        .norm_squared()
        .clamp(0.0, 1.0))
}

/// Geometric measure against fully separable states by alternating
/// single-site updates from `opts.restarts` random product states.
pub fn gm_als(psi: &StateVector, opts: &AlsOptions) -> Result<EntanglementValue> {
    let run = als(Target::Pure(psi), opts)?;
    let witness = StateVector::product_of(&run.sites)?;
    let e = infidelity(&witness, psi)?;
    Ok(EntanglementValue {
        kind: MeasureKind::Gm,
        e,
        g: g_of_e(e)?,
        best_overlap: run.value,
        witness,
        converged: run.converged,
        restarts_used: opts.restarts,
        surrogate: false,
    })
}

/// Bloch-sphere site from polar/azimuthal angles.
fn bloch_site(theta: f64, phi: f64) -> Site {
    [
        Complex64::new((theta / 2.0).cos(), 0.0),
        Complex64::from_polar((theta / 2.0).sin(), phi),
    ]
}

/// Brute-force geometric measure for up to three qubits.
///
/// The leading qubit's Bloch sphere is scanned on a `grid x grid` mesh; for
/// each point the remaining two-qubit problem is solved exactly by its top
/// Schmidt coefficient. The best mesh point is then polished by a compass
/// search on the two angles.
pub fn gm_brute(psi: &StateVector, grid_per_angle: usize) -> Result<EntanglementValue> {
    let n = psi.n_qubits();
    if n > 3 {
        return Err(Error::Refused(format!(
            "brute-force geometric measure is limited to 3 qubits, got {n}"
        )));
    }
    if grid_per_angle < 2 {
        return Err(Error::InvalidArgument(
            "grid needs at least 2 points per angle".into(),
        ));
    }
    let witness = match n {
        1 => psi.clone(),
        2 => {
            let cut = Bipartition::new(2, &[0])?;
            let top = qstate::top_schmidt(psi, &cut)?;
            qstate::from_cut_product(&top.left, &top.right, &cut)
        }
        _ => brute_three(psi, grid_per_angle)?,
    };
    let e = infidelity(&witness, psi)?;
    Ok(EntanglementValue {
        kind: MeasureKind::Gm,
        e,
        g: g_of_e(e)?,
        best_overlap: 1.0 - e,
        witness,
        converged: true,
        restarts_used: 0,
        surrogate: false,
    })
}

/// Contracts qubit 0 of a 3-qubit state with `site`; returns the best
/// overlap² with a product of qubits 1 and 2 and that product.
fn rest_best(psi: &StateVector, site: &Site) -> Result<(f64, StateVector)> {
    let a = psi.amplitudes();
    let rest: Vec<Complex64> = (0..4)
        .map(|r| site[0].conj() * a[r] + site[1].conj() * a[4 + r])
        .collect();
    let weight: f64 = rest.iter().map(|z| z.norm_sqr()).sum();
    if weight == 0.0 {
        return Ok((0.0, StateVector::basis(2, 0)?));
    }
    let reduced = StateVector::normalized(2, rest)?;
    let cut = Bipartition::new(2, &[0])?;
    let top = qstate::top_schmidt(&reduced, &cut)?;
    Ok((
        weight * (1.0 - top.tail),
        qstate::from_cut_product(&top.left, &top.right, &cut),
    ))
}

fn brute_three(psi: &StateVector, grid: usize) -> Result<StateVector> {
    let objective =
        |theta: f64, phi: f64| -> Result<f64> { Ok(rest_best(psi, &bloch_site(theta, phi))?.0) };
    let mut best = (f64::NEG_INFINITY, 0.0, 0.0);
    for i in 0..grid {
        let theta = PI * i as f64 / (grid - 1) as f64;
        for j in 0..grid {
            let phi = 2.0 * PI * j as f64 / grid as f64;
            let f = objective(theta, phi)?;
            if f > best.0 {
                best = (f, theta, phi);
            }
        }
    }
    let (mut f, mut theta, mut phi) = best;
    let mut step = PI / (grid - 1) as f64;
    while step > 1e-10 {
        let mut improved = false;
        for (dt, dp) in [(step, 0.0), (-step, 0.0), (0.0, step), (0.0, -step)] {
            let cand = objective(theta + dt, phi + dp)?;
            if cand > f {
                f = cand;
                theta += dt;
                phi += dp;
                improved = true;
                break;
            }
        }
        if !improved {
            step *= 0.5;
        }
    }
    let site = bloch_site(theta, phi);
    let (_, rest) = rest_best(psi, &site)?;
    let first = StateVector::product_of(&[site])?;
    qstate::tensor(&first, &rest)
}

/// Mixed-state geometric measure minimized over pure product states.
///
/// * `Fs`: `1 - <φ|ρ|φ>/Tr ρ²`, floored at 0 (the ratio can exceed one for
///   mixed `ρ`).
/// * `Bures`: `1 - sqrt(<φ|ρ|φ>)`.
pub fn mixed_measure_surrogate(
    rho: &DensityOperator,
    metric: MixedMetric,
    opts: &AlsOptions,
) -> Result<EntanglementValue> {
    let run = als(Target::Mixed(rho), opts)?;
    let witness = StateVector::product_of(&run.sites)?;
    let overlap = rho.expectation(&witness)?.clamp(0.0, 1.0);
    let (kind, e) = match metric {
        MixedMetric::Fs => {
            let sigma = qstate::density_from_pure(&witness);
            let diff = rho.matrix() - sigma.matrix();
            let gap = linalg::trace_product(rho.matrix(), &diff).re / rho.purity();
            (MeasureKind::FsMixed, gap.clamp(0.0, 1.0))
        }
        MixedMetric::Bures => (
            MeasureKind::BuresMixed,
            (1.0 - overlap.sqrt()).clamp(0.0, 1.0),
        ),
    };
    Ok(EntanglementValue {
        kind,
        e,
        g: g_of_e(e)?,
        best_overlap: run.value,
        witness,
        converged: run.converged,
        restarts_used: opts.restarts,
        surrogate: true,
    })
}
