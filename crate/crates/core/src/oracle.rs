//! Brute-force minimax over SU(2) targets, independent of the closed form.
//!
//! The inner maximum over program states is the top eigenvalue of `S†S`,
//! so the only search is the outer one over the 3-sphere of targets.

use std::io::Write;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::channel::{program_overlap, UNITARY_TOL};
use crate::cxmat::ComplexMatrix;
use crate::error::{Error, Result};
use crate::minimax::{best_fidelity_from_s, fidelity_uv, s_operator_unchecked, worst_case_fidelity};
use crate::pauli::{bloch_to_matrix, BlochUnitary};
use crate::random::random_density;

/// Smallest accepted sample size; the forced axis points alone take 8.
pub const MIN_RESOLUTION: usize = 100;
/// Candidates handed to the local polish.
const POLISH_CANDIDATES: usize = 4;
const FORCED_POINTS: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScanConfig {
    /// Number of points sampled on S³, forced axis points included.
    pub resolution: usize,
    /// Simplex iterations per polished candidate.
    pub refine_steps: usize,
    pub seed: u64,
    /// Random program states drawn by [`sigma_dominance_check`].
    pub sigma_samples: usize,
}

impl Default for ScanConfig {
    fn default() -> Self {
        Self {
            resolution: 10_000,
            refine_steps: 50,
            seed: 0,
            sigma_samples: 1_000,
        }
    }
}

impl ScanConfig {
    pub fn validate(&self) -> Result<()> {
        if self.resolution < MIN_RESOLUTION {
            return Err(Error::Config(format!(
                "resolution {} is below the minimum {MIN_RESOLUTION}",
                self.resolution
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ScanResult {
    pub f_min: f64,
    pub worst_bloch: BlochUnitary,
    /// `f_min` minus the closed-form worst-case fidelity.
    pub gap_to_closed_form: f64,
    pub evaluations: usize,
}

// Additive recurrence with the generalised golden ratio: φ⁴ = φ + 1.
const PHI3: f64 = 1.220_744_084_605_759_5;
const STEPS: [f64; 3] = [1.0 / PHI3, 1.0 / (PHI3 * PHI3), 1.0 / (PHI3 * PHI3 * PHI3)];

fn sample_shift(seed: u64) -> [f64; 3] {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    std::array::from_fn(|_| rng.random::<f64>())
}

/// Point `k` of the sequence. Indices below 8 are `±e_j`; the rest are
/// mapped from the unit cube to S³ by the area-preserving quaternion map.
fn sample_point(shift: &[f64; 3], k: usize) -> BlochUnitary {
    if k < FORCED_POINTS {
        return BlochUnitary::axis(k / 2, if k.is_multiple_of(2) { 1.0 } else { -1.0 });
    }
    let i = (k - FORCED_POINTS + 1) as f64;
    let u: [f64; 3] = std::array::from_fn(|d| (shift[d] + i * STEPS[d]).fract());
    let tau = std::f64::consts::TAU;
    let (r1, r2) = ((1.0 - u[0]).sqrt(), u[0].sqrt());
    let n = [
        r1 * (tau * u[1]).sin(),
        r1 * (tau * u[1]).cos(),
        r2 * (tau * u[2]).sin(),
        r2 * (tau * u[2]).cos(),
    ];
    BlochUnitary::normalized(n).expect("unit by construction")
}

/// Deterministic low-discrepancy sample of S³. A larger resolution with the
/// same seed yields a superset of a smaller one.
pub fn sample_su2(config: &ScanConfig) -> impl Iterator<Item = BlochUnitary> {
    let shift = sample_shift(config.seed);
    (0..config.resolution).map(move |k| sample_point(&shift, k))
}

fn objective(v: &ComplexMatrix, b: &BlochUnitary) -> f64 {
    best_fidelity_from_s(&s_operator_unchecked(&bloch_to_matrix(b), v))
}

/// `(value, index)` pairs ordered so that ties resolve to the lower index.
fn better(a: &(f64, usize), b: &(f64, usize)) -> bool {
    a.0 < b.0 || (a.0 == b.0 && a.1 < b.1)
}

fn merge_best(mut a: Vec<(f64, usize)>, b: Vec<(f64, usize)>) -> Vec<(f64, usize)> {
    for item in b {
        insert_best(&mut a, item);
    }
    a
}

fn insert_best(list: &mut Vec<(f64, usize)>, item: (f64, usize)) {
    let pos = list.iter().position(|x| better(&item, x)).unwrap_or(list.len());
    if pos < POLISH_CANDIDATES {
        list.insert(pos, item);
        list.truncate(POLISH_CANDIDATES);
    }
}

/// Orthonormal basis of the tangent space of S³ at `n`.
fn tangent_basis(n: &[f64; 4]) -> [[f64; 4]; 3] {
    let mut basis: Vec<[f64; 4]> = Vec::with_capacity(3);
    let mut frame = vec![*n];
    for j in 0..4 {
        if basis.len() == 3 {
            break;
        }
        let mut e = [0.0; 4];
        e[j] = 1.0;
        for f in &frame {
            let d: f64 = e.iter().zip(f).map(|(a, b)| a * b).sum();
            for (x, y) in e.iter_mut().zip(f) {
                *x -= d * y;
            }
        }
        let norm = e.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > 0.5 {
            let e = e.map(|x| x / norm);
            frame.push(e);
            basis.push(e);
        }
    }
    [basis[0], basis[1], basis[2]]
}

fn chart_point(base: &[f64; 4], basis: &[[f64; 4]; 3], x: &[f64; 3]) -> BlochUnitary {
    let mut n = *base;
    for (xi, e) in x.iter().zip(basis) {
        for (a, b) in n.iter_mut().zip(e) {
            *a += xi * b;
        }
    }
    BlochUnitary::normalized(n).expect("chart point is near the sphere")
}

/// Nelder–Mead in a tangent chart around `start`, re-projected onto S³.
fn polish(v: &ComplexMatrix, start: BlochUnitary, step: f64, iterations: usize) -> (f64, BlochUnitary, usize) {
    let base = start.components();
    let basis = tangent_basis(&base);
    let mut evals = 0usize;
    let mut eval = |x: &[f64; 3]| {
        evals += 1;
        objective(v, &chart_point(&base, &basis, x))
    };

    let mut simplex: Vec<([f64; 3], f64)> = Vec::with_capacity(4);
    simplex.push(([0.0; 3], eval(&[0.0; 3])));
    for d in 0..3 {
        let mut x = [0.0; 3];
        x[d] = step;
        let f = eval(&x);
        simplex.push((x, f));
    }

    let lerp = |a: &[f64; 3], b: &[f64; 3], t: f64| -> [f64; 3] {
        std::array::from_fn(|d| a[d] + t * (b[d] - a[d]))
    };
    for _ in 0..iterations {
        simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
        let centroid: [f64; 3] = std::array::from_fn(|d| simplex[..3].iter().map(|p| p.0[d]).sum::<f64>() / 3.0);
        let (worst, f_worst) = simplex[3];
        let reflected = lerp(&centroid, &worst, -1.0);
        let f_r = eval(&reflected);
        if f_r < simplex[0].1 {
            let expanded = lerp(&centroid, &worst, -2.0);
            let f_e = eval(&expanded);
            simplex[3] = if f_e < f_r { (expanded, f_e) } else { (reflected, f_r) };
        } else if f_r < simplex[2].1 {
            simplex[3] = (reflected, f_r);
        } else {
            let (target, f_t) = if f_r < f_worst { (reflected, f_r) } else { (worst, f_worst) };
            let contracted = lerp(&centroid, &target, 0.5);
            let f_c = eval(&contracted);
            if f_c < f_t {
                simplex[3] = (contracted, f_c);
            } else {
                let best = simplex[0].0;
                for p in simplex.iter_mut().skip(1) {
                    p.0 = lerp(&best, &p.0, 0.5);
                    p.1 = eval(&p.0);
                }
            }
        }
    }
    simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
    let (x, f) = simplex[0];
    (f, chart_point(&base, &basis, &x), evals)
}

/// Numerical `min_U max_σ` overlap for a fixed interaction `v`.
///
/// The result does not depend on how rayon partitions the samples.
pub fn minimax_scan(v: &ComplexMatrix, config: &ScanConfig) -> Result<ScanResult> {
    config.validate()?;
    v.require_dim(4)?;
    v.require_unitary(UNITARY_TOL)?;
    let reference = worst_case_fidelity(v)?.fidelity;

    let shift = sample_shift(config.seed);
    let best = (0..config.resolution)
        .into_par_iter()
        .fold(Vec::new, |mut acc, k| {
            insert_best(&mut acc, (objective(v, &sample_point(&shift, k)), k));
            acc
        })
        .reduce(Vec::new, merge_best);

    let (mut f_min, k_min) = best[0];
    let mut worst_bloch = sample_point(&shift, k_min);
    let mut evaluations = config.resolution;
    if config.refine_steps > 0 {
        // Roughly the sample spacing: S³ has volume 2π².
        let step = 0.5 * (2.0 * std::f64::consts::PI.powi(2) / config.resolution as f64).cbrt();
        for &(_, k) in &best {
            let (f, b, e) = polish(v, sample_point(&shift, k), step, config.refine_steps);
            evaluations += e;
            if f < f_min {
                f_min = f;
                worst_bloch = b;
            }
        }
    }
    Ok(ScanResult {
        f_min,
        worst_bloch,
        gap_to_closed_form: f_min - reference,
        evaluations,
    })
}

/// Writes `index,n0,n1,n2,n3,fidelity` for every raw sample point.
pub fn write_trace<W: Write>(v: &ComplexMatrix, config: &ScanConfig, out: W) -> Result<()> {
    config.validate()?;
    v.require_unitary(UNITARY_TOL)?;
    let io = |e: csv::Error| Error::Config(format!("trace output: {e}"));
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["index", "n0", "n1", "n2", "n3", "fidelity"]).map_err(io)?;
    for (k, b) in sample_su2(config).enumerate() {
        let n = b.components();
        let f = objective(v, &b);
        w.write_record([k.to_string(), n[0].to_string(), n[1].to_string(), n[2].to_string(), n[3].to_string(), f.to_string()])
            .map_err(io)?;
    }
    w.flush().map_err(|e| Error::Config(format!("trace output: {e}")))?;
    Ok(())
}

/// Largest program overlap over `n` random mixed program states.
pub fn sigma_dominance_check(u: &ComplexMatrix, v: &ComplexMatrix, n: usize, seed: u64) -> Result<f64> {
    fidelity_uv(u, v)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut best = f64::NEG_INFINITY;
    for _ in 0..n {
        let sigma = random_density(&mut rng);
        best = best.max(program_overlap(u, v, &sigma)?);
    }
    Ok(best)
}
