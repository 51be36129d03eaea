//! Acceptance suite. Prints one line per criterion and exits non-zero if
//! any criterion fails.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};
use std::time::{Duration, Instant};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use progchan::channel::{apply_programmed, avg_io_fidelity, distance, program_channel};
use progchan::circuit::{build_general_circuit, build_optimal_circuit, verify_identities};
use progchan::cxmat::{equal_up_to_global_phase, kron, ComplexMatrix};
use progchan::minimax::{
    canonical_interaction, closed_form_norm, controlled_unitary_worst, dress, fidelity_uv,
    kraus_cirac_decompose, optimal_interaction, s_operator, s_operator_canonical, theta_from_alpha,
    worst_case_fidelity, Sign,
};
use progchan::oracle::{minimax_scan, ScanConfig};
use progchan::pauli::{bloch_to_matrix, hadamard_t, pauli, PhaseVector};
use progchan::random::{haar_unitary, random_bloch, random_density};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

const I: Complex64 = Complex64::new(0.0, 1.0);
/// How far a sampled minimum may fall below the closed form from rounding.
const ONE_SIDED_FLOOR: f64 = 1e-9;

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn single_thread<R: Send>(f: impl FnOnce() -> R + Send) -> R {
    rayon::ThreadPoolBuilder::new()
        .num_threads(1)
        .build()
        .expect("thread pool")
        .install(f)
}

/// `exp[iπ/4 (s_x XX + s_z ZZ)] = (I + i s_x XX)(I + i s_z ZZ)/2`.
fn optimal_exponential(sx: f64, sz: f64) -> ComplexMatrix {
    let id = ComplexMatrix::identity(4);
    let xx = kron(&pauli(1).unwrap(), &pauli(1).unwrap()).unwrap();
    let zz = kron(&pauli(3).unwrap(), &pauli(3).unwrap()).unwrap();
    let a = &id + &xx.scale(I * sx);
    let b = &id + &zz.scale(I * sz);
    (&a * &b).scale_real(0.5)
}

/// `Π_k (cos α_k + i sin α_k σ_k⊗σ_kᵀ)`.
fn product_exponential(alpha: [f64; 3]) -> ComplexMatrix {
    let mut acc = ComplexMatrix::identity(4);
    for k in 0..3 {
        let s = pauli(k + 1).unwrap();
        let p = kron(&s, &s.transpose()).unwrap();
        let f = &ComplexMatrix::identity(4).scale_real(alpha[k].cos()) + &p.scale(I * alpha[k].sin());
        acc = &acc * &f;
    }
    acc
}

/// `S_ab = Σ_ij U_ji conj(V_{2j+a, 2i+b})`, the index form of `Tr₁[(Uᵀ⊗I)V*]`.
fn s_by_index(u: &ComplexMatrix, v: &ComplexMatrix) -> ComplexMatrix {
    let mut s = ComplexMatrix::zeros(2);
    for a in 0..2 {
        for b in 0..2 {
            let mut acc = Complex64::new(0.0, 0.0);
            for i in 0..2 {
                for j in 0..2 {
                    acc += u[(j, i)] * v[(2 * j + a, 2 * i + b)].conj();
                }
            }
            s[(a, b)] = acc;
        }
    }
    s
}

/// Largest squared singular value of a 2×2 matrix.
fn top_singular_sq(s: &ComplexMatrix) -> f64 {
    let fro: f64 = s.entries().iter().map(|z| z.norm_sqr()).sum();
    let det = s.det().norm_sqr();
    0.5 * (fro + (fro * fro - 4.0 * det).max(0.0).sqrt())
}

/// `Tr₂[V (ρ⊗σ) V†]` by explicit index sums.
fn partial_trace_action(v: &ComplexMatrix, sigma: &ComplexMatrix, rho: &ComplexMatrix) -> ComplexMatrix {
    let joint = kron(rho, sigma).unwrap();
    let full = &(v * &joint) * &v.adjoint();
    let mut out = ComplexMatrix::zeros(2);
    for a in 0..2 {
        for b in 0..2 {
            out[(a, b)] = full[(2 * a, 2 * b)] + full[(2 * a + 1, 2 * b + 1)];
        }
    }
    out
}

fn chamber_alpha(rng: &mut impl Rng) -> [f64; 3] {
    let a1 = rng.random_range(0.0..FRAC_PI_4);
    let a2 = rng.random_range(0.0..=a1);
    let a3 = rng.random_range(-a2..=a2);
    [a1, a2, a3]
}

fn signs() -> Vec<(Sign, Sign)> {
    Sign::ALL
        .iter()
        .flat_map(|&a| Sign::ALL.iter().map(move |&b| (a, b)))
        .collect()
}

fn ac1() -> Outcome {
    let mut worst_err = 0.0f64;
    let mut slowest = Duration::ZERO;
    for (sx, sz) in signs() {
        let v = optimal_interaction(sx, sz);
        // warm-up, then timed call
        worst_case_fidelity(&v).map_err(|e| e.to_string())?;
        let start = Instant::now();
        let r = worst_case_fidelity(&v).map_err(|e| e.to_string())?;
        slowest = slowest.max(start.elapsed());
        worst_err = worst_err.max((r.fidelity - 0.25).abs());
    }
    check(
        worst_err <= 1e-12 && slowest < Duration::from_millis(1),
        format!("max |F − 1/4| = {worst_err:.2e}, slowest call {slowest:?}"),
    )
}

fn ac2() -> Outcome {
    let config = ScanConfig {
        resolution: 100_000,
        refine_steps: 200,
        seed: 2,
        sigma_samples: 0,
    };
    let start = Instant::now();
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for (sx, sz) in signs() {
        let v = optimal_interaction(sx, sz);
        let r = single_thread(|| minimax_scan(&v, &config)).map_err(|e| e.to_string())?;
        lo = lo.min(r.f_min);
        hi = hi.max(r.f_min);
    }
    let per_scan = start.elapsed() / 4;
    check(
        lo >= 0.25 - 1e-9 && hi <= 0.25 + 2e-3 && per_scan < Duration::from_secs(60),
        format!("f_min ∈ [{lo:.12}, {hi:.12}], {per_scan:?} per single-threaded scan"),
    )
}

fn ac3() -> Outcome {
    let base = PhaseVector::new([0.0, FRAC_PI_2, PI, FRAC_PI_2]);
    let mut worst = 0.0f64;
    for p in [base, base.negated()] {
        let th = p.theta();
        // t_j = Σ_μ H_jμ e^{−iθ_μ} with H = ½[[1,1,1,1],[1,1,−1,−1],[1,−1,1,−1],[1,−1,−1,1]]
        let e: Vec<Complex64> = th.iter().map(|&x| Complex64::from_polar(1.0, -x)).collect();
        let direct = [
            0.5 * (e[0] + e[1] + e[2] + e[3]),
            0.5 * (e[0] + e[1] - e[2] - e[3]),
            0.5 * (e[0] - e[1] + e[2] - e[3]),
            0.5 * (e[0] - e[1] - e[2] + e[3]),
        ];
        for (m, d) in hadamard_t(&p).moduli().iter().zip(direct) {
            worst = worst.max((m - 1.0).abs()).max((d.norm() - 1.0).abs());
        }
    }
    check(worst <= 1e-12, format!("max ||t_j| − 1| = {worst:.2e} for θ and −θ"))
}

fn ac4() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let (mut norm_err, mut excess) = (0.0f64, f64::NEG_INFINITY);
    for _ in 0..1000 {
        let p = PhaseVector::new(std::array::from_fn(|_| rng.random_range(-PI..PI)));
        let t = hadamard_t(&p);
        norm_err = norm_err.max((t.moduli_sq().iter().sum::<f64>() - 4.0).abs());
        let min = t.moduli().into_iter().fold(f64::INFINITY, f64::min);
        excess = excess.max(min - 1.0);
    }
    check(
        norm_err <= 1e-10 && excess <= 1e-12,
        format!("max |Σ|t|² − 4| = {norm_err:.2e}, max (min|t| − 1) = {excess:.3}"),
    )
}

fn ac5() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut worst = 0.0f64;
    for _ in 0..1000 {
        let alpha: [f64; 3] = std::array::from_fn(|_| rng.random_range(-PI..PI));
        let u = haar_unitary(2, &mut rng);
        let summed = s_operator_canonical(&u, &theta_from_alpha(alpha));
        let v = canonical_interaction(alpha);
        let traced = s_operator(&u, &v).map_err(|e| e.to_string())?;
        let oracle = s_by_index(&u, &product_exponential(alpha));
        worst = worst.max(summed.distance(&traced)).max(summed.distance(&oracle));
    }
    check(worst <= 1e-12, format!("max route difference {worst:.2e}"))
}

fn ac6() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut worst = 0.0f64;
    for _ in 0..1000 {
        let alpha: [f64; 3] = std::array::from_fn(|_| rng.random_range(-PI..PI));
        let b = random_bloch(&mut rng);
        let closed = closed_form_norm(&b, &hadamard_t(&theta_from_alpha(alpha))).norm_sq;
        let s = s_by_index(&bloch_to_matrix(&b), &product_exponential(alpha));
        worst = worst.max((closed - top_singular_sq(&s)).abs());
    }
    check(worst <= 1e-10, format!("max |closed − SVD| = {worst:.2e}"))
}

fn ac7() -> Outcome {
    let config = ScanConfig {
        resolution: 100_000,
        refine_steps: 200,
        seed: 7,
        sigma_samples: 0,
    };
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let start = Instant::now();
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for _ in 0..25 {
        let alpha = chamber_alpha(&mut rng);
        let closed = hadamard_t(&theta_from_alpha(alpha)).min_modulus_sq().0 / 4.0;
        let r = minimax_scan(&product_exponential(alpha), &config).map_err(|e| e.to_string())?;
        let gap = r.f_min - closed;
        lo = lo.min(gap);
        hi = hi.max(gap);
    }
    let elapsed = start.elapsed();
    // The forced axis points hit the exact minimiser, so the lower end is a
    // rounding difference between the two routes; it is held to the scan's
    // one-sidedness floor rather than to a literal zero.
    check(
        lo >= -ONE_SIDED_FLOOR && hi <= 3e-3 && elapsed < Duration::from_secs(600),
        format!("gap ∈ [{lo:.3e}, {hi:.3e}] over 25 α (floor −{ONE_SIDED_FLOOR:.0e}), {elapsed:?} total"),
    )
}

fn ac8() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let (mut action, mut overlap) = (0.0f64, 0.0f64);
    for _ in 0..200 {
        let v = haar_unitary(4, &mut rng);
        let sigma = random_density(&mut rng);
        let rho = random_density(&mut rng);
        let u = haar_unitary(2, &mut rng);
        let channel = program_channel(&v, &sigma).map_err(|e| e.to_string())?;
        let kraus_out = channel.apply(rho.matrix());
        let traced = apply_programmed(&v, &sigma, &rho).map_err(|e| e.to_string())?;
        let oracle = partial_trace_action(&v, sigma.matrix(), rho.matrix());
        action = action
            .max(kraus_out.distance(traced.matrix()))
            .max(kraus_out.distance(&oracle));

        let lhs: f64 = channel.operators().iter().map(|c| c.hs_inner(&u).norm_sqr()).sum();
        let s = s_operator(&u, &v).map_err(|e| e.to_string())?;
        let rhs = (&sigma.matrix().transpose() * &(&s.adjoint() * &s)).trace().re;
        overlap = overlap.max((lhs - rhs).abs());
    }
    check(
        action <= 1e-12 && overlap <= 1e-10,
        format!("action diff {action:.2e}, trace identity diff {overlap:.2e}"),
    )
}

fn ac9() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let p0 = ComplexMatrix::from_real_rows([[1.0, 0.0], [0.0, 0.0]]);
    let p1 = ComplexMatrix::from_real_rows([[0.0, 0.0], [0.0, 1.0]]);
    let (mut tr, mut fid) = (0.0f64, 0.0f64);
    for _ in 0..100 {
        let v1 = haar_unitary(2, &mut rng);
        let v2 = haar_unitary(2, &mut rng);
        let (u, _) = controlled_unitary_worst(&v1, &v2).map_err(|e| e.to_string())?;
        tr = tr.max(v1.hs_inner(&u).norm()).max(v2.hs_inner(&u).norm());
        let v = &kron(&v1, &p0).unwrap() + &kron(&v2, &p1).unwrap();
        let (f, _) = fidelity_uv(&u, &v).map_err(|e| e.to_string())?;
        fid = fid.max(f);
    }
    check(
        tr <= 1e-10 && fid <= 1e-12,
        format!("max |Tr V_k†U| = {tr:.2e}, max fidelity {fid:.2e}"),
    )
}

fn ac10() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let mut recon = 0.0f64;
    for _ in 0..100 {
        let v = haar_unitary(4, &mut rng);
        let cf = kraus_cirac_decompose(&v).map_err(|e| e.to_string())?;
        if !equal_up_to_global_phase(&cf.reconstruct(), &v, 1e-9) {
            return Err(format!("reconstruction failed for α = {:?}", cf.alpha));
        }
        recon = recon.max(cf.reconstruct().distance(&v));
    }
    let v = haar_unitary(4, &mut rng);
    let base = worst_case_fidelity(&v).map_err(|e| e.to_string())?.fidelity;
    let mut drift = 0.0f64;
    for _ in 0..100 {
        let w: Vec<_> = (0..4).map(|_| haar_unitary(2, &mut rng)).collect();
        let dressed = dress(&v, &w[0], &w[1], &w[2], &w[3]).map_err(|e| e.to_string())?;
        let f = worst_case_fidelity(&dressed).map_err(|e| e.to_string())?.fidelity;
        drift = drift.max((f - base).abs());
    }
    check(
        drift <= 1e-10,
        format!("max reconstruction residual {recon:.2e}, max F drift {drift:.2e}"),
    )
}

fn ac11() -> Outcome {
    let mut fig2 = 0.0f64;
    for (sx, sz) in signs() {
        let m = build_optimal_circuit(sx, sz).matrix().map_err(|e| e.to_string())?;
        let want = optimal_exponential(sx.value(), sz.value());
        if !equal_up_to_global_phase(&m, &want, 1e-12) {
            return Err(format!("optimal circuit ({sx},{sz}) differs"));
        }
        fig2 = fig2.max(progchan::cxmat::phase_aligned_distance(&m, &want));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut fig1 = 0.0f64;
    for _ in 0..100 {
        let v = product_exponential(chamber_alpha(&mut rng));
        let cf = kraus_cirac_decompose(&v).map_err(|e| e.to_string())?;
        let m = build_general_circuit(&cf).map_err(|e| e.to_string())?.matrix().map_err(|e| e.to_string())?;
        if !equal_up_to_global_phase(&m, &v, 1e-10) {
            return Err("general circuit differs".into());
        }
        fig1 = fig1.max(progchan::cxmat::phase_aligned_distance(&m, &v));
    }
    check(true, format!("optimal circuit residual {fig2:.2e}, general circuit residual {fig1:.2e}"))
}

fn ac12() -> Outcome {
    let checks = verify_identities();
    let by_line = |n: usize| checks.iter().find(|c| c.line == n).ok_or(format!("line {n} missing"));
    for n in [1, 2, 4] {
        let c = by_line(n)?;
        if !c.holds || c.residual > 1e-12 {
            return Err(format!("line {n} does not hold: {c:?}"));
        }
    }
    let c = cnot();
    let id = ComplexMatrix::identity(2);
    let z = pauli(3).unwrap();
    let lhs = &(&c * &kron(&id, &z).unwrap()) * &c;
    let zz = kron(&z, &z).unwrap();
    let true_sign = if lhs.distance(&zz) < 1e-12 { "+" } else { "−" };
    let line3 = by_line(3)?;
    let recorded = line3.tested.contains(&format!("= {true_sign}σz⊗σz"));
    check(
        recorded && line3.holds,
        format!("lines 1, 2, 4 hold; line 3 recorded as {:?} (true sign {true_sign})", line3.tested),
    )
}

fn cnot() -> ComplexMatrix {
    ComplexMatrix::from_real_rows([
        [1.0, 0.0, 0.0, 0.0],
        [0.0, 1.0, 0.0, 0.0],
        [0.0, 0.0, 0.0, 1.0],
        [0.0, 0.0, 1.0, 0.0],
    ])
}

fn ac13() -> Outcome {
    let d = distance(0.25).map_err(|e| e.to_string())?;
    let a = avg_io_fidelity(0.25, 2).map_err(|e| e.to_string())?;
    let err = (d - 3f64.sqrt() / 2.0).abs();
    check(err <= 1e-15 && a == 0.5, format!("δ(1/4) error {err:.1e}, F_io = {a}"))
}

fn main() {
    let criteria: [Criterion; 13] = [
        ("optimal fidelity", ac1),
        ("oracle concurrence", ac2),
        ("phase certificate", ac3),
        ("Hadamard normalization", ac4),
        ("two-route S", ac5),
        ("closed-form norm", ac6),
        ("closed-form minimax vs oracle", ac7),
        ("channel consistency", ac8),
        ("controlled-unitary no-go", ac9),
        ("decomposition round trip", ac10),
        ("circuit equivalence", ac11),
        ("identity audit", ac12),
        ("derived relations", ac13),
    ];
    let mut failures = 0;
    for (k, (name, f)) in criteria.iter().enumerate() {
        let (tag, detail) = match f() {
            Ok(d) => ("PASS", d),
            Err(d) => {
                failures += 1;
                ("FAIL", d)
            }
        };
        println!("AC{:<2} {tag}  {name}: {detail}", k + 1);
    }
    println!("acceptance: {} passed, {failures} failed", criteria.len() - failures);
    if failures > 0 {
        std::process::exit(1);
    }
}
