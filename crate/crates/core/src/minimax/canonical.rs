//! Canonical form `V = (W₁⊗W₂) exp[i Σ_k α_k σ_k⊗σ_kᵀ] (W₃⊗W₄)`.
//!
//! The decomposition works in the basis `|τ_j⟩⟩/√2` with `τ₀ = I`,
//! `τ_k = iσ_k`: there every product of SU(2) factors is a real rotation in
//! SO(4), and every canonical interaction is diagonal with eigenphases
//! `θ_j`. Writing `V' = O₁ D O₂` there, `V'ᵀV' = O₂ᵀ D² O₂` is a complex
//! symmetric unitary whose real and imaginary parts commute, so a real
//! orthogonal eigenbasis of a generic mix of the two recovers `O₂`.

use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2, FRAC_PI_4, PI};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{canonical_interaction, pauli_bell_vector};
use crate::channel::UNITARY_TOL;
use crate::cxmat::{hermitian_eig, kron, ComplexMatrix, I, ONE};
use crate::error::{Error, Result};
use crate::pauli::sigma;

/// Maximum Frobenius residual of a decomposition.
pub const DECOMPOSITION_TOL: f64 = 1e-9;
/// Slack allowed on the chamber inequalities.
pub const CHAMBER_TOL: f64 = 1e-12;

/// Mixing angles tried when diagonalising `Re M + i Im M` simultaneously.
const MIX_ANGLES: [f64; 8] = [0.4142, 1.2247, 2.2361, 0.8123, 2.9, 1.7321, 0.1123, 2.6458];
const SIMULTANEOUS_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CanonicalForm {
    /// Interaction coefficients in the chamber `π/4 ≥ α₁ ≥ α₂ ≥ |α₃|`.
    pub alpha: [f64; 3],
    pub w1: ComplexMatrix,
    pub w2: ComplexMatrix,
    pub w3: ComplexMatrix,
    pub w4: ComplexMatrix,
}

impl CanonicalForm {
    /// Bare canonical interaction with identity locals.
    pub fn bare(alpha: [f64; 3]) -> Self {
        let id = ComplexMatrix::identity(2);
        Self {
            alpha,
            w1: id.clone(),
            w2: id.clone(),
            w3: id.clone(),
            w4: id,
        }
    }

    pub fn reconstruct(&self) -> ComplexMatrix {
        let left = kron(&self.w1, &self.w2).expect("2x2 locals");
        let right = kron(&self.w3, &self.w4).expect("2x2 locals");
        &(&left * &canonical_interaction(self.alpha)) * &right
    }

    pub fn in_chamber(&self, tol: f64) -> bool {
        let [a1, a2, a3] = self.alpha;
        FRAC_PI_4 + tol >= a1 && a1 + tol >= a2 && a2 + tol >= a3.abs()
    }

    /// `W₁ σ_j W₃`, the target attaining `|t_j|²/4`.
    pub fn worst_unitary(&self, j: usize) -> ComplexMatrix {
        &(&self.w1 * &sigma(j)) * &self.w3
    }

    fn shift(&mut self, k: usize, steps: i64) {
        // E(α) = E(α − m·π/2·e_k) (i σ_k⊗σ_kᵀ)^m
        self.alpha[k] -= steps as f64 * FRAC_PI_2;
        self.w1 = self.w1.scale(I.powi(steps.rem_euclid(4) as i32));
        if steps.rem_euclid(2) == 1 {
            let s = sigma(k + 1);
            self.w3 = &s * &self.w3;
            self.w4 = &s.transpose() * &self.w4;
        }
    }

    fn swap_axes(&mut self, a: usize, b: usize) {
        // A = (σ_a + σ_b)/√2 exchanges σ_a and σ_b, so  L = A ⊗ A* maps
        // σ_a⊗σ_aᵀ ↔ σ_b⊗σ_bᵀ and E(α) = L† E(α') L.
        let m = (&sigma(a + 1) + &sigma(b + 1)).scale_real(FRAC_1_SQRT_2);
        let mc = m.conj();
        self.w1 = &self.w1 * &m.adjoint();
        self.w2 = &self.w2 * &mc.adjoint();
        self.w3 = &m * &self.w3;
        self.w4 = &mc * &self.w4;
        self.alpha.swap(a, b);
    }

    fn flip_pair(&mut self, keep: usize) {
        // Conjugating by σ_m ⊗ I negates every α_k with k ≠ m.
        let s = sigma(keep + 1);
        self.w1 = &self.w1 * &s;
        self.w3 = &s * &self.w3;
        for k in 0..3 {
            if k != keep {
                self.alpha[k] = -self.alpha[k];
            }
        }
    }

    /// Moves `alpha` into the chamber with the locals compensating each step.
    pub fn reduce_to_chamber(mut self) -> Self {
        for k in 0..3 {
            let steps = (self.alpha[k] / FRAC_PI_2 - 0.5).ceil() as i64;
            if steps != 0 {
                self.shift(k, steps);
            }
        }
        for i in 0..3 {
            let mut best = i;
            for j in i + 1..3 {
                if self.alpha[j].abs() > self.alpha[best].abs() {
                    best = j;
                }
            }
            if best != i {
                self.swap_axes(i, best);
            }
        }
        match (self.alpha[0] < 0.0, self.alpha[1] < 0.0) {
            (true, true) => self.flip_pair(2),
            (true, false) => self.flip_pair(1),
            (false, true) => self.flip_pair(0),
            (false, false) => {}
        }
        self
    }
}

/// Columns `|τ_j⟩⟩/√2` with `τ = (I, iσx, iσy, iσz)`.
pub fn magic_basis() -> ComplexMatrix {
    let mut q = ComplexMatrix::zeros(4);
    for j in 0..4 {
        let phase = if j == 0 { ONE } else { I };
        let col: Vec<Complex64> = pauli_bell_vector(j).iter().map(|z| z * phase).collect();
        q.set_column(j, &col);
    }
    q
}

/// Splits a product operator `K = A ⊗ B` into unitary factors.
pub fn factor_local(k: &ComplexMatrix) -> Result<(ComplexMatrix, ComplexMatrix)> {
    k.require_dim(4)?;
    let block = |i: usize, l: usize| {
        let mut b = ComplexMatrix::zeros(2);
        for r in 0..2 {
            for c in 0..2 {
                b[(r, c)] = k[(2 * i + r, 2 * l + c)];
            }
        }
        b
    };
    let (bi, bl) = (0..2)
        .flat_map(|i| (0..2).map(move |l| (i, l)))
        .max_by(|&(a, b), &(c, d)| {
            block(a, b)
                .frobenius_norm()
                .total_cmp(&block(c, d).frobenius_norm())
        })
        .unwrap();
    let pivot = block(bi, bl);
    let det = pivot.det();
    if det.norm() < 1e-12 {
        return Err(Error::Decomposition {
            residual: 1.0 - det.norm(),
        });
    }
    let b = pivot.scale(ONE / det.sqrt());
    let b_adj = b.adjoint();
    let mut a = ComplexMatrix::zeros(2);
    for i in 0..2 {
        for l in 0..2 {
            a[(i, l)] = (&b_adj * &block(i, l)).trace() * 0.5;
        }
    }
    let residual = kron(&a, &b)?.distance(k);
    if residual > DECOMPOSITION_TOL {
        return Err(Error::Decomposition { residual });
    }
    Ok((a, b))
}

fn off_diagonal(m: &ComplexMatrix) -> f64 {
    let mut s = 0.0;
    for i in 0..4 {
        for j in 0..4 {
            if i != j {
                s += m[(i, j)].norm_sqr();
            }
        }
    }
    s.sqrt()
}

/// Real orthogonal `P` (det +1) with `Pᵀ M P` diagonal, for complex
/// symmetric unitary `M`.
fn real_orthogonal_diagonalizer(m: &ComplexMatrix) -> Result<ComplexMatrix> {
    let re = m.map(|z| Complex64::new(z.re, 0.0));
    let im = m.map(|z| Complex64::new(z.im, 0.0));
    let mut best: Option<(f64, ComplexMatrix)> = None;
    for angle in MIX_ANGLES {
        let mix = &re.scale_real(angle.cos()) + &im.scale_real(angle.sin());
        let eig = hermitian_eig(&mix.hermitian_part())?;
        let p = eig.vectors.map(|z| Complex64::new(z.re, 0.0));
        let residual = off_diagonal(&(&(&p.transpose() * m) * &p));
        if best.as_ref().is_none_or(|(r, _)| residual < *r) {
            best = Some((residual, p));
        }
        if residual < SIMULTANEOUS_TOL {
            break;
        }
    }
    let (residual, mut p) = best.unwrap();
    if residual > DECOMPOSITION_TOL {
        return Err(Error::Decomposition { residual });
    }
    if p.det().re < 0.0 {
        for i in 0..4 {
            p[(i, 3)] = -p[(i, 3)];
        }
    }
    Ok(p)
}

/// Canonical form of a two-qubit unitary, reduced to the chamber.
///
/// The global phase is folded into `W₁`, so `reconstruct()` returns `v`
/// itself, not just a phase-equivalent matrix.
pub fn kraus_cirac_decompose(v: &ComplexMatrix) -> Result<CanonicalForm> {
    v.require_dim(4)?;
    v.require_unitary(UNITARY_TOL)?;

    let phase = v.det().powf(0.25);
    let special = v.scale(ONE / phase);
    let q = magic_basis();
    let q_adj = q.adjoint();
    let up = &(&q_adj * &special) * &q;
    let m2 = &up.transpose() * &up;
    let p = real_orthogonal_diagonalizer(&m2)?;

    let diag = &(&p.transpose() * &m2) * &p;
    let mut d: [Complex64; 4] = std::array::from_fn(|j| diag[(j, j)].sqrt());
    // det O₁ = 1/Π d_j must be +1 for O₁ to be a local rotation.
    if d.iter().product::<Complex64>().re < 0.0 {
        d[0] = -d[0];
    }
    let y = &up * &p;
    let mut o1 = ComplexMatrix::zeros(4);
    for j in 0..4 {
        for i in 0..4 {
            o1[(i, j)] = y[(i, j)] / d[j];
        }
    }
    let k1 = &(&q * &o1) * &q_adj;
    let k2 = &(&q * &p.transpose()) * &q_adj;

    let mut theta: [f64; 4] = d.map(|z| z.arg());
    let wraps = (theta.iter().sum::<f64>() / (2.0 * PI)).round();
    theta[0] -= wraps * 2.0 * PI;
    let alpha = [1, 2, 3].map(|i| 0.5 * (theta[i] + theta[0]));

    let (w1, w2) = factor_local(&k1)?;
    let (w3, w4) = factor_local(&k2)?;
    let raw = CanonicalForm {
        alpha,
        w1: w1.scale(phase),
        w2,
        w3,
        w4,
    };
    let cf = raw.reduce_to_chamber();

    let residual = cf.reconstruct().distance(v);
    if residual > DECOMPOSITION_TOL {
        return Err(Error::Decomposition { residual });
    }
    Ok(cf)
}
