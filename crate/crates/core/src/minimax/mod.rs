//! Worst-case programming fidelity of a fixed two-qubit interaction.
//!
//! For a target `U` and interaction `V` the best achievable channel fidelity
//! is `F(U,V) = ‖S(U,V)‖² / 4` with `S(U,V) = Tr₁[(Uᵀ ⊗ I) V*]`, the optimum
//! being attained by the program state built from the top eigenvector of
//! `S†S`. Writing `V` in canonical form reduces the minimum over `U` to
//! `min_j |t_j|² / 4`, where `t` is the Hadamard transform of the
//! interaction's eigenphases.

mod canonical;

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::ser::SerializeStruct;
use serde::{Deserialize, Serialize, Serializer};

use crate::channel::{DensityMatrix, UNITARY_TOL};
use crate::cxmat::{hermitian_eig, kron, partial_trace, vectorize, ComplexMatrix, Subsystem};
use crate::error::{Error, Result};
use crate::pauli::{
    hadamard_t, matrix_to_bloch, sigma, BlochUnitary, PhaseVector, TVector,
};

pub use canonical::{
    factor_local, kraus_cirac_decompose, magic_basis, CanonicalForm, CHAMBER_TOL,
    DECOMPOSITION_TOL,
};

/// `S(U,V) = Tr₁[(Uᵀ ⊗ I) V*]`.
pub fn s_operator(u: &ComplexMatrix, v: &ComplexMatrix) -> Result<ComplexMatrix> {
    u.require_dim(2)?;
    v.require_dim(4)?;
    u.require_unitary(UNITARY_TOL)?;
    v.require_unitary(UNITARY_TOL)?;
    Ok(s_operator_unchecked(u, v))
}

pub(crate) fn s_operator_unchecked(u: &ComplexMatrix, v: &ComplexMatrix) -> ComplexMatrix {
    let lifted = kron(&u.transpose(), &ComplexMatrix::identity(2)).expect("2x2 target");
    partial_trace(&(&lifted * &v.conj()), Subsystem::First).expect("4x4 operator")
}

/// `S(U,V) = ½ Σ_j e^{−iθ_j} σ_j U σ_j` for the canonical interaction with
/// eigenphases `θ`.
pub fn s_operator_canonical(u: &ComplexMatrix, phases: &PhaseVector) -> ComplexMatrix {
    let e = phases.conj_exponentials();
    (0..4).fold(ComplexMatrix::zeros(2), |acc, j| {
        let sj = sigma(j);
        &acc + &(&(&sj * u) * &sj).scale(e[j] * 0.5)
    })
}

/// `F(U,V) = ‖S‖²/4` and the program state that attains it.
pub fn fidelity_uv(u: &ComplexMatrix, v: &ComplexMatrix) -> Result<(f64, DensityMatrix)> {
    let s = s_operator(u, v)?;
    Ok(fidelity_from_s(&s))
}

pub(crate) fn fidelity_from_s(s: &ComplexMatrix) -> (f64, DensityMatrix) {
    let gram = &s.adjoint() * s;
    let eig = hermitian_eig(&gram).expect("Gram matrix is Hermitian");
    let top = eig.vector(0);
    // σᵀ = |v⟩⟨v|, hence σ = |v*⟩⟨v*|.
    let conj: Vec<Complex64> = top.iter().map(|z| z.conj()).collect();
    let sigma = DensityMatrix::pure(&conj).expect("normalised eigenvector");
    ((eig.values[0] / 4.0).clamp(0.0, 1.0), sigma)
}

/// Best fidelity `‖S‖²/4` alone, without the optimal state.
pub(crate) fn best_fidelity_from_s(s: &ComplexMatrix) -> f64 {
    let gram = &s.adjoint() * s;
    // Top eigenvalue of a 2×2 Hermitian matrix.
    let a = gram[(0, 0)].re;
    let d = gram[(1, 1)].re;
    let b = gram[(0, 1)].norm_sqr();
    let top = 0.5 * (a + d) + (0.25 * (a - d) * (a - d) + b).sqrt();
    (top / 4.0).clamp(0.0, 1.0)
}

/// `θ₀ = α₁ + α₂ + α₃`, `θ_i = 2α_i − θ₀`.
pub fn theta_from_alpha(alpha: [f64; 3]) -> PhaseVector {
    PhaseVector::new(raw_theta(alpha))
}

fn raw_theta(alpha: [f64; 3]) -> [f64; 4] {
    let t0 = alpha.iter().sum::<f64>();
    [t0, 2.0 * alpha[0] - t0, 2.0 * alpha[1] - t0, 2.0 * alpha[2] - t0]
}

/// `|σ_j⟩⟩ / √2`, the shared eigenbasis of every canonical interaction.
pub(crate) fn pauli_bell_vector(j: usize) -> Vec<Complex64> {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    vectorize(&sigma(j)).into_amps().into_iter().map(|z| z * s).collect()
}

/// `exp[i Σ_k α_k σ_k ⊗ σ_kᵀ]`, assembled from its spectral decomposition.
pub fn canonical_interaction(alpha: [f64; 3]) -> ComplexMatrix {
    let theta = raw_theta(alpha);
    (0..4).fold(ComplexMatrix::zeros(4), |acc, j| {
        let b = pauli_bell_vector(j);
        &acc + &ComplexMatrix::outer(&b, &b).scale(Complex64::from_polar(1.0, theta[j]))
    })
}

/// The two pieces of the maximum eigenvalue `v₀ + |v⃗|` of `S†S`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ClosedFormNorm {
    /// `v₀ = u⃗·t⃗`.
    pub v0: f64,
    /// `|v⃗|² = 2 u⃗·T u⃗`.
    pub v_sq: f64,
    /// `‖S‖² = v₀ + |v⃗|`.
    pub norm_sq: f64,
}

/// `‖S(U,V)‖²` for the canonical interaction with amplitudes `t`, with
/// `u_j = n_j²` and `T_{ij} = |t_i|²|t_j|² sin²(φ_i − φ_j)`.
pub fn closed_form_norm(b: &BlochUnitary, t: &TVector) -> ClosedFormNorm {
    let u = b.squares();
    let tm = t.moduli_sq();
    let big_t = t.interference_matrix();
    let v0: f64 = u.iter().zip(tm).map(|(a, b)| a * b).sum();
    let quad: f64 = (0..4)
        .flat_map(|i| (0..4).map(move |j| (i, j)))
        .map(|(i, j)| u[i] * big_t[i][j] * u[j])
        .sum();
    let v_sq = 2.0 * quad;
    ClosedFormNorm {
        v0,
        v_sq,
        norm_sq: v0 + v_sq.max(0.0).sqrt(),
    }
}

impl Serialize for TVector {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = serializer.serialize_struct("TVector", 3)?;
        let amps: Vec<[f64; 2]> = self.amplitudes().iter().map(|z| [z.re, z.im]).collect();
        st.serialize_field("amplitudes", &amps)?;
        st.serialize_field("moduli_sq", &self.moduli_sq())?;
        st.serialize_field("phases", &self.phases())?;
        st.end()
    }
}

/// Outcome of the worst-case analysis of one interaction.
#[derive(Debug, Clone, Serialize)]
pub struct MinimaxReport {
    /// `F(V) = min_j |t_j|² / 4`.
    pub fidelity: f64,
    /// `√(1 − F(V))`, worst distance over unitary targets.
    pub epsilon: f64,
    pub argmin_j: usize,
    pub worst_unitary: ComplexMatrix,
    /// Best program state for `worst_unitary`.
    pub optimal_sigma: DensityMatrix,
    pub t: TVector,
    /// Chamber coordinates of the interaction.
    pub alpha: [f64; 3],
}

/// `F(V)` together with the unitary that attains it.
pub fn worst_case_fidelity(v: &ComplexMatrix) -> Result<MinimaxReport> {
    let cf = kraus_cirac_decompose(v)?;
    Ok(report_from_canonical(v, &cf))
}

pub(crate) fn report_from_canonical(v: &ComplexMatrix, cf: &CanonicalForm) -> MinimaxReport {
    let t = hadamard_t(&theta_from_alpha(cf.alpha));
    let (min_sq, argmin_j) = t.min_modulus_sq();
    let fidelity = (min_sq / 4.0).clamp(0.0, 1.0);
    let worst_unitary = cf.worst_unitary(argmin_j);
    let (_, optimal_sigma) = fidelity_from_s(&s_operator_unchecked(&worst_unitary, v));
    MinimaxReport {
        fidelity,
        epsilon: (1.0 - fidelity).sqrt(),
        argmin_j,
        worst_unitary,
        optimal_sigma,
        t,
        alpha: cf.alpha,
    }
}

/// `±1` coefficient selector for the optimal interaction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn value(self) -> f64 {
        match self {
            Sign::Plus => 1.0,
            Sign::Minus => -1.0,
        }
    }

    pub fn flip(self) -> Self {
        match self {
            Sign::Plus => Sign::Minus,
            Sign::Minus => Sign::Plus,
        }
    }

    pub const ALL: [Sign; 2] = [Sign::Plus, Sign::Minus];
}

impl FromStr for Sign {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "+" | "+1" | "1" => Ok(Sign::Plus),
            "-" | "-1" => Ok(Sign::Minus),
            other => Err(Error::Parse(format!("expected +1 or -1, got {other:?}"))),
        }
    }
}

impl fmt::Display for Sign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Sign::Plus => "+1",
            Sign::Minus => "-1",
        })
    }
}

/// `exp[i π/4 (s_x σx⊗σx + s_z σz⊗σz)]`.
pub fn optimal_interaction(sx: Sign, sz: Sign) -> ComplexMatrix {
    let q = std::f64::consts::FRAC_PI_4;
    canonical_interaction([sx.value() * q, 0.0, sz.value() * q])
}

/// `Σ_k V_k ⊗ |ψ_k⟩⟨ψ_k|` with `ψ_k` the columns of `basis`.
pub fn controlled_interaction(
    v1: &ComplexMatrix,
    v2: &ComplexMatrix,
    basis: &ComplexMatrix,
) -> Result<ComplexMatrix> {
    for m in [v1, v2, basis] {
        m.require_dim(2)?;
        m.require_unitary(UNITARY_TOL)?;
    }
    let p1 = basis.column(0);
    let p2 = basis.column(1);
    let a = kron(v1, &ComplexMatrix::outer(&p1, &p1))?;
    let b = kron(v2, &ComplexMatrix::outer(&p2, &p2))?;
    Ok(&a + &b)
}

/// A unitary orthogonal to both `v1` and `v2` in Hilbert-Schmidt sense,
/// and the best fidelity `max_k |Tr[V_k† U]|²/4` it leaves.
pub fn controlled_unitary_worst(
    v1: &ComplexMatrix,
    v2: &ComplexMatrix,
) -> Result<(ComplexMatrix, f64)> {
    let spanned = [matrix_to_bloch(v1)?, matrix_to_bloch(v2)?].map(|b| b.components());
    let mut basis: Vec<[f64; 4]> = Vec::with_capacity(4);
    let project_out = |x: [f64; 4], basis: &[[f64; 4]]| {
        let mut r = x;
        for q in basis {
            let c: f64 = r.iter().zip(q).map(|(a, b)| a * b).sum();
            for k in 0..4 {
                r[k] -= c * q[k];
            }
        }
        r
    };
    let norm = |x: &[f64; 4]| x.iter().map(|a| a * a).sum::<f64>().sqrt();
    for n in spanned {
        let r = project_out(n, &basis);
        let len = norm(&r);
        if len > 1e-8 {
            basis.push(r.map(|a| a / len));
        }
    }
    // Pivot: the standard axis with the largest component outside the span.
    let (_, residual) = (0..4)
        .map(|k| {
            let mut e = [0.0; 4];
            e[k] = 1.0;
            let r = project_out(e, &basis);
            (norm(&r), r)
        })
        .fold((0.0, [0.0; 4]), |best, cand| if cand.0 > best.0 + 1e-12 { cand } else { best });
    // One more pass keeps the result orthogonal to working precision.
    let direction = project_out(residual, &basis);
    let u = BlochUnitary::normalized(direction)?.to_matrix();
    let f = [v1, v2]
        .iter()
        .map(|vk| vk.hs_inner(&u).norm_sqr() / 4.0)
        .fold(0.0, f64::max);
    Ok((u, f))
}

/// Right-hand side of the local covariance law
/// `S(U, (W₁⊗W₂) V (W₃⊗W₄)) = W₂* S(W₁† U W₃†, V) W₄*`.
pub fn covariance_transform(
    u: &ComplexMatrix,
    w1: &ComplexMatrix,
    w2: &ComplexMatrix,
    w3: &ComplexMatrix,
    w4: &ComplexMatrix,
    v: &ComplexMatrix,
) -> Result<ComplexMatrix> {
    for w in [w1, w2, w3, w4] {
        w.require_dim(2)?;
        w.require_unitary(UNITARY_TOL)?;
    }
    let inner = &(&w1.adjoint() * u) * &w3.adjoint();
    let s = s_operator(&inner, v)?;
    Ok(&(&w2.conj() * &s) * &w4.conj())
}

/// `(W₁ ⊗ W₂) V (W₃ ⊗ W₄)`.
pub fn dress(
    v: &ComplexMatrix,
    w1: &ComplexMatrix,
    w2: &ComplexMatrix,
    w3: &ComplexMatrix,
    w4: &ComplexMatrix,
) -> Result<ComplexMatrix> {
    Ok(&(&kron(w1, w2)? * v) * &kron(w3, w4)?)
}
