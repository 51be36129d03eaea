//! Pauli-basis algebra for a single qubit.
//!
//! Covers the Bloch form `U = n₀ I + i n⃗·σ⃗` of SU(2), the conjugation signs
//! `σ_j σ_l σ_j = ε_{jl} σ_l`, and the map from the four eigenphases of a
//! canonical interaction to the amplitudes `t_j` that fix its worst-case
//! fidelity.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::cxmat::{ComplexMatrix, I, ONE, ZERO};
use crate::error::{Error, Result};

/// `σ₀ = I`, `σ₁ = σx`, `σ₂ = σy`, `σ₃ = σz`.
pub fn pauli(j: usize) -> Result<ComplexMatrix> {
    let m = match j {
        0 => ComplexMatrix::from_rows([[ONE, ZERO], [ZERO, ONE]]),
        1 => ComplexMatrix::from_rows([[ZERO, ONE], [ONE, ZERO]]),
        2 => ComplexMatrix::from_rows([[ZERO, -I], [I, ZERO]]),
        3 => ComplexMatrix::from_rows([[ONE, ZERO], [ZERO, -ONE]]),
        index => return Err(Error::IndexOutOfRange { index, bound: 4 }),
    };
    Ok(m)
}

/// Infallible accessor for indices known to be valid.
pub(crate) fn sigma(j: usize) -> ComplexMatrix {
    pauli(j).expect("Pauli index in 0..4")
}

/// `ε_{jl}` with `σ_j σ_l σ_j = ε_{jl} σ_l`.
pub fn epsilon_sign(j: usize, l: usize) -> Result<i8> {
    for index in [j, l] {
        if index > 3 {
            return Err(Error::IndexOutOfRange { index, bound: 4 });
        }
    }
    Ok(if j == 0 || l == 0 || j == l { 1 } else { -1 })
}

/// Element of SU(2) as a unit 4-vector `(n₀, n₁, n₂, n₃)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BlochUnitary {
    n: [f64; 4],
}

impl BlochUnitary {
    pub const NORM_TOL: f64 = 1e-12;

    pub fn new(n: [f64; 4]) -> Result<Self> {
        let norm_sq: f64 = n.iter().map(|x| x * x).sum();
        if (norm_sq - 1.0).abs() > Self::NORM_TOL {
            return Err(Error::InvalidBloch { norm_sq });
        }
        Ok(Self { n })
    }

    /// Rescales any non-zero vector onto the unit sphere.
    pub fn normalized(n: [f64; 4]) -> Result<Self> {
        let norm = n.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm <= 0.0 || !norm.is_finite() {
            return Err(Error::InvalidBloch { norm_sq: norm * norm });
        }
        Ok(Self {
            n: n.map(|x| x / norm),
        })
    }

    /// `±e_j`.
    pub fn axis(j: usize, sign: f64) -> Self {
        let mut n = [0.0; 4];
        n[j] = sign.signum();
        Self { n }
    }

    pub fn components(&self) -> [f64; 4] {
        self.n
    }

    /// Extremal-point coordinates `u_j = n_j²`.
    pub fn squares(&self) -> [f64; 4] {
        self.n.map(|x| x * x)
    }

    pub fn dot(&self, other: &Self) -> f64 {
        self.n.iter().zip(other.n).map(|(a, b)| a * b).sum()
    }

    pub fn to_matrix(&self) -> ComplexMatrix {
        bloch_to_matrix(self)
    }
}

pub fn bloch_to_matrix(b: &BlochUnitary) -> ComplexMatrix {
    let [n0, n1, n2, n3] = b.n;
    // n₀ I + i (n₁ σx + n₂ σy + n₃ σz)
    ComplexMatrix::from_rows([
        [Complex64::new(n0, n3), Complex64::new(n2, n1)],
        [Complex64::new(-n2, n1), Complex64::new(n0, -n3)],
    ])
}

/// Bloch vector of a 2×2 unitary after dividing out the principal `√det`.
/// Only defined up to the overall sign `±(n₀, n⃗)`.
pub fn matrix_to_bloch(u: &ComplexMatrix) -> Result<BlochUnitary> {
    u.require_dim(2)?;
    u.require_unitary(1e-10)?;
    let su = u.scale(ONE / u.det().sqrt());
    let n0 = su.trace().re / 2.0;
    let mut n = [n0, 0.0, 0.0, 0.0];
    for (k, nk) in n.iter_mut().enumerate().skip(1) {
        *nk = (&sigma(k) * &su).trace().im / 2.0;
    }
    BlochUnitary::normalized(n)
}

/// Reduces an angle into `(−π, π]`.
pub fn wrap_phase(x: f64) -> f64 {
    let r = x.rem_euclid(2.0 * PI);
    if r > PI {
        r - 2.0 * PI
    } else {
        r
    }
}

/// Eigenphases `(θ₀, θ₁, θ₂, θ₃)` of a canonical interaction, in `(−π, π]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhaseVector {
    theta: [f64; 4],
}

impl PhaseVector {
    pub fn new(theta: [f64; 4]) -> Self {
        Self {
            theta: theta.map(wrap_phase),
        }
    }

    pub fn theta(&self) -> [f64; 4] {
        self.theta
    }

    pub fn negated(&self) -> Self {
        Self::new(self.theta.map(|x| -x))
    }

    /// `e^{−iθ_μ}`, the vector the Hadamard contraction acts on.
    pub fn conj_exponentials(&self) -> [Complex64; 4] {
        self.theta.map(|x| Complex64::from_polar(1.0, -x))
    }
}

/// Below this modulus the phase of `t_j` is reported as zero.
pub const ZERO_MODULUS: f64 = 1e-12;

/// Two `|t_j|²` closer than this are treated as tied.
pub const TIE_TOL: f64 = 1e-12;

/// The amplitudes `t_j = |t_j| e^{iφ_j}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TVector {
    t: [Complex64; 4],
}

impl TVector {
    pub fn from_amplitudes(t: [Complex64; 4]) -> Self {
        Self { t }
    }

    pub fn amplitudes(&self) -> [Complex64; 4] {
        self.t
    }

    pub fn moduli(&self) -> [f64; 4] {
        self.t.map(|z| z.norm())
    }

    pub fn moduli_sq(&self) -> [f64; 4] {
        self.t.map(|z| z.norm_sqr())
    }

    pub fn phases(&self) -> [f64; 4] {
        self.t.map(|z| {
            if z.norm() < ZERO_MODULUS {
                0.0
            } else {
                z.im.atan2(z.re)
            }
        })
    }

    /// `T_{ij} = |t_i|² |t_j|² sin²(φ_i − φ_j)`.
    pub fn interference_matrix(&self) -> [[f64; 4]; 4] {
        let m = self.moduli_sq();
        let phi = self.phases();
        std::array::from_fn(|i| {
            std::array::from_fn(|j| m[i] * m[j] * (phi[i] - phi[j]).sin().powi(2))
        })
    }

    /// `(min_j |t_j|², argmin)`; values within [`TIE_TOL`] of the minimum
    /// count as tied and the lowest index wins.
    pub fn min_modulus_sq(&self) -> (f64, usize) {
        let m = self.moduli_sq();
        let min = m.iter().cloned().fold(f64::INFINITY, f64::min);
        let first = m.iter().position(|&x| x <= min + TIE_TOL).unwrap();
        (min, first)
    }

    /// All indices whose `|t_j|²` ties with the minimum.
    pub fn argmin_set(&self) -> Vec<usize> {
        let m = self.moduli_sq();
        let (min, _) = self.min_modulus_sq();
        (0..4).filter(|&j| m[j] <= min + TIE_TOL).collect()
    }
}

/// The ±½ Hadamard matrix relating eigenphases to `t`.
pub const HADAMARD: [[f64; 4]; 4] = [
    [0.5, 0.5, 0.5, 0.5],
    [0.5, 0.5, -0.5, -0.5],
    [0.5, -0.5, 0.5, -0.5],
    [0.5, -0.5, -0.5, 0.5],
];

/// `t_j = Σ_μ H_{jμ} e^{−iθ_μ}`.
pub fn hadamard_t(phases: &PhaseVector) -> TVector {
    let e = phases.conj_exponentials();
    TVector {
        t: std::array::from_fn(|j| (0..4).map(|mu| e[mu] * HADAMARD[j][mu]).sum()),
    }
}

/// The same amplitudes through the explicit formulas
/// `t₀ = ½ Σ e^{−iθ_j}`, `t_j = e^{−iθ₀} + e^{−iθ_j} − t₀`.
pub fn explicit_t(phases: &PhaseVector) -> TVector {
    let e = phases.conj_exponentials();
    let t0: Complex64 = e.iter().sum::<Complex64>() * 0.5;
    TVector {
        t: [t0, e[0] + e[1] - t0, e[0] + e[2] - t0, e[0] + e[3] - t0],
    }
}
