//! Qubit channels in Kraus form and the channel programmed by an ancilla.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::cxmat::{
    devectorize, hermitian_eig, kron, partial_trace, ComplexMatrix, OperatorVector, Subsystem,
    ONE,
};
use crate::error::{Error, Result};
use crate::minimax::s_operator;

/// Validation tolerance for states and Kraus completeness.
pub const STATE_TOL: f64 = 1e-10;
/// Choi eigenvalues at or below this are dropped when extracting Kraus operators.
pub const CHOI_RANK_CUTOFF: f64 = 1e-12;
/// Unitarity check applied to interactions and targets.
pub const UNITARY_TOL: f64 = 1e-10;

/// A qubit density matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ComplexMatrix", into = "ComplexMatrix")]
pub struct DensityMatrix(ComplexMatrix);

impl DensityMatrix {
    pub fn new(mat: ComplexMatrix) -> Result<Self> {
        mat.require_dim(2)?;
        let residual = mat.hermiticity_residual();
        if residual > STATE_TOL {
            return Err(Error::InvalidDensity(format!(
                "not Hermitian (residual {residual:.3e})"
            )));
        }
        let trace = mat.trace();
        if (trace - ONE).norm() > STATE_TOL {
            return Err(Error::InvalidDensity(format!("trace {trace}")));
        }
        let mat = mat.hermitian_part();
        let lowest = *hermitian_eig(&mat)?.values.last().unwrap();
        if lowest < -STATE_TOL {
            return Err(Error::InvalidDensity(format!(
                "negative eigenvalue {lowest:.3e}"
            )));
        }
        Ok(Self(mat))
    }

    /// `|ψ⟩⟨ψ|` for a normalised `ψ`.
    pub fn pure(psi: &[Complex64]) -> Result<Self> {
        Self::new(ComplexMatrix::outer(psi, psi))
    }

    pub fn maximally_mixed() -> Self {
        Self(ComplexMatrix::identity(2).scale_real(0.5))
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.0
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.0
    }
}

impl TryFrom<ComplexMatrix> for DensityMatrix {
    type Error = Error;
    fn try_from(m: ComplexMatrix) -> Result<Self> {
        Self::new(m)
    }
}

impl From<DensityMatrix> for ComplexMatrix {
    fn from(d: DensityMatrix) -> Self {
        d.0
    }
}

/// `ρ ↦ Σ_i C_i ρ C_i†` with `Σ_i C_i† C_i = I`.
#[derive(Debug, Clone, PartialEq)]
pub struct KrausChannel {
    kraus: Vec<ComplexMatrix>,
}

impl KrausChannel {
    pub fn new(kraus: Vec<ComplexMatrix>) -> Result<Self> {
        let Some(first) = kraus.first() else {
            return Err(Error::Config("empty Kraus family".into()));
        };
        let dim = first.dim();
        for k in &kraus {
            k.require_dim(dim)?;
        }
        let channel = Self { kraus };
        let residual = channel.completeness_residual();
        if residual > STATE_TOL {
            return Err(Error::Config(format!(
                "Kraus family not trace preserving (residual {residual:.3e})"
            )));
        }
        Ok(channel)
    }

    pub fn unitary(u: &ComplexMatrix) -> Result<Self> {
        u.require_unitary(UNITARY_TOL)?;
        Self::new(vec![u.clone()])
    }

    pub fn operators(&self) -> &[ComplexMatrix] {
        &self.kraus
    }

    pub fn rank(&self) -> usize {
        self.kraus.len()
    }

    /// `‖Σ C†C − I‖_F`.
    pub fn completeness_residual(&self) -> f64 {
        let dim = self.kraus[0].dim();
        let sum = self
            .kraus
            .iter()
            .fold(ComplexMatrix::zeros(dim), |acc, k| &acc + &(&k.adjoint() * k));
        sum.distance(&ComplexMatrix::identity(dim))
    }

    pub fn apply(&self, rho: &ComplexMatrix) -> ComplexMatrix {
        self.kraus
            .iter()
            .fold(ComplexMatrix::zeros(rho.dim()), |acc, k| {
                &acc + &(&(k * rho) * &k.adjoint())
            })
    }
}

/// `P_{V,σ}(ρ) = Tr₂[V (ρ ⊗ σ) V†]` as a raw matrix.
fn programmed_action(v: &ComplexMatrix, sigma: &ComplexMatrix, rho: &ComplexMatrix) -> ComplexMatrix {
    let joint = kron(rho, sigma).expect("qubit factors");
    partial_trace(&(&(v * &joint) * &v.adjoint()), Subsystem::Second).expect("4x4 operator")
}

fn require_interaction(v: &ComplexMatrix) -> Result<()> {
    v.require_dim(4)?;
    v.require_unitary(UNITARY_TOL)
}

pub fn apply_programmed(
    v: &ComplexMatrix,
    sigma: &DensityMatrix,
    rho: &DensityMatrix,
) -> Result<DensityMatrix> {
    require_interaction(v)?;
    DensityMatrix::new(programmed_action(v, sigma.matrix(), rho.matrix()))
}

/// Choi matrix `Σ_ij P(|i⟩⟨j|) ⊗ |i⟩⟨j|` of the programmed channel.
pub fn programmed_choi(v: &ComplexMatrix, sigma: &DensityMatrix) -> Result<ComplexMatrix> {
    require_interaction(v)?;
    let mut choi = ComplexMatrix::zeros(4);
    for i in 0..2 {
        for j in 0..2 {
            let mut eij = ComplexMatrix::zeros(2);
            eij[(i, j)] = ONE;
            let out = programmed_action(v, sigma.matrix(), &eij);
            choi = &choi + &kron(&out, &eij)?;
        }
    }
    Ok(choi)
}

/// Kraus family of `P_{V,σ}` from the eigendecomposition of its Choi matrix.
pub fn program_channel(v: &ComplexMatrix, sigma: &DensityMatrix) -> Result<KrausChannel> {
    let choi = programmed_choi(v, sigma)?;
    let eig = hermitian_eig(&choi)?;
    let kraus = eig
        .values
        .iter()
        .enumerate()
        .filter(|(_, &l)| l > CHOI_RANK_CUTOFF)
        .map(|(k, &l)| {
            let amps: Vec<Complex64> = eig.vector(k).iter().map(|z| z * l.sqrt()).collect();
            devectorize(&OperatorVector::from_amps(2, amps).expect("4 amplitudes"))
        })
        .collect();
    KrausChannel::new(kraus)
}

/// `F = (1/d²) Σ_i |Tr[C_i† U]|²`.
pub fn channel_fidelity(u: &ComplexMatrix, c: &KrausChannel) -> Result<f64> {
    u.require_unitary(UNITARY_TOL)?;
    let d = u.dim() as f64;
    let mut total = 0.0;
    for k in c.operators() {
        k.require_dim(u.dim())?;
        total += k.hs_inner(u).norm_sqr();
    }
    Ok((total / (d * d)).clamp(0.0, 1.0))
}

/// `δ = √(1 − F)`.
pub fn distance(f: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&f) {
        return Err(Error::OutOfRange {
            value: f,
            min: 0.0,
            max: 1.0,
        });
    }
    Ok((1.0 - f).sqrt())
}

/// Input-output fidelity averaged over pure states, `(1 + dF)/(d + 1)`.
pub fn avg_io_fidelity(f: f64, d: usize) -> Result<f64> {
    if !(0.0..=1.0).contains(&f) {
        return Err(Error::OutOfRange {
            value: f,
            min: 0.0,
            max: 1.0,
        });
    }
    if d < 2 {
        return Err(Error::UnsupportedDimension(d));
    }
    let d = d as f64;
    Ok((1.0 + d * f) / (d + 1.0))
}

/// `(1/d²) Tr[σᵀ S(U,V)† S(U,V)]`, the fidelity of `U` against `P_{V,σ}`
/// computed without building Kraus operators.
pub fn program_overlap(u: &ComplexMatrix, v: &ComplexMatrix, sigma: &DensityMatrix) -> Result<f64> {
    let s = s_operator(u, v)?;
    let gram = &s.adjoint() * &s;
    let value = (&sigma.matrix().transpose() * &gram).trace().re / 4.0;
    Ok(value.clamp(0.0, 1.0))
}
