//! Dense complex matrices of dimension 2 and 4.
//!
//! Everything in this crate lives on a qubit (2) or on a qubit pair (4), so
//! the kernel only supports those sizes. Two-qubit indices follow
//! `r = 2 i + j` for the basis vector `|i⟩|j⟩`, with the first factor being
//! the system and the second the ancilla.

use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Neg, Sub};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub const ONE: Complex64 = Complex64::new(1.0, 0.0);
pub const I: Complex64 = Complex64::new(0.0, 1.0);

/// Jacobi stops once the off-diagonal Frobenius norm drops below this.
pub const JACOBI_OFF_TOL: f64 = 1e-14;
pub const JACOBI_MAX_SWEEPS: usize = 100;

fn check_dim(dim: usize) -> Result<()> {
    match dim {
        1 | 2 | 4 => Ok(()),
        d => Err(Error::UnsupportedDimension(d)),
    }
}

/// Row-major square complex matrix.
#[derive(Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "MatrixFile", into = "MatrixFile")]
pub struct ComplexMatrix {
    dim: usize,
    data: Vec<Complex64>,
}

impl ComplexMatrix {
    pub fn new(dim: usize, data: Vec<Complex64>) -> Result<Self> {
        check_dim(dim)?;
        if data.len() != dim * dim {
            return Err(Error::DimensionMismatch {
                expected: dim * dim,
                found: data.len(),
            });
        }
        Ok(Self { dim, data })
    }

    /// Builds a matrix from rows; panics on ragged or unsupported input.
    /// Intended for literals in code, use [`ComplexMatrix::new`] for data.
    pub fn from_rows<const N: usize>(rows: [[Complex64; N]; N]) -> Self {
        Self::new(N, rows.into_iter().flatten().collect()).expect("literal matrix")
    }

    pub fn from_real_rows<const N: usize>(rows: [[f64; N]; N]) -> Self {
        Self::from_rows(rows.map(|r| r.map(|x| Complex64::new(x, 0.0))))
    }

    pub fn zeros(dim: usize) -> Self {
        check_dim(dim).expect("supported dimension");
        Self {
            dim,
            data: vec![ZERO; dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m[(i, i)] = ONE;
        }
        m
    }

    pub fn diag(entries: &[Complex64]) -> Self {
        let mut m = Self::zeros(entries.len());
        for (i, &z) in entries.iter().enumerate() {
            m[(i, i)] = z;
        }
        m
    }

    /// Outer product `|a⟩⟨b|`.
    pub fn outer(a: &[Complex64], b: &[Complex64]) -> Self {
        assert_eq!(a.len(), b.len());
        let mut m = Self::zeros(a.len());
        for i in 0..a.len() {
            for j in 0..b.len() {
                m[(i, j)] = a[i] * b[j].conj();
            }
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[Complex64] {
        &self.data[i * self.dim..(i + 1) * self.dim]
    }

    pub fn column(&self, j: usize) -> Vec<Complex64> {
        (0..self.dim).map(|i| self[(i, j)]).collect()
    }

    pub fn set_column(&mut self, j: usize, col: &[Complex64]) {
        for (i, &z) in col.iter().enumerate() {
            self[(i, j)] = z;
        }
    }

    pub fn map(&self, f: impl Fn(Complex64) -> Complex64) -> Self {
        Self {
            dim: self.dim,
            data: self.data.iter().map(|&z| f(z)).collect(),
        }
    }

    pub fn scale(&self, s: Complex64) -> Self {
        self.map(|z| z * s)
    }

    pub fn scale_real(&self, s: f64) -> Self {
        self.map(|z| z * s)
    }

    pub fn adjoint(&self) -> Self {
        let n = self.dim;
        let mut m = Self::zeros(n);
        for i in 0..n {
            for j in 0..n {
                m[(j, i)] = self[(i, j)].conj();
            }
        }
        m
    }

    pub fn transpose(&self) -> Self {
        let n = self.dim;
        let mut m = Self::zeros(n);
        for i in 0..n {
            for j in 0..n {
                m[(j, i)] = self[(i, j)];
            }
        }
        m
    }

    pub fn conj(&self) -> Self {
        self.map(|z| z.conj())
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.dim).map(|i| self[(i, i)]).sum()
    }

    /// Hilbert-Schmidt inner product `Tr[self† other]`.
    pub fn hs_inner(&self, other: &Self) -> Complex64 {
        assert_eq!(self.dim, other.dim);
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Largest entrywise modulus.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Frobenius distance `‖self − other‖`.
    pub fn distance(&self, other: &Self) -> f64 {
        assert_eq!(self.dim, other.dim);
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    /// Determinant by Gaussian elimination with partial pivoting.
    pub fn det(&self) -> Complex64 {
        let n = self.dim;
        let mut a = self.data.clone();
        let mut det = ONE;
        for col in 0..n {
            let pivot = (col..n)
                .max_by(|&x, &y| a[x * n + col].norm().total_cmp(&a[y * n + col].norm()))
                .unwrap();
            if a[pivot * n + col].norm() == 0.0 {
                return ZERO;
            }
            if pivot != col {
                for k in 0..n {
                    a.swap(col * n + k, pivot * n + k);
                }
                det = -det;
            }
            let p = a[col * n + col];
            det *= p;
            for r in col + 1..n {
                let f = a[r * n + col] / p;
                for k in col..n {
                    let sub = f * a[col * n + k];
                    a[r * n + k] -= sub;
                }
            }
        }
        det
    }

    /// `‖A†A − I‖_F`.
    pub fn unitarity_residual(&self) -> f64 {
        (&self.adjoint() * self).distance(&Self::identity(self.dim))
    }

    pub fn is_unitary(&self, tol: f64) -> bool {
        self.unitarity_residual() <= tol
    }

    pub fn hermiticity_residual(&self) -> f64 {
        self.distance(&self.adjoint())
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermiticity_residual() <= tol
    }

    /// Hermitian, positive semidefinite and unit trace, all at `tol`.
    pub fn is_density(&self, tol: f64) -> bool {
        if !self.is_hermitian(tol) || (self.trace() - ONE).norm() > tol {
            return false;
        }
        match hermitian_eig(&self.hermitian_part()) {
            Ok(e) => e.values.iter().all(|&l| l >= -tol),
            Err(_) => false,
        }
    }

    /// `(A + A†)/2`, used to strip rounding noise before eigendecomposition.
    pub fn hermitian_part(&self) -> Self {
        (self + &self.adjoint()).scale_real(0.5)
    }

    pub fn require_unitary(&self, tol: f64) -> Result<()> {
        let residual = self.unitarity_residual();
        if residual <= tol {
            Ok(())
        } else {
            Err(Error::NotUnitary { residual })
        }
    }

    pub fn require_dim(&self, dim: usize) -> Result<()> {
        if self.dim == dim {
            Ok(())
        } else {
            Err(Error::DimensionMismatch {
                expected: dim,
                found: self.dim,
            })
        }
    }

    pub fn mul_vec(&self, v: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(v.len(), self.dim);
        (0..self.dim)
            .map(|i| self.row(i).iter().zip(v).map(|(a, b)| a * b).sum())
            .collect()
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = Complex64;
    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.data[i * self.dim + j]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.data[i * self.dim + j]
    }
}

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.dim, rhs.dim, "matrix product dimension mismatch");
        let n = self.dim;
        let mut out = ComplexMatrix::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self.data[i * n + k];
                if a == ZERO {
                    continue;
                }
                for j in 0..n {
                    out.data[i * n + j] += a * rhs.data[k * n + j];
                }
            }
        }
        out
    }
}

impl Mul for ComplexMatrix {
    type Output = ComplexMatrix;
    fn mul(self, rhs: ComplexMatrix) -> ComplexMatrix {
        &self * &rhs
    }
}

impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.dim, rhs.dim);
        ComplexMatrix {
            dim: self.dim,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect(),
        }
    }
}

impl Sub for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.dim, rhs.dim);
        ComplexMatrix {
            dim: self.dim,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect(),
        }
    }
}

impl Neg for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn neg(self) -> ComplexMatrix {
        self.map(|z| -z)
    }
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix({}x{}) [", self.dim, self.dim)?;
        for i in 0..self.dim {
            write!(f, "  ")?;
            for z in self.row(i) {
                write!(f, "{:>+.6}{:+.6}i  ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

/// Kronecker product; row index of `(i ⊗ j)` is `dim(b)·i + j`.
pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<ComplexMatrix> {
    let (n, m) = (a.dim, b.dim);
    let dim = n * m;
    check_dim(dim)?;
    let mut out = ComplexMatrix::zeros(dim);
    for i in 0..n {
        for k in 0..n {
            let aik = a[(i, k)];
            for j in 0..m {
                for l in 0..m {
                    out[(m * i + j, m * k + l)] = aik * b[(j, l)];
                }
            }
        }
    }
    Ok(out)
}

/// Which tensor factor of a two-qubit operator to trace out.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Subsystem {
    /// The first factor (system).
    First,
    /// The second factor (ancilla).
    Second,
}

impl TryFrom<u8> for Subsystem {
    type Error = Error;
    fn try_from(k: u8) -> Result<Self> {
        match k {
            1 => Ok(Subsystem::First),
            2 => Ok(Subsystem::Second),
            k => Err(Error::IndexOutOfRange {
                index: k as usize,
                bound: 3,
            }),
        }
    }
}

pub fn partial_trace(m: &ComplexMatrix, traced: Subsystem) -> Result<ComplexMatrix> {
    m.require_dim(4)?;
    let mut out = ComplexMatrix::zeros(2);
    for a in 0..2 {
        for b in 0..2 {
            out[(a, b)] = (0..2)
                .map(|k| match traced {
                    Subsystem::Second => m[(2 * a + k, 2 * b + k)],
                    Subsystem::First => m[(2 * k + a, 2 * k + b)],
                })
                .sum();
        }
    }
    Ok(out)
}

/// `|A⟩⟩ = (A ⊗ I)|I⟩⟩` with the unnormalised `|I⟩⟩ = Σᵢ |i⟩|i⟩`.
#[derive(Debug, Clone, PartialEq)]
pub struct OperatorVector {
    dim: usize,
    amps: Vec<Complex64>,
}

impl OperatorVector {
    pub fn from_amps(dim: usize, amps: Vec<Complex64>) -> Result<Self> {
        check_dim(dim)?;
        if amps.len() != dim * dim {
            return Err(Error::DimensionMismatch {
                expected: dim * dim,
                found: amps.len(),
            });
        }
        Ok(Self { dim, amps })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn amps(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn into_amps(self) -> Vec<Complex64> {
        self.amps
    }
}

pub fn vectorize(a: &ComplexMatrix) -> OperatorVector {
    OperatorVector {
        dim: a.dim,
        amps: a.data.clone(),
    }
}

pub fn devectorize(v: &OperatorVector) -> ComplexMatrix {
    ComplexMatrix {
        dim: v.dim,
        data: v.amps.clone(),
    }
}

/// Eigendecomposition of a Hermitian matrix.
#[derive(Debug, Clone)]
pub struct HermitianEigen {
    /// Sorted in descending order.
    pub values: Vec<f64>,
    /// Orthonormal eigenvectors as columns, matching `values`.
    pub vectors: ComplexMatrix,
}

impl HermitianEigen {
    pub fn vector(&self, k: usize) -> Vec<Complex64> {
        self.vectors.column(k)
    }

    pub fn reconstruct(&self) -> ComplexMatrix {
        let n = self.vectors.dim();
        let mut out = ComplexMatrix::zeros(n);
        for (k, &l) in self.values.iter().enumerate() {
            let v = self.vector(k);
            out = &out + &ComplexMatrix::outer(&v, &v).scale_real(l);
        }
        out
    }
}

/// Rotate the vector's phase so its largest-modulus component is real
/// positive; the first of equal-modulus components wins.
fn canonical_phase(v: &mut [Complex64]) {
    let mut best = 0;
    for (k, z) in v.iter().enumerate() {
        if z.norm() > v[best].norm() + 1e-12 {
            best = k;
        }
    }
    let r = v[best].norm();
    if r == 0.0 {
        return;
    }
    let phase = v[best].conj() / r;
    for z in v.iter_mut() {
        *z *= phase;
    }
    v[best] = Complex64::new(v[best].re, 0.0);
}

/// Unit phase of `z`, exact for real input.
fn unit_phase(z: Complex64) -> Complex64 {
    if z.im == 0.0 {
        Complex64::new(z.re.signum(), 0.0)
    } else {
        z / z.norm()
    }
}

/// Eigenvalues (descending) and orthonormal eigenvectors of a Hermitian
/// matrix: closed form for 2×2, cyclic complex Jacobi for 4×4.
pub fn hermitian_eig(h: &ComplexMatrix) -> Result<HermitianEigen> {
    let residual = h.hermiticity_residual();
    if residual > 1e-10 * h.frobenius_norm().max(1.0) {
        return Err(Error::NotHermitian { residual });
    }
    let h = h.hermitian_part();
    let (values, mut vectors) = match h.dim {
        1 => (vec![h[(0, 0)].re], ComplexMatrix::identity(1)),
        2 => eig2(&h),
        _ => jacobi(&h),
    };
    let n = h.dim;
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| values[b].total_cmp(&values[a]));
    let sorted_values = order.iter().map(|&k| values[k]).collect();
    let mut sorted = ComplexMatrix::zeros(n);
    for (dst, &src) in order.iter().enumerate() {
        let mut col = vectors.column(src);
        canonical_phase(&mut col);
        sorted.set_column(dst, &col);
    }
    vectors = sorted;
    Ok(HermitianEigen {
        values: sorted_values,
        vectors,
    })
}

/// Rotation `G` with `G†AG` diagonal on the `(p, q)` block:
/// `G_block = diag(e^{iφ}, 1) · [[c, −s], [s, c]]`.
fn jacobi_rotation(app: f64, aqq: f64, apq: Complex64) -> (f64, f64, Complex64) {
    let r = apq.norm();
    let phase = unit_phase(apq);
    let theta = 0.5 * (2.0 * r).atan2(app - aqq);
    (theta.cos(), theta.sin(), phase)
}

fn eig2(h: &ComplexMatrix) -> (Vec<f64>, ComplexMatrix) {
    let (a, d, b) = (h[(0, 0)].re, h[(1, 1)].re, h[(0, 1)]);
    if b.norm() == 0.0 {
        return (vec![a, d], ComplexMatrix::identity(2));
    }
    let (c, s, ph) = jacobi_rotation(a, d, b);
    let mean = 0.5 * (a + d);
    let half_gap = (0.25 * (a - d) * (a - d) + b.norm_sqr()).sqrt();
    // atan2 picks the rotation whose first column carries the larger eigenvalue.
    let vectors = ComplexMatrix::from_rows([[ph * c, -ph * s], [Complex64::new(s, 0.0), Complex64::new(c, 0.0)]]);
    (vec![mean + half_gap, mean - half_gap], vectors)
}

fn off_diagonal_norm(a: &ComplexMatrix) -> f64 {
    let n = a.dim;
    let mut s = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                s += a[(i, j)].norm_sqr();
            }
        }
    }
    s.sqrt()
}

fn jacobi(h: &ComplexMatrix) -> (Vec<f64>, ComplexMatrix) {
    let n = h.dim;
    let mut a = h.clone();
    let mut v = ComplexMatrix::identity(n);
    let threshold = JACOBI_OFF_TOL * h.frobenius_norm().max(1.0);
    for _ in 0..JACOBI_MAX_SWEEPS {
        if off_diagonal_norm(&a) <= threshold {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[(p, q)];
                if apq.norm() == 0.0 {
                    continue;
                }
                let (c, s, ph) = jacobi_rotation(a[(p, p)].re, a[(q, q)].re, apq);
                // A ← G†AG touches only rows/columns p, q.
                for k in 0..n {
                    let akp = a[(k, p)];
                    let akq = a[(k, q)];
                    a[(k, p)] = akp * ph * c + akq * s;
                    a[(k, q)] = -akp * ph * s + akq * c;
                }
                for k in 0..n {
                    let apk = a[(p, k)];
                    let aqk = a[(q, k)];
                    a[(p, k)] = ph.conj() * c * apk + s * aqk;
                    a[(q, k)] = -ph.conj() * s * apk + c * aqk;
                }
                a[(p, q)] = ZERO;
                a[(q, p)] = ZERO;
                a[(p, p)] = Complex64::new(a[(p, p)].re, 0.0);
                a[(q, q)] = Complex64::new(a[(q, q)].re, 0.0);
                for k in 0..n {
                    let vkp = v[(k, p)];
                    let vkq = v[(k, q)];
                    v[(k, p)] = vkp * ph * c + vkq * s;
                    v[(k, q)] = -vkp * ph * s + vkq * c;
                }
            }
        }
    }
    ((0..n).map(|i| a[(i, i)].re).collect(), v)
}

/// Largest singular value.
pub fn operator_norm(a: &ComplexMatrix) -> f64 {
    let gram = &a.adjoint() * a;
    let top = hermitian_eig(&gram).expect("Gram matrix is Hermitian").values[0];
    top.max(0.0).sqrt()
}

/// True iff `‖a − e^{iγ} b‖_F ≤ tol`, with `γ` read off the largest-modulus
/// entry of `b† a`.
pub fn equal_up_to_global_phase(a: &ComplexMatrix, b: &ComplexMatrix, tol: f64) -> bool {
    phase_aligned_distance(a, b) <= tol
}

/// `min_γ`-style distance used by [`equal_up_to_global_phase`].
pub fn phase_aligned_distance(a: &ComplexMatrix, b: &ComplexMatrix) -> f64 {
    if a.dim != b.dim {
        return f64::INFINITY;
    }
    let overlap = &b.adjoint() * a;
    let mut best = ZERO;
    for &z in overlap.entries() {
        if z.norm() > best.norm() {
            best = z;
        }
    }
    let phase = if best.norm() == 0.0 { ONE } else { best / best.norm() };
    a.distance(&b.scale(phase))
}

/// On-disk matrix layout: `{"dim": n, "rows": [[[re, im], ...], ...]}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MatrixFile {
    pub dim: usize,
    pub rows: Vec<Vec<[f64; 2]>>,
}

impl TryFrom<MatrixFile> for ComplexMatrix {
    type Error = Error;
    fn try_from(f: MatrixFile) -> Result<Self> {
        if f.rows.len() != f.dim {
            return Err(Error::Parse(format!(
                "expected {} rows, found {}",
                f.dim,
                f.rows.len()
            )));
        }
        let mut data = Vec::with_capacity(f.dim * f.dim);
        for (i, row) in f.rows.iter().enumerate() {
            if row.len() != f.dim {
                return Err(Error::Parse(format!(
                    "row {i} has {} entries, expected {}",
                    row.len(),
                    f.dim
                )));
            }
            data.extend(row.iter().map(|&[re, im]| Complex64::new(re, im)));
        }
        ComplexMatrix::new(f.dim, data)
    }
}

impl From<ComplexMatrix> for MatrixFile {
    fn from(m: ComplexMatrix) -> Self {
        MatrixFile {
            dim: m.dim,
            rows: (0..m.dim)
                .map(|i| m.row(i).iter().map(|z| [z.re, z.im]).collect())
                .collect(),
        }
    }
}

impl ComplexMatrix {
    pub fn from_json(text: &str) -> Result<Self> {
        let file: MatrixFile =
            serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        file.try_into()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("matrix serialises")
    }
}
