//! Random matrices and states for sampling and tests.

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::channel::DensityMatrix;
use crate::cxmat::{kron, partial_trace, ComplexMatrix, Subsystem};
use crate::pauli::BlochUnitary;

fn gaussian(rng: &mut impl Rng) -> Complex64 {
    Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

/// Ginibre matrix with standard complex Gaussian entries.
pub fn random_matrix(dim: usize, rng: &mut impl Rng) -> ComplexMatrix {
    ComplexMatrix::new(dim, (0..dim * dim).map(|_| gaussian(rng)).collect())
        .expect("supported dimension")
}

/// Haar-distributed unitary: Gram-Schmidt on a Ginibre matrix, which is
/// the QR route with the diagonal phases already fixed.
pub fn haar_unitary(dim: usize, rng: &mut impl Rng) -> ComplexMatrix {
    let g = random_matrix(dim, rng);
    let mut cols: Vec<Vec<Complex64>> = Vec::with_capacity(dim);
    for j in 0..dim {
        let mut v = g.column(j);
        for q in &cols {
            let proj: Complex64 = q.iter().zip(&v).map(|(a, b)| a.conj() * b).sum();
            for (x, y) in v.iter_mut().zip(q) {
                *x -= proj * y;
            }
        }
        let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        v.iter_mut().for_each(|z| *z /= norm);
        cols.push(v);
    }
    let mut u = ComplexMatrix::zeros(dim);
    for (j, c) in cols.iter().enumerate() {
        u.set_column(j, c);
    }
    u
}

pub fn random_pure_state(dim: usize, rng: &mut impl Rng) -> Vec<Complex64> {
    let mut v: Vec<Complex64> = (0..dim).map(|_| gaussian(rng)).collect();
    let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    v.iter_mut().for_each(|z| *z /= norm);
    v
}

/// Mixed qubit state: reduced state of a Haar-random two-qubit pure state.
pub fn random_density(rng: &mut impl Rng) -> DensityMatrix {
    let psi = random_pure_state(4, rng);
    let rho = partial_trace(&ComplexMatrix::outer(&psi, &psi), Subsystem::Second)
        .expect("two-qubit operator");
    DensityMatrix::new(rho).expect("reduced state is a density matrix")
}

/// Haar-random element of SU(2) in Bloch form.
pub fn random_bloch(rng: &mut impl Rng) -> BlochUnitary {
    let n: [f64; 4] = std::array::from_fn(|_| rng.sample(StandardNormal));
    BlochUnitary::normalized(n).expect("non-zero Gaussian vector")
}

/// Random product unitary `A ⊗ B`.
pub fn random_local(rng: &mut impl Rng) -> (ComplexMatrix, ComplexMatrix, ComplexMatrix) {
    let a = haar_unitary(2, rng);
    let b = haar_unitary(2, rng);
    let ab = kron(&a, &b).expect("2x2 factors");
    (a, b, ab)
}
