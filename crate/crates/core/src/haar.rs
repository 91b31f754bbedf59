//! Haar-random unitaries and random states.

use nalgebra::DVector;
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::Result;
use crate::linalg::{dim_of, CMatrix};
use crate::state::DensityMatrix;

fn complex_gaussian<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

/// Ginibre matrix with i.i.d. standard complex normal entries.
pub fn ginibre<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> CMatrix {
    // Row-major fill keeps the random draw order independent of storage.
    let mut m = CMatrix::zeros(rows, cols);
    for i in 0..rows {
        for j in 0..cols {
            m[(i, j)] = complex_gaussian(rng);
        }
    }
    m
}

/// Haar-distributed unitary on `n_qubits` qubits: QR of a Ginibre matrix with
/// the phases of diag(R) moved into Q, which makes the distribution exactly
/// Haar.
pub fn haar_unitary<R: Rng + ?Sized>(n_qubits: usize, rng: &mut R) -> CMatrix {
    haar_unitary_dim(dim_of(n_qubits), rng)
}

pub fn haar_unitary_dim<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> CMatrix {
    let qr = ginibre(dim, dim, rng).qr();
    let r = qr.r();
    let mut q = qr.q();
    for j in 0..dim {
        let d = r[(j, j)];
        let phase = if d.norm() > 0.0 {
            d / d.norm()
        } else {
            Complex64::from(1.0)
        };
        for i in 0..dim {
            q[(i, j)] *= phase;
        }
    }
    q
}

/// Haar-random pure state vector.
pub fn random_state_vector<R: Rng + ?Sized>(n_qubits: usize, rng: &mut R) -> DVector<Complex64> {
    let dim = dim_of(n_qubits);
    let v = DVector::from_iterator(dim, (0..dim).map(|_| complex_gaussian(rng)));
    let norm = v.norm();
    v / Complex64::from(norm)
}

pub fn random_pure_state<R: Rng + ?Sized>(n_qubits: usize, rng: &mut R) -> Result<DensityMatrix> {
    DensityMatrix::from_pure(&random_state_vector(n_qubits, rng))
}

/// Random mixed state G G†/Tr(G G†) with G a 2^n × `rank` Ginibre matrix
/// (rank = 2^n gives the Hilbert–Schmidt measure).
pub fn random_mixed_state<R: Rng + ?Sized>(n_qubits: usize, rank: usize, rng: &mut R) -> Result<DensityMatrix> {
    let g = ginibre(dim_of(n_qubits), rank.max(1), rng);
    let m = &g * g.adjoint();
    let tr = m.trace();
    DensityMatrix::from_matrix_unchecked(m / tr)
}

/// Random Hermitian matrix (GUE-like).
pub fn random_hermitian<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> CMatrix {
    let g = ginibre(dim, dim, rng);
    (&g + g.adjoint()).scale(0.5)
}
