//! Density matrices and the distance/entropy functionals used throughout.

use nalgebra::DVector;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{self, dim_of, qubits_of, CMatrix, ONE, ZERO};
use crate::pauli::{self, VectorizedOperator};
use crate::tol;

/// A validated n-qubit density matrix: Hermitian, unit trace, PSD (all up to
/// the tolerances in [`crate::tol`]).
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    n_qubits: usize,
    matrix: CMatrix,
}

impl DensityMatrix {
    pub fn new(matrix: CMatrix) -> Result<Self> {
        let rho = Self::from_matrix_unchecked(matrix)?;
        rho.validate()?;
        Ok(rho)
    }

    /// Wraps a square power-of-two matrix without the spectral checks. Used
    /// on the hot paths where the input is the image of a valid state under
    /// a CPTP map.
    pub fn from_matrix_unchecked(matrix: CMatrix) -> Result<Self> {
        if matrix.nrows() != matrix.ncols() {
            return Err(Error::DimensionMismatch {
                expected: matrix.nrows(),
                found: matrix.ncols(),
            });
        }
        let n_qubits = qubits_of(matrix.nrows())
            .ok_or_else(|| Error::InvalidState(format!("dimension {} is not 2^n", matrix.nrows())))?;
        if n_qubits > tol::MAX_STATE_QUBITS {
            return Err(Error::TooManyQubits {
                what: "density matrix",
                n: n_qubits,
                max: tol::MAX_STATE_QUBITS,
            });
        }
        Ok(DensityMatrix { n_qubits, matrix })
    }

    /// Checks the Hermitian, trace and PSD invariants.
    pub fn validate(&self) -> Result<()> {
        if !linalg::all_finite(&self.matrix) {
            return Err(Error::Numerical("non-finite density-matrix entry".into()));
        }
        let defect = linalg::hermiticity_defect(&self.matrix);
        if defect > tol::HERMITIAN {
            return Err(Error::NotHermitian { deviation: defect });
        }
        let tr = linalg::trace(&self.matrix);
        if (tr - ONE).norm() > tol::TRACE {
            return Err(Error::InvalidState(format!("trace {tr} differs from 1")));
        }
        let min = linalg::eigvalsh(&self.matrix)[0];
        if min < tol::PSD {
            return Err(Error::InvalidState(format!("negative eigenvalue {min:.3e}")));
        }
        Ok(())
    }

    /// |ψ⟩⟨ψ| for a (not necessarily normalized) amplitude vector.
    pub fn from_pure(psi: &DVector<Complex64>) -> Result<Self> {
        let norm = psi.norm();
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::InvalidState("zero or non-finite state vector".into()));
        }
        let psi = psi / Complex64::from(norm);
        Self::from_matrix_unchecked(&psi * psi.adjoint())
    }

    /// Computational basis state |k⟩⟨k|.
    pub fn basis_state(n_qubits: usize, k: usize) -> Result<Self> {
        let dim = dim_of(n_qubits);
        if k >= dim {
            return Err(Error::InvalidArgument(format!(
                "basis index {k} out of range for {n_qubits} qubits"
            )));
        }
        let mut m = CMatrix::zeros(dim, dim);
        m[(k, k)] = ONE;
        Self::from_matrix_unchecked(m)
    }

    pub fn maximally_mixed(n_qubits: usize) -> Result<Self> {
        let dim = dim_of(n_qubits);
        Self::from_matrix_unchecked(CMatrix::identity(dim, dim).unscale(dim as f64))
    }

    /// |+⟩⟨+|^{⊗n}: every entry equals 1/2^n.
    pub fn plus_state(n_qubits: usize) -> Result<Self> {
        let dim = dim_of(n_qubits);
        Self::from_matrix_unchecked(CMatrix::from_element(dim, dim, Complex64::from(1.0 / dim as f64)))
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> CMatrix {
        self.matrix
    }

    pub fn vectorize(&self) -> Result<VectorizedOperator> {
        pauli::vectorize(&self.matrix, self.n_qubits)
    }

    /// Reconstructs and validates a state from its Pauli coefficients.
    pub fn from_vectorized(v: &VectorizedOperator) -> Result<Self> {
        Self::new(pauli::unvectorize(v))
    }

    /// U ρ U†.
    pub fn conjugate(&self, u: &CMatrix) -> Result<Self> {
        if u.nrows() != self.dim() || u.ncols() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: u.nrows(),
            });
        }
        Ok(DensityMatrix {
            n_qubits: self.n_qubits,
            matrix: linalg::conjugate(&self.matrix, u),
        })
    }

    /// Tr(O ρ), real part (O is assumed Hermitian).
    pub fn expectation(&self, o: &CMatrix) -> Result<f64> {
        check_dims(self.dim(), o.nrows())?;
        Ok(trace_product(o, &self.matrix).re)
    }
}

fn check_dims(a: usize, b: usize) -> Result<()> {
    if a != b {
        return Err(Error::DimensionMismatch { expected: a, found: b });
    }
    Ok(())
}

/// Tr(AB) without forming the product.
pub fn trace_product(a: &CMatrix, b: &CMatrix) -> Complex64 {
    let n = a.nrows();
    let mut acc = ZERO;
    for i in 0..n {
        for k in 0..n {
            acc += a[(i, k)] * b[(k, i)];
        }
    }
    acc
}

/// Tr(ρ²).
pub fn purity(rho: &DensityMatrix) -> f64 {
    rho.matrix.iter().map(|z| z.norm_sqr()).sum()
}

/// Tr(ρσ) for Hermitian ρ, σ.
pub fn overlap(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<f64> {
    check_dims(rho.dim(), sigma.dim())?;
    Ok(rho
        .matrix
        .iter()
        .zip(sigma.matrix.iter())
        .map(|(a, b)| (a * b.conj()).re)
        .sum())
}

/// T(ρ, σ) = ‖ρ − σ‖₁ / 2.
pub fn trace_distance(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<f64> {
    check_dims(rho.dim(), sigma.dim())?;
    let diff = &rho.matrix - &sigma.matrix;
    let t = 0.5 * linalg::eigvalsh(&diff).iter().map(|v| v.abs()).sum::<f64>();
    Ok(t.clamp(0.0, 1.0))
}

/// Root fidelity F(ρ, σ) = Tr √(√ρ σ √ρ).
pub fn fidelity(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<f64> {
    check_dims(rho.dim(), sigma.dim())?;
    let sqrt_rho = linalg::hermitian_map(&rho.matrix, |v| v.max(0.0).sqrt());
    let inner = linalg::matmul(&linalg::matmul(&sqrt_rho, &sigma.matrix), &sqrt_rho);
    let f: f64 = linalg::eigvalsh(&inner).iter().map(|v| v.max(0.0).sqrt()).sum();
    Ok(f.clamp(0.0, 1.0))
}

/// Schatten p-norm (Σ sᵢ^p)^{1/p}; `p = f64::INFINITY` gives the operator
/// norm.
pub fn schatten_norm(a: &CMatrix, p: f64) -> Result<f64> {
    if p.is_nan() || p < 1.0 {
        return Err(Error::OutOfRange {
            name: "p",
            value: p,
            range: "[1, inf]".into(),
        });
    }
    let s = linalg::singular_values(a);
    if p.is_infinite() {
        return Ok(s.into_iter().fold(0.0, f64::max));
    }
    Ok(s.iter().map(|v| v.powf(p)).sum::<f64>().powf(1.0 / p))
}

/// Quantum relative entropy D(ρ‖σ) = Tr ρ(log₂ρ − log₂σ) in bits.
/// Returns `+inf` when the support of ρ is not contained in that of σ.
pub fn relative_entropy(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<f64> {
    check_dims(rho.dim(), sigma.dim())?;
    let (p, u) = linalg::eigh(&rho.matrix);
    let (q, v) = linalg::eigh(&sigma.matrix);
    let overlaps = u.adjoint() * &v;

    let mut d = 0.0;
    for (i, &pi) in p.iter().enumerate() {
        let pi = clip_unit(pi);
        if pi == 0.0 {
            continue;
        }
        d += pi * pi.log2();
        for (j, &qj) in q.iter().enumerate() {
            let w = overlaps[(i, j)].norm_sqr();
            if w <= tol::EIGEN_CLIP {
                continue;
            }
            let qj = clip_unit(qj);
            if qj == 0.0 {
                return Ok(f64::INFINITY);
            }
            d -= pi * w * qj.log2();
        }
    }
    Ok(d.max(0.0))
}

/// Eigenvalues within the clip tolerance of 0 or 1 are snapped there.
fn clip_unit(x: f64) -> f64 {
    if x <= tol::EIGEN_CLIP {
        0.0
    } else if x >= 1.0 - tol::EIGEN_CLIP {
        1.0
    } else {
        x
    }
}
