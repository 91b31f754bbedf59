//! Pauli transfer matrices M̂_{rr'} = Tr[P̄_r M(P̄_{r'})].

use nalgebra::DVector;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{self, dim_of, CMatrix, RMatrix, ONE, ZERO};
use crate::pauli::{self, PauliIndex, VectorizedOperator};
use crate::tol;

/// Dense real PTM of a Hermiticity-preserving map.
#[derive(Debug, Clone, PartialEq)]
pub struct Ptm {
    n_qubits: usize,
    matrix: RMatrix,
}

impl Ptm {
    pub fn new(n_qubits: usize, matrix: RMatrix) -> Result<Self> {
        check_dense_cap(n_qubits)?;
        let d = PauliIndex::count(n_qubits);
        if matrix.nrows() != d || matrix.ncols() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                found: matrix.nrows().max(matrix.ncols()),
            });
        }
        Ok(Ptm { n_qubits, matrix })
    }

    pub fn identity(n_qubits: usize) -> Self {
        let d = PauliIndex::count(n_qubits);
        Ptm {
            n_qubits,
            matrix: RMatrix::identity(d, d),
        }
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn matrix(&self) -> &RMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> RMatrix {
        self.matrix
    }

    /// PTM of the composition `self ∘ other` (apply `other` first).
    pub fn compose(&self, other: &Ptm) -> Result<Ptm> {
        if self.n_qubits != other.n_qubits {
            return Err(Error::DimensionMismatch {
                expected: self.n_qubits,
                found: other.n_qubits,
            });
        }
        Ok(Ptm {
            n_qubits: self.n_qubits,
            matrix: &self.matrix * &other.matrix,
        })
    }

    /// PTM of the tensor product, qubits of `self` first.
    pub fn tensor(&self, other: &Ptm) -> Result<Ptm> {
        Ptm::new(self.n_qubits + other.n_qubits, self.matrix.kronecker(&other.matrix))
    }

    /// Max deviation of the first row from (1, 0, …, 0).
    pub fn trace_preservation_defect(&self) -> f64 {
        self.matrix
            .row(0)
            .iter()
            .enumerate()
            .map(|(k, v)| if k == 0 { (v - 1.0).abs() } else { v.abs() })
            .fold(0.0, f64::max)
    }

    /// N̂|A⟩⟩.
    pub fn apply(&self, v: &VectorizedOperator) -> Result<VectorizedOperator> {
        if v.n_qubits() != self.n_qubits {
            return Err(Error::DimensionMismatch {
                expected: self.n_qubits,
                found: v.n_qubits(),
            });
        }
        let m = self.matrix.map(Complex64::from);
        VectorizedOperator::from_coefficients(self.n_qubits, m * v.coefficients())
    }

    /// M(A) for an operator A, via the Pauli basis.
    pub fn apply_operator(&self, a: &CMatrix) -> Result<CMatrix> {
        let v = pauli::vectorize(a, self.n_qubits)?;
        Ok(pauli::unvectorize(&self.apply(&v)?))
    }

    /// Choi matrix J = Σ_{ij} |i⟩⟨j| ⊗ M(|i⟩⟨j|), input factor first.
    pub fn choi(&self) -> Result<CMatrix> {
        let dim = dim_of(self.n_qubits);
        let mut j = CMatrix::zeros(dim * dim, dim * dim);
        for i in 0..dim {
            for k in 0..dim {
                let mut e = CMatrix::zeros(dim, dim);
                e[(i, k)] = ONE;
                let image = self.apply_operator(&e)?;
                for a in 0..dim {
                    for b in 0..dim {
                        j[(i * dim + a, k * dim + b)] = image[(a, b)];
                    }
                }
            }
        }
        Ok(j)
    }

    /// A Kraus decomposition from the eigen-decomposition of the Choi
    /// matrix. Fails if the map is not completely positive.
    pub fn to_kraus(&self) -> Result<Vec<CMatrix>> {
        let dim = dim_of(self.n_qubits);
        let j = self.choi()?;
        let (vals, vecs) = linalg::eigh(&j);
        let scale = vals.iter().fold(0.0_f64, |m, v| m.max(v.abs())).max(1.0);
        let mut kraus = Vec::new();
        for (k, &lambda) in vals.iter().enumerate() {
            if lambda < -1e-9 * scale {
                return Err(Error::Numerical(format!(
                    "map is not completely positive (Choi eigenvalue {lambda:.3e})"
                )));
            }
            if lambda <= 1e-13 * scale {
                continue;
            }
            let s = Complex64::from(lambda.sqrt());
            let mut a = CMatrix::zeros(dim, dim);
            for i in 0..dim {
                for out in 0..dim {
                    a[(out, i)] = vecs[(i * dim + out, k)] * s;
                }
            }
            kraus.push(a);
        }
        Ok(kraus)
    }
}

fn check_dense_cap(n_qubits: usize) -> Result<()> {
    if n_qubits > tol::MAX_DENSE_PTM_QUBITS {
        return Err(Error::TooManyQubits {
            what: "dense PTM",
            n: n_qubits,
            max: tol::MAX_DENSE_PTM_QUBITS,
        });
    }
    Ok(())
}

/// PTM of an arbitrary linear map on 2^n × 2^n operators. Entries with an
/// imaginary residue above [`tol::PTM_IMAG`] are rejected as not
/// Hermiticity-preserving; smaller residues are discarded.
pub fn ptm_of_map(n_qubits: usize, map: impl Fn(&CMatrix) -> CMatrix) -> Result<Ptm> {
    check_dense_cap(n_qubits)?;
    let count = PauliIndex::count(n_qubits);
    let norm = (dim_of(n_qubits) as f64).sqrt().recip();
    let mut m = RMatrix::zeros(count, count);
    for r in PauliIndex::all(n_qubits) {
        let p = pauli::pauli_op(r).scale(norm);
        let image = map(&p);
        let col = pauli::vectorize(&image, n_qubits)?;
        for (row, c) in col.coefficients().iter().enumerate() {
            if c.im.abs() > tol::PTM_IMAG {
                return Err(Error::Numerical(format!(
                    "map is not Hermiticity preserving (PTM imaginary part {:.3e})",
                    c.im
                )));
            }
            m[(row, r.flat())] = c.re;
        }
    }
    Ok(Ptm { n_qubits, matrix: m })
}

/// PTM of ρ ↦ Σ_j A_j ρ A_j†. The Kraus set must be trace preserving.
pub fn ptm_from_kraus(kraus: &[CMatrix], n_qubits: usize) -> Result<Ptm> {
    let dim = dim_of(n_qubits);
    for a in kraus {
        if a.nrows() != dim || a.ncols() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: a.nrows().max(a.ncols()),
            });
        }
    }
    let defect = linalg::completeness_defect(kraus);
    if defect > tol::KRAUS_COMPLETENESS {
        return Err(Error::NotTracePreserving { deviation: defect });
    }
    ptm_of_map(n_qubits, |p| linalg::kraus_full(p, kraus))
}

/// PTM of the unitary conjugation ρ ↦ UρU†.
pub fn ptm_of_unitary(u: &CMatrix, n_qubits: usize) -> Result<Ptm> {
    ptm_of_map(n_qubits, |p| u * p * u.adjoint())
}

/// Real Pauli coefficients of a Hermitian operator.
pub fn real_coefficients(a: &CMatrix, n_qubits: usize) -> Result<DVector<f64>> {
    let v = pauli::vectorize(a, n_qubits)?;
    v.to_real(tol::PTM_IMAG.max(1e-10 * a.norm()))
        .ok_or(Error::NotHermitian {
            deviation: linalg::hermiticity_defect(a),
        })
}

/// Σ_j |Tr A_j|².
pub fn kraus_trace_sum(kraus: &[CMatrix]) -> f64 {
    kraus
        .iter()
        .map(|a| a.diagonal().iter().fold(ZERO, |s, z| s + z).norm_sqr())
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn x() -> CMatrix {
        CMatrix::from_row_slice(2, 2, &[ZERO, ONE, ONE, ZERO])
    }

    #[test]
    fn identity_kraus() {
        for n in 1..=2 {
            let id = CMatrix::identity(dim_of(n), dim_of(n));
            let ptm = ptm_from_kraus(&[id], n).unwrap();
            assert!((ptm.matrix() - Ptm::identity(n).matrix()).abs().max() < 1e-14);
        }
    }

    #[test]
    fn x_conjugation_flips_y_and_z() {
        let ptm = ptm_from_kraus(&[x()], 1).unwrap();
        let expected = RMatrix::from_diagonal(&DVector::from_vec(vec![1.0, 1.0, -1.0, -1.0]));
        assert!((ptm.matrix() - expected).abs().max() < 1e-14);
    }

    #[test]
    fn rejects_non_trace_preserving() {
        let half = CMatrix::identity(2, 2).scale(0.5);
        assert!(matches!(
            ptm_from_kraus(&[half], 1),
            Err(Error::NotTracePreserving { .. })
        ));
    }

    #[test]
    fn kraus_round_trip_through_choi() {
        let g: f64 = 0.3;
        let a0 = CMatrix::from_row_slice(2, 2, &[ONE, ZERO, ZERO, Complex64::from((1.0 - g).sqrt())]);
        let a1 = CMatrix::from_row_slice(2, 2, &[ZERO, Complex64::from(g.sqrt()), ZERO, ZERO]);
        let ptm = ptm_from_kraus(&[a0, a1], 1).unwrap();
        let kraus = ptm.to_kraus().unwrap();
        assert!(linalg::completeness_defect(&kraus) < 1e-12);
        let again = ptm_from_kraus(&kraus, 1).unwrap();
        assert!((again.matrix() - ptm.matrix()).abs().max() < 1e-12);
    }

    #[test]
    fn non_cp_map_has_no_kraus() {
        // Transpose is positive but not completely positive.
        let t = ptm_of_map(1, |a| a.transpose()).unwrap();
        assert!(t.to_kraus().is_err());
    }
}
