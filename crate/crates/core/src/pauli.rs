//! Pauli operators labelled by binary symplectic vectors, and the Liouville
//! (normalized Pauli basis) vectorization of operators.
//!
//! Flat index order: one base-4 digit per qubit in the order I, X, Y, Z,
//! qubit 0 most significant. Index 0 is the identity, and the flat index of a
//! tensor product of Paulis is the Kronecker index of the factors, so the PTM
//! of a product channel is the Kronecker product of the factor PTMs.

use nalgebra::DVector;
use num_complex::Complex64;
use std::fmt;

use crate::error::{Error, Result};
use crate::linalg::{dim_of, fwht, CMatrix, I, ONE, ZERO};
use crate::tol;

/// Binary symplectic label r = (x, z) of the n-qubit Pauli operator
/// P_r = i^{x·z} X(x) Z(z). Bit `n − 1 − q` of `x`/`z` belongs to qubit `q`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct PauliIndex {
    n_qubits: usize,
    x: usize,
    z: usize,
}

impl PauliIndex {
    pub fn new(n_qubits: usize, x: usize, z: usize) -> Result<Self> {
        let limit = dim_of(n_qubits);
        if x >= limit || z >= limit {
            return Err(Error::InvalidArgument(format!(
                "Pauli bit vectors (x={x:#b}, z={z:#b}) exceed {n_qubits} qubits"
            )));
        }
        Ok(PauliIndex { n_qubits, x, z })
    }

    pub fn identity(n_qubits: usize) -> Self {
        PauliIndex { n_qubits, x: 0, z: 0 }
    }

    /// Number of Pauli labels on `n_qubits` qubits, 4^n.
    pub fn count(n_qubits: usize) -> usize {
        1usize << (2 * n_qubits)
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn x(&self) -> usize {
        self.x
    }

    pub fn z(&self) -> usize {
        self.z
    }

    /// Number of non-identity tensor factors.
    pub fn weight(&self) -> u32 {
        (self.x | self.z).count_ones()
    }

    pub fn from_flat(n_qubits: usize, flat: usize) -> Self {
        debug_assert!(flat < Self::count(n_qubits));
        let (mut x, mut z) = (0, 0);
        for q in 0..n_qubits {
            let digit = (flat >> (2 * (n_qubits - 1 - q))) & 3;
            let bit = 1 << (n_qubits - 1 - q);
            match digit {
                1 => x |= bit,
                2 => {
                    x |= bit;
                    z |= bit;
                }
                3 => z |= bit,
                _ => {}
            }
        }
        PauliIndex { n_qubits, x, z }
    }

    pub fn flat(&self) -> usize {
        flat_index(self.n_qubits, self.x, self.z)
    }

    /// Parses labels such as `"XIZ"` (qubit 0 first).
    pub fn from_label(label: &str) -> Result<Self> {
        let n = label.chars().count();
        let (mut x, mut z) = (0, 0);
        for (q, c) in label.chars().enumerate() {
            let bit = 1 << (n - 1 - q);
            match c.to_ascii_uppercase() {
                'I' => {}
                'X' => x |= bit,
                'Y' => {
                    x |= bit;
                    z |= bit;
                }
                'Z' => z |= bit,
                other => return Err(Error::InvalidArgument(format!("unknown Pauli letter {other:?}"))),
            }
        }
        Ok(PauliIndex { n_qubits: n, x, z })
    }

    pub fn all(n_qubits: usize) -> impl Iterator<Item = PauliIndex> {
        (0..Self::count(n_qubits)).map(move |f| Self::from_flat(n_qubits, f))
    }
}

impl fmt::Display for PauliIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for q in 0..self.n_qubits {
            let bit = 1 << (self.n_qubits - 1 - q);
            let c = match (self.x & bit != 0, self.z & bit != 0) {
                (false, false) => 'I',
                (true, false) => 'X',
                (true, true) => 'Y',
                (false, true) => 'Z',
            };
            write!(f, "{c}")?;
        }
        Ok(())
    }
}

#[inline]
fn flat_index(n_qubits: usize, x: usize, z: usize) -> usize {
    let mut flat = 0;
    for q in 0..n_qubits {
        let shift = n_qubits - 1 - q;
        let xb = (x >> shift) & 1;
        let zb = (z >> shift) & 1;
        flat = (flat << 2) | (2 * zb + (xb ^ zb));
    }
    flat
}

/// i^k for integer k.
#[inline]
fn i_pow(k: u32) -> Complex64 {
    match k % 4 {
        0 => ONE,
        1 => I,
        2 => -ONE,
        _ => -I,
    }
}

/// The 2^n × 2^n matrix of P_r.
pub fn pauli_op(r: PauliIndex) -> CMatrix {
    let dim = dim_of(r.n_qubits);
    let phase = i_pow((r.x & r.z).count_ones());
    let mut m = CMatrix::zeros(dim, dim);
    for col in 0..dim {
        let sign = if (col & r.z).count_ones().is_multiple_of(2) {
            1.0
        } else {
            -1.0
        };
        m[(col ^ r.x, col)] = phase * sign;
    }
    m
}

/// Coefficients χ_A(r) = Tr(P̄_r A) of an operator in the normalized Pauli
/// basis P̄_r = P_r / 2^{n/2}, stored in flat-index order.
#[derive(Debug, Clone, PartialEq)]
pub struct VectorizedOperator {
    n_qubits: usize,
    coefficients: DVector<Complex64>,
}

impl VectorizedOperator {
    pub fn from_coefficients(n_qubits: usize, coefficients: DVector<Complex64>) -> Result<Self> {
        let expected = PauliIndex::count(n_qubits);
        if coefficients.len() != expected {
            return Err(Error::DimensionMismatch {
                expected,
                found: coefficients.len(),
            });
        }
        Ok(VectorizedOperator { n_qubits, coefficients })
    }

    pub fn from_real(n_qubits: usize, coefficients: &DVector<f64>) -> Result<Self> {
        Self::from_coefficients(n_qubits, coefficients.map(Complex64::from))
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn coefficients(&self) -> &DVector<Complex64> {
        &self.coefficients
    }

    pub fn get(&self, r: PauliIndex) -> Complex64 {
        self.coefficients[r.flat()]
    }

    /// Real coefficient vector; `None` if any imaginary part exceeds `tol`
    /// (i.e. the operator is not Hermitian).
    pub fn to_real(&self, tol: f64) -> Option<DVector<f64>> {
        if self.coefficients.iter().any(|c| c.im.abs() > tol) {
            return None;
        }
        Some(self.coefficients.map(|c| c.re))
    }

    /// Hilbert–Schmidt norm squared, Tr(A†A).
    pub fn norm_squared(&self) -> f64 {
        self.coefficients.iter().map(|c| c.norm_sqr()).sum()
    }
}

/// |A⟩⟩ for a 2^n × 2^n operator.
pub fn vectorize(a: &CMatrix, n_qubits: usize) -> Result<VectorizedOperator> {
    if n_qubits > tol::MAX_PTM_QUBITS {
        return Err(Error::TooManyQubits {
            what: "vectorization",
            n: n_qubits,
            max: tol::MAX_PTM_QUBITS,
        });
    }
    let dim = dim_of(n_qubits);
    if a.nrows() != dim || a.ncols() != dim {
        return Err(Error::DimensionMismatch {
            expected: dim,
            found: a.nrows().max(a.ncols()),
        });
    }
    let norm = (dim as f64).sqrt().recip();
    let mut coefficients = DVector::from_element(dim * dim, ZERO);
    let mut buf = vec![ZERO; dim];
    for x in 0..dim {
        for (c, slot) in buf.iter_mut().enumerate() {
            *slot = a[(c, c ^ x)];
        }
        fwht(&mut buf);
        for (z, &w) in buf.iter().enumerate() {
            let phase = i_pow((x & z).count_ones());
            coefficients[flat_index(n_qubits, x, z)] = phase * w * norm;
        }
    }
    Ok(VectorizedOperator { n_qubits, coefficients })
}

/// Inverse of [`vectorize`]: A = Σ_r χ_A(r) P̄_r.
pub fn unvectorize(v: &VectorizedOperator) -> CMatrix {
    let n = v.n_qubits;
    let dim = dim_of(n);
    let norm = (dim as f64).sqrt().recip();
    let mut a = CMatrix::zeros(dim, dim);
    let mut buf = vec![ZERO; dim];
    for x in 0..dim {
        for (z, slot) in buf.iter_mut().enumerate() {
            let phase = i_pow((x & z).count_ones()).conj();
            *slot = v.coefficients[flat_index(n, x, z)] * phase;
        }
        fwht(&mut buf);
        for (c, &w) in buf.iter().enumerate() {
            a[(c, c ^ x)] = w * norm;
        }
    }
    a
}
