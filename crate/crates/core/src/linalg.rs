//! Dense complex linear-algebra helpers on top of `nalgebra`.
//!
//! Qubit 0 is the leftmost tensor factor, i.e. the most significant bit of a
//! computational-basis index.

use nalgebra::DMatrix;
use num_complex::Complex64;

pub type CMatrix = DMatrix<Complex64>;
pub type RMatrix = DMatrix<f64>;

pub const ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub const ONE: Complex64 = Complex64::new(1.0, 0.0);
pub const I: Complex64 = Complex64::new(0.0, 1.0);

pub fn identity(dim: usize) -> CMatrix {
    CMatrix::identity(dim, dim)
}

pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a.kronecker(b)
}

pub fn kron_real(a: &RMatrix, b: &RMatrix) -> RMatrix {
    a.kronecker(b)
}

fn split(a: &CMatrix) -> (RMatrix, RMatrix) {
    (a.map(|z| z.re), a.map(|z| z.im))
}

/// Complex product computed with four real GEMMs. nalgebra's generic
/// complex kernel is far slower than its real one, so this dominates the
/// cost of conjugating states by dense unitaries.
pub fn matmul(a: &CMatrix, b: &CMatrix) -> CMatrix {
    assert_eq!(a.ncols(), b.nrows(), "matmul dimension mismatch");
    if a.nrows() * a.ncols() * b.ncols() < 512 {
        return a * b;
    }
    let (ar, ai) = split(a);
    let (br, bi) = split(b);
    let re = &ar * &br - &ai * &bi;
    let im = &ar * &bi + &ai * &br;
    CMatrix::from_fn(re.nrows(), re.ncols(), |i, j| Complex64::new(re[(i, j)], im[(i, j)]))
}

/// U M U†.
pub fn conjugate(m: &CMatrix, u: &CMatrix) -> CMatrix {
    matmul(&matmul(u, m), &u.adjoint())
}

pub fn trace(m: &CMatrix) -> Complex64 {
    m.diagonal().iter().sum()
}

pub fn max_abs_diff(a: &CMatrix, b: &CMatrix) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

/// Max entrywise |A − A†|.
pub fn hermiticity_defect(a: &CMatrix) -> f64 {
    let n = a.nrows();
    let mut worst: f64 = 0.0;
    for i in 0..n {
        for j in i..n {
            worst = worst.max((a[(i, j)] - a[(j, i)].conj()).norm());
        }
    }
    worst
}

pub fn all_finite(a: &CMatrix) -> bool {
    a.iter().all(|z| z.re.is_finite() && z.im.is_finite())
}

/// Hermitian part (A + A†)/2, used to remove round-off skew before
/// Hermitian eigensolvers.
pub fn hermitize(a: &CMatrix) -> CMatrix {
    (a + a.adjoint()).scale(0.5)
}

/// Eigenvalues of a Hermitian matrix, ascending.
pub fn eigvalsh(a: &CMatrix) -> Vec<f64> {
    let mut ev: Vec<f64> = hermitize(a).symmetric_eigenvalues().iter().copied().collect();
    ev.sort_by(|x, y| x.total_cmp(y));
    ev
}

/// Eigen-decomposition of a Hermitian matrix; columns of the returned
/// matrix are the eigenvectors.
pub fn eigh(a: &CMatrix) -> (Vec<f64>, CMatrix) {
    let eig = hermitize(a).symmetric_eigen();
    (eig.eigenvalues.iter().copied().collect(), eig.eigenvectors)
}

/// Eigenvalues of a real symmetric matrix, ascending.
pub fn eigvalsh_real(a: &RMatrix) -> Vec<f64> {
    let sym = (a + a.transpose()).scale(0.5);
    let mut ev: Vec<f64> = sym.symmetric_eigenvalues().iter().copied().collect();
    ev.sort_by(|x, y| x.total_cmp(y));
    ev
}

pub fn singular_values(a: &CMatrix) -> Vec<f64> {
    a.clone().svd(false, false).singular_values.iter().copied().collect()
}

/// Spectral function of a Hermitian matrix: V f(Λ) V†.
pub fn hermitian_map(a: &CMatrix, f: impl Fn(f64) -> f64) -> CMatrix {
    let (vals, vecs) = eigh(a);
    let mut scaled = vecs.clone();
    for (j, &v) in vals.iter().enumerate() {
        scaled.column_mut(j).scale_mut(f(v));
    }
    matmul(&scaled, &vecs.adjoint())
}

/// In-place fast Walsh–Hadamard transform (unnormalized).
pub fn fwht(v: &mut [Complex64]) {
    let n = v.len();
    debug_assert!(n.is_power_of_two());
    let mut h = 1;
    while h < n {
        for block in (0..n).step_by(2 * h) {
            for i in block..block + h {
                let (a, b) = (v[i], v[i + h]);
                v[i] = a + b;
                v[i + h] = a - b;
            }
        }
        h *= 2;
    }
}

/// Location of a contiguous qubit block `[first, first + width)` inside an
/// `n`-qubit basis index.
#[derive(Debug, Clone, Copy)]
pub struct Block {
    shift: usize,
    mask: usize,
}

impl Block {
    pub fn new(first: usize, width: usize, n_qubits: usize) -> Self {
        assert!(first + width <= n_qubits, "qubit block out of range");
        Block {
            shift: n_qubits - first - width,
            mask: ((1usize << width) - 1) << (n_qubits - first - width),
        }
    }

    #[inline]
    fn local(&self, index: usize) -> usize {
        (index & self.mask) >> self.shift
    }

    #[inline]
    fn with_local(&self, index: usize, local: usize) -> usize {
        (index & !self.mask) | (local << self.shift)
    }

    /// Dimension 2^width of the block.
    pub fn dim(&self) -> usize {
        (self.mask >> self.shift) + 1
    }
}

/// (I ⊗ op ⊗ I) · m with `op` acting on `block`.
pub fn left_local(m: &CMatrix, op: &CMatrix, block: Block) -> CMatrix {
    let dim = m.nrows();
    let k = op.nrows();
    let mut out = CMatrix::zeros(dim, m.ncols());
    let mut gathered = vec![ZERO; k];
    for col in 0..m.ncols() {
        for row in 0..dim {
            if block.local(row) != 0 {
                continue;
            }
            for (j, g) in gathered.iter_mut().enumerate() {
                *g = m[(block.with_local(row, j), col)];
            }
            for i in 0..k {
                let mut acc = ZERO;
                for (j, g) in gathered.iter().enumerate() {
                    acc += op[(i, j)] * g;
                }
                out[(block.with_local(row, i), col)] = acc;
            }
        }
    }
    out
}

/// m · (I ⊗ op ⊗ I)† with `op` acting on `block`.
pub fn right_local_adjoint(m: &CMatrix, op: &CMatrix, block: Block) -> CMatrix {
    let dim = m.ncols();
    let k = op.nrows();
    let mut out = CMatrix::zeros(m.nrows(), dim);
    let mut gathered = vec![ZERO; k];
    for col in 0..dim {
        if block.local(col) != 0 {
            continue;
        }
        for row in 0..m.nrows() {
            for (j, g) in gathered.iter_mut().enumerate() {
                *g = m[(row, block.with_local(col, j))];
            }
            for i in 0..k {
                let mut acc = ZERO;
                for (j, g) in gathered.iter().enumerate() {
                    acc += g * op[(i, j)].conj();
                }
                out[(row, block.with_local(col, i))] = acc;
            }
        }
    }
    out
}

/// op ρ op† restricted to `block`.
pub fn conjugate_local(m: &CMatrix, op: &CMatrix, block: Block) -> CMatrix {
    right_local_adjoint(&left_local(m, op, block), op, block)
}

/// Σ_j A_j ρ A_j† with every A_j acting on `block`.
pub fn kraus_local(m: &CMatrix, kraus: &[CMatrix], block: Block) -> CMatrix {
    let mut out = CMatrix::zeros(m.nrows(), m.ncols());
    for a in kraus {
        out += conjugate_local(m, a, block);
    }
    out
}

/// Σ_j A_j ρ A_j† for full-register operators.
pub fn kraus_full(m: &CMatrix, kraus: &[CMatrix]) -> CMatrix {
    let mut out = CMatrix::zeros(m.nrows(), m.ncols());
    for a in kraus {
        out += a * m * a.adjoint();
    }
    out
}

/// (1 − p)·m + p·(I/d ⊗ Tr_block m) with d the block dimension. This is
/// depolarizing noise on `block`; the map is its own adjoint.
pub fn depolarize_local(m: &CMatrix, block: Block, p: f64) -> CMatrix {
    let dim = m.nrows();
    let d = block.dim();
    let mut out = m.scale(1.0 - p);
    let w = Complex64::from(p / d as f64);
    for b in 0..dim {
        if block.local(b) != 0 {
            continue;
        }
        for a in 0..dim {
            if block.local(a) != 0 {
                continue;
            }
            let mut t = ZERO;
            for k in 0..d {
                t += m[(block.with_local(a, k), block.with_local(b, k))];
            }
            let t = t * w;
            for k in 0..d {
                out[(block.with_local(a, k), block.with_local(b, k))] += t;
            }
        }
    }
    out
}

/// Max entrywise deviation of Σ A†A from the identity.
pub fn completeness_defect(kraus: &[CMatrix]) -> f64 {
    let Some(first) = kraus.first() else {
        return f64::INFINITY;
    };
    let d = first.ncols();
    let mut acc = CMatrix::zeros(d, d);
    for a in kraus {
        acc += a.adjoint() * a;
    }
    max_abs_diff(&acc, &identity(d))
}

/// Hilbert-space dimension 2^n.
pub fn dim_of(n_qubits: usize) -> usize {
    1usize << n_qubits
}

/// log2 of a power-of-two dimension.
pub fn qubits_of(dim: usize) -> Option<usize> {
    dim.is_power_of_two().then(|| dim.trailing_zeros() as usize)
}
