//! Numerical tolerances and size caps shared by the whole library.

/// Max entrywise |ρ − ρ†| accepted for a density matrix.
pub const HERMITIAN: f64 = 1e-10;
/// Max |Tr ρ − 1| accepted for a density matrix.
pub const TRACE: f64 = 1e-10;
/// Smallest eigenvalue accepted for a density matrix.
pub const PSD: f64 = -1e-9;
/// Eigenvalue drift clipped to [0, 1] before entropies and fidelities.
pub const EIGEN_CLIP: f64 = 1e-9;
/// Max deviation of Σ A†A from the identity for a Kraus set.
pub const KRAUS_COMPLETENESS: f64 = 1e-10;
/// Imaginary residue allowed in a PTM entry before it is discarded.
pub const PTM_IMAG: f64 = 1e-12;
/// Max |Tr L| for a Lindblad jump operator.
pub const TRACELESS: f64 = 1e-10;
/// Agreement required between stored and recomputed PTMs.
pub const PTM_MATCH: f64 = 1e-9;

/// Largest register for which a channel PTM may be held as a dense matrix.
/// Tensor-product and depolarizing channels stay structured beyond this.
pub const MAX_DENSE_PTM_QUBITS: usize = 6;
/// Largest register for vectorized (length 4^n) operators.
pub const MAX_PTM_QUBITS: usize = 8;
/// Largest register for density-matrix simulation.
pub const MAX_STATE_QUBITS: usize = 14;
