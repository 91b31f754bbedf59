//! CPTP noise channels and the scalar noise coefficients that enter the
//! purity and gradient-variance predictors.
//!
//! A channel keeps its PTM in structured form: a dense block on a few
//! qubits, a tensor product of such blocks, or a global depolarizing map. A
//! dense PTM of an n-qubit product is 4^n × 4^n and would not fit in memory
//! at the register sizes used for QAOA, while everything the analysis needs
//! (trace, Frobenius norm, first column, spectrum of N̂ᵀN̂) factorizes.

use std::fmt;
use std::sync::OnceLock;

use num_complex::Complex64;
use rand::Rng;

use crate::error::{Error, Result};
use crate::haar;
use crate::linalg::{self, dim_of, Block, CMatrix, RMatrix, ONE, ZERO};
use crate::pauli::{self, PauliIndex};
use crate::ptm::{self, Ptm};
use crate::state::{self, DensityMatrix};
use crate::tol;

/// Scalar descriptors of a channel N on n qubits:
/// ν = Tr(N̂N̂ᵀ)/4^n, η = Tr[N(I/2^n)²], r = (4^nν − 2^nη)/(4^n − 1) and
/// p_eff = 1 − (Tr N̂ − 1)/(4^n − 1).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseCoefficients {
    pub nu: f64,
    pub eta: f64,
    pub r: f64,
    pub p_eff: f64,
}

/// Factorizable PTM invariants: Tr N̂, ‖N̂‖_F², ‖N̂ e₀‖².
#[derive(Debug, Clone, Copy)]
struct Invariants {
    trace: f64,
    frobenius_sq: f64,
    first_column_sq: f64,
    gram_min: f64,
    gram_max: f64,
}

impl Invariants {
    fn product(self, other: Invariants) -> Invariants {
        Invariants {
            trace: self.trace * other.trace,
            frobenius_sq: self.frobenius_sq * other.frobenius_sq,
            first_column_sq: self.first_column_sq * other.first_column_sq,
            gram_min: self.gram_min * other.gram_min,
            gram_max: self.gram_max * other.gram_max,
        }
    }
}

#[derive(Debug, Clone)]
enum Kind {
    /// Dense PTM on the whole (small) register, with optional Kraus form.
    Dense { ptm: Ptm, kraus: OnceLock<Vec<CMatrix>> },
    /// ρ ↦ (1 − p)ρ + p Tr(ρ) I/2^n.
    Depolarizing { p: f64 },
    /// Tensor product, first factor on the leading qubits. Never nested.
    Product(Vec<Channel>),
}

/// An immutable CPTP map on `n_qubits` qubits.
#[derive(Debug, Clone)]
pub struct Channel {
    n_qubits: usize,
    label: String,
    kind: Kind,
    invariants: Invariants,
}

impl fmt::Display for Channel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label)
    }
}

fn dense_invariants(ptm: &Ptm) -> Invariants {
    let m = ptm.matrix();
    let gram = m.transpose() * m;
    let ev = linalg::eigvalsh_real(&gram);
    Invariants {
        trace: m.trace(),
        frobenius_sq: m.norm_squared(),
        first_column_sq: m.column(0).norm_squared(),
        gram_min: ev[0].max(0.0),
        gram_max: ev[ev.len() - 1],
    }
}

fn depolarizing_invariants(p: f64, n_qubits: usize) -> Invariants {
    let nontrivial = (PauliIndex::count(n_qubits) - 1) as f64;
    let s = (1.0 - p) * (1.0 - p);
    Invariants {
        trace: 1.0 + nontrivial * (1.0 - p),
        frobenius_sq: 1.0 + nontrivial * s,
        first_column_sq: 1.0,
        gram_min: s.min(1.0),
        gram_max: s.max(1.0),
    }
}

impl Channel {
    fn dense(ptm: Ptm, kraus: Option<Vec<CMatrix>>, label: String) -> Channel {
        let invariants = dense_invariants(&ptm);
        let cell = OnceLock::new();
        if let Some(k) = kraus {
            let _ = cell.set(k);
        }
        Channel {
            n_qubits: ptm.n_qubits(),
            label,
            kind: Kind::Dense { ptm, kraus: cell },
            invariants,
        }
    }

    /// Identity channel.
    pub fn identity(n_qubits: usize) -> Channel {
        Channel {
            n_qubits,
            label: "id".into(),
            kind: Kind::Depolarizing { p: 0.0 },
            invariants: depolarizing_invariants(0.0, n_qubits),
        }
    }

    /// Channel from a trace-preserving Kraus set on a small register.
    pub fn from_kraus(kraus: Vec<CMatrix>, n_qubits: usize, label: impl Into<String>) -> Result<Channel> {
        let ptm = ptm::ptm_from_kraus(&kraus, n_qubits)?;
        Ok(Channel::dense(ptm, Some(kraus), label.into()))
    }

    /// Channel from a PTM. The first row must be (1, 0, …, 0) and the map
    /// must be completely positive; a Kraus form is derived on demand.
    pub fn from_ptm(ptm: Ptm, label: impl Into<String>) -> Result<Channel> {
        let defect = ptm.trace_preservation_defect();
        if defect > tol::PTM_MATCH {
            return Err(Error::NotTracePreserving { deviation: defect });
        }
        let ch = Channel::dense(ptm, None, label.into());
        ch.local_kraus()?;
        Ok(ch)
    }

    /// ρ ↦ UρU†.
    pub fn unitary(u: CMatrix, n_qubits: usize, label: impl Into<String>) -> Result<Channel> {
        Channel::from_kraus(vec![u], n_qubits, label)
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn noise_coefficients(&self) -> NoiseCoefficients {
        let inv = &self.invariants;
        let d = dim_of(self.n_qubits) as f64;
        let d2 = d * d;
        let nu = inv.frobenius_sq / d2;
        let eta = inv.first_column_sq / d;
        NoiseCoefficients {
            nu,
            eta,
            r: (d2 * nu - d * eta) / (d2 - 1.0),
            p_eff: 1.0 - (inv.trace - 1.0) / (d2 - 1.0),
        }
    }

    /// Tr N̂.
    pub fn ptm_trace(&self) -> f64 {
        self.invariants.trace
    }

    /// Smallest and largest eigenvalue of N̂ᵀN̂.
    pub fn gram_extremes(&self) -> (f64, f64) {
        (self.invariants.gram_min, self.invariants.gram_max)
    }

    /// `Some(p)` if this is a global depolarizing channel.
    pub fn depolarizing_strength(&self) -> Option<f64> {
        match self.kind {
            Kind::Depolarizing { p } => Some(p),
            _ => None,
        }
    }

    /// Dense PTM; only available up to [`tol::MAX_DENSE_PTM_QUBITS`].
    pub fn ptm(&self) -> Result<Ptm> {
        match &self.kind {
            Kind::Dense { ptm, .. } => Ok(ptm.clone()),
            Kind::Depolarizing { p } => {
                let count = PauliIndex::count(self.n_qubits);
                if self.n_qubits > tol::MAX_DENSE_PTM_QUBITS {
                    return Err(Error::TooManyQubits {
                        what: "dense PTM",
                        n: self.n_qubits,
                        max: tol::MAX_DENSE_PTM_QUBITS,
                    });
                }
                let mut m = RMatrix::identity(count, count).scale(1.0 - p);
                m[(0, 0)] = 1.0;
                Ptm::new(self.n_qubits, m)
            }
            Kind::Product(factors) => {
                if self.n_qubits > tol::MAX_DENSE_PTM_QUBITS {
                    return Err(Error::TooManyQubits {
                        what: "dense PTM",
                        n: self.n_qubits,
                        max: tol::MAX_DENSE_PTM_QUBITS,
                    });
                }
                let mut acc = Ptm::identity(0);
                for f in factors {
                    acc = acc.tensor(&f.ptm()?)?;
                }
                Ok(acc)
            }
        }
    }

    /// Kraus operators of a single dense or depolarizing block.
    fn local_kraus(&self) -> Result<&[CMatrix]> {
        match &self.kind {
            Kind::Dense { ptm, kraus } => {
                if let Some(k) = kraus.get() {
                    return Ok(k);
                }
                let derived = ptm.to_kraus()?;
                Ok(kraus.get_or_init(|| derived))
            }
            _ => Err(Error::InvalidArgument("not a dense channel block".into())),
        }
    }

    /// Full-register Kraus operators (outer product over tensor factors;
    /// Pauli decomposition for depolarizing blocks). Exponential in size,
    /// intended for small registers and tests.
    pub fn kraus(&self) -> Result<Vec<CMatrix>> {
        if self.n_qubits > tol::MAX_DENSE_PTM_QUBITS {
            return Err(Error::TooManyQubits {
                what: "Kraus expansion",
                n: self.n_qubits,
                max: tol::MAX_DENSE_PTM_QUBITS,
            });
        }
        match &self.kind {
            Kind::Dense { .. } => Ok(self.local_kraus()?.to_vec()),
            Kind::Depolarizing { p } => {
                let count = PauliIndex::count(self.n_qubits) as f64;
                let mut out = Vec::new();
                for r in PauliIndex::all(self.n_qubits) {
                    let w = if r.flat() == 0 {
                        1.0 - p * (count - 1.0) / count
                    } else {
                        p / count
                    };
                    if w > 0.0 {
                        out.push(pauli::pauli_op(r).scale(w.sqrt()));
                    }
                }
                Ok(out)
            }
            Kind::Product(factors) => {
                let mut acc = vec![CMatrix::identity(1, 1)];
                for f in factors {
                    let local = f.kraus()?;
                    acc = acc
                        .iter()
                        .flat_map(|a| local.iter().map(move |b| linalg::kron(a, b)))
                        .collect();
                }
                Ok(acc)
            }
        }
    }

    fn factors(&self) -> Vec<&Channel> {
        match &self.kind {
            Kind::Product(fs) => fs.iter().collect(),
            _ => vec![self],
        }
    }

    fn apply_block(&self, m: &CMatrix, block: Block, adjoint: bool) -> Result<CMatrix> {
        match &self.kind {
            Kind::Depolarizing { p } => Ok(if *p == 0.0 {
                m.clone()
            } else {
                linalg::depolarize_local(m, block, *p)
            }),
            Kind::Dense { .. } => {
                let kraus = self.local_kraus()?;
                if adjoint {
                    let adj: Vec<CMatrix> = kraus.iter().map(|a| a.adjoint()).collect();
                    Ok(linalg::kraus_local(m, &adj, block))
                } else {
                    Ok(linalg::kraus_local(m, kraus, block))
                }
            }
            Kind::Product(_) => unreachable!("products are flattened"),
        }
    }

    fn apply_matrix(&self, m: &CMatrix, adjoint: bool) -> Result<CMatrix> {
        let dim = dim_of(self.n_qubits);
        if m.nrows() != dim || m.ncols() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: m.nrows(),
            });
        }
        let mut out = m.clone();
        let mut first = 0;
        for f in self.factors() {
            out = f.apply_block(&out, Block::new(first, f.n_qubits, self.n_qubits), adjoint)?;
            first += f.n_qubits;
        }
        Ok(out)
    }

    /// N(ρ).
    pub fn apply(&self, rho: &DensityMatrix) -> Result<DensityMatrix> {
        DensityMatrix::from_matrix_unchecked(self.apply_matrix(rho.matrix(), false)?)
    }

    /// N applied to an arbitrary operator.
    pub fn apply_operator(&self, a: &CMatrix) -> Result<CMatrix> {
        self.apply_matrix(a, false)
    }

    /// N†(O), the Heisenberg-picture action.
    pub fn apply_adjoint(&self, o: &CMatrix) -> Result<CMatrix> {
        self.apply_matrix(o, true)
    }
}

/// Single-qubit amplitude damping with decay probability γ↓.
pub fn amplitude_damping(gamma_down: f64) -> Result<Channel> {
    if !(0.0..=1.0).contains(&gamma_down) {
        return Err(Error::OutOfRange {
            name: "gamma",
            value: gamma_down,
            range: "[0,1]".into(),
        });
    }
    let keep = Complex64::from((1.0 - gamma_down).sqrt());
    let decay = Complex64::from(gamma_down.sqrt());
    let kraus = vec![
        CMatrix::from_row_slice(2, 2, &[ONE, ZERO, ZERO, keep]),
        CMatrix::from_row_slice(2, 2, &[ZERO, decay, ZERO, ZERO]),
    ];
    let s = (1.0 - gamma_down).sqrt();
    #[rustfmt::skip]
    let m = RMatrix::from_row_slice(4, 4, &[
        1.0,        0.0, 0.0, 0.0,
        0.0,        s,   0.0, 0.0,
        0.0,        0.0, s,   0.0,
        gamma_down, 0.0, 0.0, 1.0 - gamma_down,
    ]);
    Ok(Channel::dense(
        Ptm::new(1, m)?,
        Some(kraus),
        format!("ad({gamma_down})"),
    ))
}

/// Largest admissible depolarizing strength on n qubits, 4^n/(4^n − 1).
/// Values above 1 still give a CPTP map and arise from twirling.
pub fn max_depolarizing_strength(n_qubits: usize) -> f64 {
    let c = PauliIndex::count(n_qubits) as f64;
    c / (c - 1.0)
}

/// Global depolarizing channel ρ ↦ (1 − p)ρ + p I/2^n.
pub fn depolarizing(p_eff: f64, n_qubits: usize) -> Result<Channel> {
    let max = max_depolarizing_strength(n_qubits);
    if !(0.0..=max).contains(&p_eff) || n_qubits == 0 {
        return Err(Error::OutOfRange {
            name: "p",
            value: p_eff,
            range: format!("[0,{max}]"),
        });
    }
    Ok(Channel {
        n_qubits,
        label: format!("depol({p_eff})"),
        kind: Kind::Depolarizing { p: p_eff },
        invariants: depolarizing_invariants(p_eff, n_qubits),
    })
}

/// Single-qubit Pauli channel with probabilities (p_x, p_y, p_z).
pub fn pauli_channel(px: f64, py: f64, pz: f64) -> Result<Channel> {
    let pi = 1.0 - px - py - pz;
    for (name, v) in [("px", px), ("py", py), ("pz", pz), ("1-px-py-pz", pi)] {
        if !(0.0..=1.0).contains(&v) {
            return Err(Error::OutOfRange {
                name: "pauli probability",
                value: v,
                range: format!("[0,1] for {name}"),
            });
        }
    }
    let kraus = PauliIndex::all(1)
        .zip([pi, px, py, pz])
        .map(|(r, w)| pauli::pauli_op(r).scale(w.sqrt()))
        .collect();
    Channel::from_kraus(kraus, 1, format!("pauli({px},{py},{pz})"))
}

fn product_label(factors: &[Channel]) -> String {
    let mut parts: Vec<(String, usize)> = Vec::new();
    for f in factors {
        match parts.last_mut() {
            Some((l, k)) if *l == f.label => *k += 1,
            _ => parts.push((f.label.clone(), 1)),
        }
    }
    parts
        .into_iter()
        .map(|(l, k)| if k == 1 { l } else { format!("{l}^{k}") })
        .collect::<Vec<_>>()
        .join("*")
}

/// Tensor product, first channel on the leading qubits.
pub fn tensor(channels: &[Channel]) -> Result<Channel> {
    let mut factors = Vec::new();
    for ch in channels {
        match &ch.kind {
            Kind::Product(fs) => factors.extend(fs.iter().cloned()),
            _ => factors.push(ch.clone()),
        }
    }
    match factors.len() {
        0 => return Err(Error::InvalidArgument("empty tensor product".into())),
        1 => return Ok(factors.pop().unwrap()),
        _ => {}
    }
    let n_qubits: usize = factors.iter().map(|f| f.n_qubits).sum();
    if n_qubits > tol::MAX_STATE_QUBITS {
        return Err(Error::TooManyQubits {
            what: "channel",
            n: n_qubits,
            max: tol::MAX_STATE_QUBITS,
        });
    }
    let invariants = factors
        .iter()
        .map(|f| f.invariants)
        .reduce(Invariants::product)
        .unwrap();
    Ok(Channel {
        n_qubits,
        label: product_label(&factors),
        kind: Kind::Product(factors),
        invariants,
    })
}

/// `ch` applied independently to each of `copies` registers.
pub fn tensor_power(ch: &Channel, copies: usize) -> Result<Channel> {
    tensor(&vec![ch.clone(); copies])
}

pub fn noise_coefficients(ch: &Channel) -> NoiseCoefficients {
    ch.noise_coefficients()
}

/// Haar twirl ∫ U†N(U · U†)U dU, which is global depolarizing with the
/// channel's p_eff.
pub fn haar_twirl(ch: &Channel) -> Result<Channel> {
    let max = max_depolarizing_strength(ch.n_qubits);
    // Clamp only round-off; anything further out signals a broken channel.
    let p = ch.noise_coefficients().p_eff;
    let p = if p < 0.0 && p > -1e-12 {
        0.0
    } else if p > max && p < max + 1e-12 {
        max
    } else {
        p
    };
    depolarizing(p, ch.n_qubits)
}

/// Traceless jump operators L_k of a Lindblad dissipator
/// D(ρ) = Σ_k L_k ρ L_k† − ½{L_k†L_k, ρ}.
#[derive(Debug, Clone)]
pub struct LindbladSpec {
    n_qubits: usize,
    jump_ops: Vec<CMatrix>,
}

impl LindbladSpec {
    pub fn new(jump_ops: Vec<CMatrix>, n_qubits: usize) -> Result<Self> {
        let dim = dim_of(n_qubits);
        for l in &jump_ops {
            if l.nrows() != dim || l.ncols() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: l.nrows().max(l.ncols()),
                });
            }
            let tr = linalg::trace(l).norm();
            if tr > tol::TRACELESS {
                return Err(Error::NotTraceless { trace_abs: tr });
            }
        }
        Ok(LindbladSpec { n_qubits, jump_ops })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn jump_ops(&self) -> &[CMatrix] {
        &self.jump_ops
    }

    /// Σ_k Tr(L_k†L_k).
    pub fn total_rate(&self) -> f64 {
        self.jump_ops.iter().map(|l| l.norm_squared()).sum()
    }

    /// PTM of the dissipator D.
    pub fn dissipator_ptm(&self) -> Result<Ptm> {
        let ops: Vec<(CMatrix, CMatrix, CMatrix)> = self
            .jump_ops
            .iter()
            .map(|l| (l.clone(), l.adjoint(), l.adjoint() * l))
            .collect();
        ptm::ptm_of_map(self.n_qubits, |a| {
            let mut out = CMatrix::zeros(a.nrows(), a.ncols());
            for (l, ld, ldl) in &ops {
                out += l * a * ld;
                out -= (ldl * a + a * ldl).scale(0.5);
            }
            out
        })
    }
}

/// exp(t·D̂) for a Lindblad dissipator, via scaling-and-squaring Padé.
pub fn lindblad_channel(spec: &LindbladSpec, strength: f64) -> Result<Channel> {
    if !strength.is_finite() || strength < 0.0 {
        return Err(Error::OutOfRange {
            name: "strength",
            value: strength,
            range: "[0,inf)".into(),
        });
    }
    let d = spec.dissipator_ptm()?;
    let expected = -(dim_of(spec.n_qubits) as f64) * spec.total_rate();
    let got = d.matrix().trace();
    if (got - expected).abs() > 1e-9 * expected.abs().max(1.0) {
        return Err(Error::Numerical(format!(
            "dissipator PTM trace {got} disagrees with -2^n Tr(L'L) = {expected}"
        )));
    }
    let m = (d.into_matrix() * strength).exp();
    let ptm = Ptm::new(spec.n_qubits, m)?;
    Channel::from_ptm(ptm, format!("lindblad(t={strength})"))
}

/// Lower bound on the trace-distance contraction coefficient
/// q_N = sup T(Nρ₁, Nρ₂)/T(ρ₁, ρ₂), as the largest ratio over `n_pairs`
/// Haar-random pure-state pairs. The true supremum may be larger.
pub fn contraction_estimate<R: Rng + ?Sized>(ch: &Channel, n_pairs: usize, rng: &mut R) -> Result<f64> {
    if n_pairs == 0 {
        return Err(Error::InvalidArgument("n_pairs must be at least 1".into()));
    }
    let mut best: f64 = 0.0;
    for _ in 0..n_pairs {
        let a = haar::random_pure_state(ch.n_qubits, rng)?;
        let b = haar::random_pure_state(ch.n_qubits, rng)?;
        let before = state::trace_distance(&a, &b)?;
        if before < 1e-8 {
            continue;
        }
        let after = state::trace_distance(&ch.apply(&a)?, &ch.apply(&b)?)?;
        best = best.max(after / before);
    }
    Ok(best)
}

/// exp(−iθσ) for an operator with σ² = I, such as a Pauli string.
pub fn pauli_rotation(sigma: &CMatrix, theta: f64) -> CMatrix {
    let dim = sigma.nrows();
    CMatrix::identity(dim, dim).scale(theta.cos()) - sigma * Complex64::new(0.0, theta.sin())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::stream_rng;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn channels_are_shareable() {
        fn check<T: Send + Sync>() {}
        check::<Channel>();
    }

    #[test]
    fn amplitude_damping_ptm_entries() {
        let ch = amplitude_damping(0.36).unwrap();
        let m = ch.ptm().unwrap().into_matrix();
        assert!(close(m[(1, 1)], 0.8, 1e-15));
        assert!(close(m[(2, 2)], 0.8, 1e-15));
        assert!(close(m[(3, 0)], 0.36, 1e-15));
        assert!(close(m[(3, 3)], 0.64, 1e-15));
        let from_kraus = ptm::ptm_from_kraus(&ch.kraus().unwrap(), 1).unwrap();
        assert!((from_kraus.matrix() - &m).abs().max() < 1e-12);
    }

    #[test]
    fn full_decay_forgets_input() {
        let ch = amplitude_damping(1.0).unwrap();
        assert!(close(ch.noise_coefficients().r, 0.0, 1e-15));
        let out = ch.apply(&DensityMatrix::basis_state(1, 1).unwrap()).unwrap();
        assert!(close(out.matrix()[(0, 0)].re, 1.0, 1e-15));
    }

    #[test]
    fn rejects_out_of_range() {
        assert!(amplitude_damping(1.5).is_err());
        assert!(amplitude_damping(-0.1).is_err());
        assert!(depolarizing(1.5, 1).is_err());
        assert!(depolarizing(4.0 / 3.0, 1).is_ok());
    }

    #[test]
    fn identity_coefficients() {
        let c = Channel::identity(1).noise_coefficients();
        assert_eq!((c.nu, c.eta, c.r, c.p_eff), (1.0, 0.5, 1.0, 0.0));
    }

    #[test]
    fn product_of_damping_on_excited_pair() {
        let g = 0.3;
        let ch = tensor_power(&amplitude_damping(g).unwrap(), 2).unwrap();
        let out = ch.apply(&DensityMatrix::basis_state(2, 3).unwrap()).unwrap();
        assert!(close(out.matrix()[(3, 3)].re, (1.0 - g) * (1.0 - g), 1e-14));
        assert_eq!(ch.label(), "ad(0.3)^2");
    }

    #[test]
    fn depolarizing_closed_form() {
        let p = 0.3;
        let ch = depolarizing(p, 2).unwrap();
        let mut rng = stream_rng(3, 0);
        let rho = haar::random_mixed_state(2, 2, &mut rng).unwrap();
        let out = ch.apply(&rho).unwrap();
        let expected = rho.matrix().scale(1.0 - p) + CMatrix::identity(4, 4).scale(p / 4.0);
        assert!(linalg::max_abs_diff(out.matrix(), &expected) < 1e-14);
        let via_kraus = linalg::kraus_full(rho.matrix(), &ch.kraus().unwrap());
        assert!(linalg::max_abs_diff(&via_kraus, &expected) < 1e-12);
    }

    #[test]
    fn lindblad_decay_matches_amplitude_damping() {
        let lower = CMatrix::from_row_slice(2, 2, &[ZERO, ONE, ZERO, ZERO]);
        let spec = LindbladSpec::new(vec![lower], 1).unwrap();
        for t in [0.0, 0.1, 0.7, 2.0] {
            let ch = lindblad_channel(&spec, t).unwrap();
            let ad = amplitude_damping(1.0 - (-t).exp()).unwrap();
            let diff = (ch.ptm().unwrap().into_matrix() - ad.ptm().unwrap().into_matrix())
                .abs()
                .max();
            assert!(diff < 1e-9, "t = {t}: {diff}");
        }
    }

    #[test]
    fn lindblad_rejects_trace() {
        assert!(matches!(
            LindbladSpec::new(vec![CMatrix::identity(2, 2)], 1),
            Err(Error::NotTraceless { .. })
        ));
    }

    #[test]
    fn twirl_of_identity_is_identity() {
        let t = haar_twirl(&Channel::identity(3)).unwrap();
        assert_eq!(t.depolarizing_strength(), Some(0.0));
    }

    #[test]
    fn unitary_channel_contraction_is_one() {
        let mut rng = stream_rng(4, 0);
        let u = haar::haar_unitary(1, &mut rng);
        let ch = Channel::unitary(u, 1, "u").unwrap();
        let q = contraction_estimate(&ch, 50, &mut rng).unwrap();
        assert!(close(q, 1.0, 1e-9));
    }
}
