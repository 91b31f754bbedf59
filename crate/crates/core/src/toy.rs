//! The layered toy model: every layer is a Haar-random unitary followed by
//! the noise channel. Monte-Carlo simulation plus the closed-form average
//! purity, overlap and gradient-variance predictors.

use std::f64::consts::TAU;

use rand::Rng;
use rayon::prelude::*;

use crate::channels::Channel;
use crate::error::{Error, Result};
use crate::haar;
use crate::linalg::{self, dim_of, CMatrix};
use crate::pauli::PauliIndex;
use crate::rng::{stream_rng, Rng as StreamRng};
use crate::state::{self, DensityMatrix};
use crate::stats;
use crate::tol;

#[derive(Debug, Clone)]
pub struct ToyModelConfig {
    pub channel: Channel,
    pub initial_state: DensityMatrix,
    pub layers: usize,
    pub samples: usize,
    pub seed: u64,
}

impl ToyModelConfig {
    pub fn new(
        channel: Channel,
        initial_state: DensityMatrix,
        layers: usize,
        samples: usize,
        seed: u64,
    ) -> Result<Self> {
        if channel.n_qubits() != initial_state.n_qubits() {
            return Err(Error::DimensionMismatch {
                expected: channel.n_qubits(),
                found: initial_state.n_qubits(),
            });
        }
        if samples == 0 {
            return Err(Error::InvalidArgument("samples must be at least 1".into()));
        }
        Ok(ToyModelConfig {
            channel,
            initial_state,
            layers,
            samples,
            seed,
        })
    }

    pub fn n_qubits(&self) -> usize {
        self.channel.n_qubits()
    }
}

/// Per-sample purity after each layer; `rows[k][ℓ]` is Tr(ρ_ℓ²) of sample
/// `k`, with ℓ = 0 the input state.
#[derive(Debug, Clone, PartialEq)]
pub struct PurityTrace {
    pub rows: Vec<Vec<f64>>,
}

impl PurityTrace {
    pub fn layers(&self) -> usize {
        self.rows.first().map_or(0, |r| r.len() - 1)
    }

    pub fn samples(&self) -> usize {
        self.rows.len()
    }

    /// Values of all samples at layer `ell`.
    pub fn column(&self, ell: usize) -> Vec<f64> {
        self.rows.iter().map(|r| r[ell]).collect()
    }

    pub fn summary(&self, ell: usize) -> stats::Summary {
        stats::summarize(&self.column(ell))
    }

    /// Restriction to the first `samples` rows.
    pub fn head(&self, samples: usize) -> PurityTrace {
        PurityTrace {
            rows: self.rows[..samples.min(self.rows.len())].to_vec(),
        }
    }
}

/// One sample: `layers` times (Haar unitary, then channel). Returns the
/// purity trace and the final state.
pub fn simulate_instance<R: Rng + ?Sized>(
    channel: &Channel,
    rho_in: &DensityMatrix,
    layers: usize,
    rng: &mut R,
) -> Result<(Vec<f64>, DensityMatrix)> {
    let n = channel.n_qubits();
    let mut rho = rho_in.clone();
    let mut trace = Vec::with_capacity(layers + 1);
    trace.push(state::purity(&rho));
    for _ in 0..layers {
        let u = haar::haar_unitary(n, rng);
        rho = channel.apply(&rho.conjugate(&u)?)?;
        trace.push(state::purity(&rho));
    }
    Ok((trace, rho))
}

/// All samples of `cfg`, sample `k` drawing from stream `k` of the seed.
pub fn simulate(cfg: &ToyModelConfig) -> Result<PurityTrace> {
    let rows = (0..cfg.samples)
        .into_par_iter()
        .map(|k| {
            let mut rng = stream_rng(cfg.seed, k as u64);
            simulate_instance(&cfg.channel, &cfg.initial_state, cfg.layers, &mut rng).map(|(t, _)| t)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(PurityTrace { rows })
}

/// Constant gained per layer by the average overlap:
/// 2^n (2^n η − ν)/(4^n − 1).
pub fn overlap_offset(channel: &Channel) -> f64 {
    let c = channel.noise_coefficients();
    let d = dim_of(channel.n_qubits()) as f64;
    d * (d * c.eta - c.nu) / (d * d - 1.0)
}

/// E Tr[ρ_i(L) ρ_j(L)] for two inputs pushed through the same L Haar layers:
/// r^L Tr(ρ_i ρ_j) + (1 − r^L)/(1 − r) · 2^n(2^nη − ν)/(4^n − 1).
pub fn exact_avg_overlap(
    channel: &Channel,
    rho_i: &DensityMatrix,
    rho_j: &DensityMatrix,
    layers: usize,
) -> Result<f64> {
    if rho_i.n_qubits() != channel.n_qubits() {
        return Err(Error::DimensionMismatch {
            expected: channel.n_qubits(),
            found: rho_i.n_qubits(),
        });
    }
    let tr = state::overlap(rho_i, rho_j)?;
    Ok(overlap_from_initial(channel, tr, layers))
}

/// [`exact_avg_overlap`] from the initial overlap value alone.
pub fn overlap_from_initial(channel: &Channel, initial: f64, layers: usize) -> f64 {
    let r = channel.noise_coefficients().r;
    let c = overlap_offset(channel);
    let rl = r.powi(layers as i32);
    let geometric = if (1.0 - r).abs() < 1e-14 {
        layers as f64
    } else {
        (1.0 - rl) / (1.0 - r)
    };
    rl * initial + geometric * c
}

/// Average purity after L layers (the overlap formula with ρ_i = ρ_j).
pub fn exact_avg_purity(channel: &Channel, rho_in: &DensityMatrix, layers: usize) -> Result<f64> {
    exact_avg_overlap(channel, rho_in, rho_in, layers)
}

/// Limit of the average purity for L → ∞ (requires r < 1).
pub fn asymptotic_purity(channel: &Channel) -> f64 {
    overlap_offset(channel) / (1.0 - channel.noise_coefficients().r)
}

/// (1 − 2 p_eff)^L Tr ρ², the high-purity approximation.
pub fn approx_avg_purity(channel: &Channel, rho_in: &DensityMatrix, layers: usize) -> f64 {
    let p = channel.noise_coefficients().p_eff;
    (1.0 - 2.0 * p).powi(layers as i32) * state::purity(rho_in)
}

fn check_observable(o: &CMatrix, n_qubits: usize) -> Result<()> {
    let dim = dim_of(n_qubits);
    if o.nrows() != dim || o.ncols() != dim {
        return Err(Error::DimensionMismatch {
            expected: dim,
            found: o.nrows(),
        });
    }
    let defect = linalg::hermiticity_defect(o);
    if defect > tol::HERMITIAN {
        return Err(Error::NotHermitian { deviation: defect });
    }
    let tr = linalg::trace(o).norm();
    if tr > tol::TRACELESS * o.norm().max(1.0) {
        return Err(Error::NotTraceless { trace_abs: tr });
    }
    Ok(())
}

/// ⟨⟨O|N̂ Π N̂ᵀ|O⟩⟩ = Tr(N†(O)²) − Tr(N†(O))²/2^n: the traceless part of the
/// Heisenberg-evolved observable. The second term vanishes for unital noise.
pub fn projected_heisenberg_norm(channel: &Channel, o: &CMatrix) -> Result<f64> {
    let h = channel.apply_adjoint(o)?;
    let full: f64 = h.iter().map(|z| z.norm_sqr()).sum();
    let tr = linalg::trace(&h).re;
    Ok(full - tr * tr / dim_of(channel.n_qubits()) as f64)
}

/// Var(∂C/∂θ_ℓ) = G · r^{L−ℓ}/(4^n − 1) · ⟨⟨O|N̂ Π N̂ᵀ|O⟩⟩ for an observable
/// measured after L layers and a parameter in layer ℓ.
pub fn variance_predictor(channel: &Channel, o: &CMatrix, layers: usize, ell: usize, g: f64) -> Result<f64> {
    if ell == 0 || ell > layers {
        return Err(Error::InvalidArgument(format!(
            "need 1 <= ell <= L, got ell={ell}, L={layers}"
        )));
    }
    let n = channel.n_qubits();
    check_observable(o, n)?;
    let r = channel.noise_coefficients().r;
    let d2 = (dim_of(n) * dim_of(n)) as f64;
    Ok(g * r.powi((layers - ell) as i32) / (d2 - 1.0) * projected_heisenberg_norm(channel, o)?)
}

/// β_1, …, β_count with β_1 = (Tr ρ_in² − 1/2^n)/(4^n − 1) and
/// β_j = (η − 1/2^n)/(4^n − 1) + r β_{j−1}.
pub fn beta_sequence(channel: &Channel, input_purity: f64, count: usize) -> Vec<f64> {
    let c = channel.noise_coefficients();
    let d = dim_of(channel.n_qubits()) as f64;
    let mut beta = Vec::with_capacity(count);
    let mut b = (input_purity - 1.0 / d) / (d * d - 1.0);
    for _ in 0..count {
        beta.push(b);
        b = (c.eta - 1.0 / d) / (d * d - 1.0) + c.r * b;
    }
    beta
}

/// How the unitary U_{ℓ−} in front of the differentiated gate is drawn.
/// The gate generator seen by the input is V⁻ = U_{ℓ−}† V U_{ℓ−}.
#[derive(Debug, Clone)]
pub enum SubLayerFamily {
    /// No preceding sub-layer: V⁻ = V.
    None,
    /// Haar-random U_{ℓ−}.
    Haar,
    /// Product e^{−iθ_m H_m} ⋯ e^{−iθ_1 H_1} with θ_j uniform in [0, 2π).
    Rotations(Vec<CMatrix>),
}

impl SubLayerFamily {
    fn sample<R: Rng + ?Sized>(&self, dim: usize, rng: &mut R) -> Option<CMatrix> {
        match self {
            SubLayerFamily::None => None,
            SubLayerFamily::Haar => Some(haar::haar_unitary_dim(dim, rng)),
            SubLayerFamily::Rotations(gens) => {
                let mut u = CMatrix::identity(dim, dim);
                for h in gens {
                    let theta = rng.random_range(0.0..TAU);
                    u = unitary_exp(h, theta) * u;
                }
                Some(u)
            }
        }
    }
}

/// e^{−iθH} for Hermitian H.
pub fn unitary_exp(h: &CMatrix, theta: f64) -> CMatrix {
    let (vals, vecs) = linalg::eigh(h);
    let mut scaled = vecs.clone();
    for (j, &v) in vals.iter().enumerate() {
        let phase = num_complex::Complex64::from_polar(1.0, -theta * v);
        for i in 0..scaled.nrows() {
            scaled[(i, j)] *= phase;
        }
    }
    scaled * vecs.adjoint()
}

/// ‖[A, B]‖_F².
fn commutator_norm_sq(a: &CMatrix, b: &CMatrix) -> f64 {
    (a * b - b * a).norm_squared()
}

/// Coefficients of the gradient-variance formula.
///
/// `eta_minus_avg` is ⟨Tr[V̂⁻ N̂|P̄₀⟩⟩⟨⟨P̄₀|N̂ᵀ V̂⁻ Π]⟩ and `nu_minus_avg` is
/// ⟨Tr[V̂⁻ N̂ Π N̂ᵀ V̂⁻ Π]⟩, where V̂⁻ is the commutator superoperator of V⁻.
/// With the projector between the two N̂ factors these are exactly the
/// terms produced by the β recursion, so G = ⟨η⁻⟩/2^n + ⟨ν⁻⟩ β_{ℓ−1} holds
/// for non-unital noise too. For ℓ = 1 there is no preceding noise layer
/// and G = ⟨‖[V⁻, ρ_in]‖_F²⟩.
#[derive(Debug, Clone, PartialEq)]
pub struct VarianceCoefficients {
    pub ell: usize,
    /// α_1 … α_{ℓ−1}, all 1/2^n.
    pub alpha: Vec<f64>,
    /// β_1 … β_{ℓ−1} (β_1 is also stored for ℓ = 1).
    pub beta: Vec<f64>,
    pub eta_minus_avg: f64,
    pub eta_minus_std_error: f64,
    pub nu_minus_avg: f64,
    pub nu_minus_std_error: f64,
    pub g: f64,
    pub g_std_error: f64,
}

fn check_generator(v: &CMatrix, n_qubits: usize) -> Result<()> {
    check_observable(v, n_qubits)
}

/// Monte-Carlo estimate of ⟨η⁻⟩, ⟨ν⁻⟩ and G for parameter layer `ell`.
pub fn estimate_g_coefficients<R: Rng + ?Sized>(
    channel: &Channel,
    v: &CMatrix,
    family: &SubLayerFamily,
    rho_in: &DensityMatrix,
    ell: usize,
    samples: usize,
    rng: &mut R,
) -> Result<VarianceCoefficients> {
    let n = channel.n_qubits();
    if n > tol::MAX_PTM_QUBITS {
        return Err(Error::TooManyQubits {
            what: "variance coefficients",
            n,
            max: tol::MAX_PTM_QUBITS,
        });
    }
    check_generator(v, n)?;
    if ell == 0 || samples == 0 {
        return Err(Error::InvalidArgument("need ell >= 1 and samples >= 1".into()));
    }
    let dim = dim_of(n);
    let norm = (dim as f64).sqrt().recip();
    // N(P̄_r) for every Pauli label; index 0 gives the η term.
    let images: Vec<CMatrix> = PauliIndex::all(n)
        .map(|r| channel.apply_operator(&crate::pauli::pauli_op(r).scale(norm)))
        .collect::<Result<_>>()?;

    let mut eta_s = Vec::with_capacity(samples);
    let mut nu_s = Vec::with_capacity(samples);
    let mut g1_s = Vec::with_capacity(samples);
    for _ in 0..samples {
        let vm = match family.sample(dim, rng) {
            Some(u) => u.adjoint() * v * &u,
            None => v.clone(),
        };
        eta_s.push(commutator_norm_sq(&vm, &images[0]));
        nu_s.push(images[1..].iter().map(|m| commutator_norm_sq(&vm, m)).sum());
        g1_s.push(commutator_norm_sq(&vm, rho_in.matrix()));
    }
    let input_purity = state::purity(rho_in);
    let beta = beta_sequence(channel, input_purity, ell.saturating_sub(1).max(1));
    let eta = stats::summarize(&eta_s);
    let nu = stats::summarize(&nu_s);
    let (g, g_se) = if ell == 1 {
        let s = stats::summarize(&g1_s);
        (s.mean, s.std_error)
    } else {
        let b = beta[ell - 2];
        let combined: Vec<f64> = eta_s.iter().zip(&nu_s).map(|(e, v)| e / dim as f64 + v * b).collect();
        let s = stats::summarize(&combined);
        (s.mean, s.std_error)
    };
    Ok(VarianceCoefficients {
        ell,
        alpha: vec![1.0 / dim as f64; ell - 1],
        beta,
        eta_minus_avg: eta.mean,
        eta_minus_std_error: eta.std_error,
        nu_minus_avg: nu.mean,
        nu_minus_std_error: nu.std_error,
        g,
        g_std_error: g_se,
    })
}

/// ‖V̂‖_F² = Σ_r ‖[V, P̄_r]‖_F² = 2^{n+1} Tr V² for traceless V.
pub fn commutator_superoperator_norm_sq(v: &CMatrix) -> f64 {
    let dim = v.nrows() as f64;
    2.0 * dim * linalg::trace(&(v * v)).re
}

/// G for a Haar-random sub-layer, in closed form: with s = ‖V̂‖_F²,
/// ⟨η⁻⟩ = s(2^nη − 1)/(4^n − 1), ⟨ν⁻⟩ = s r, and G_1 = s β_1.
pub fn haar_g_coefficient(channel: &Channel, v: &CMatrix, input_purity: f64, ell: usize) -> Result<f64> {
    let n = channel.n_qubits();
    check_generator(v, n)?;
    if ell == 0 {
        return Err(Error::InvalidArgument("ell must be at least 1".into()));
    }
    let s = commutator_superoperator_norm_sq(v);
    let c = channel.noise_coefficients();
    let d = dim_of(n) as f64;
    let beta = beta_sequence(channel, input_purity, ell);
    if ell == 1 {
        return Ok(s * beta[0]);
    }
    let eta_minus = s * (d * c.eta - 1.0) / (d * d - 1.0);
    let nu_minus = s * c.r;
    Ok(eta_minus / d + nu_minus * beta[ell - 2])
}

/// Outcome of [`variance_mc_check`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VarianceCheck {
    pub layers: usize,
    pub mc_variance: f64,
    pub mc_std_error: f64,
    pub predicted: f64,
}

/// Finite-difference step used by the variance harness.
pub const FD_STEP: f64 = 1e-4;

/// Z on qubit 0, the observable used by the variance harness.
pub fn z_on_first_qubit(n_qubits: usize) -> CMatrix {
    let dim = dim_of(n_qubits);
    let half = dim / 2;
    CMatrix::from_fn(dim, dim, |i, j| {
        if i != j {
            linalg::ZERO
        } else if i < half {
            linalg::ONE
        } else {
            -linalg::ONE
        }
    })
}

/// Monte-Carlo check of the gradient-variance formula.
///
/// Layer j is W'_j e^{−iθ_j V} W_j followed by the channel, with W_j, W'_j
/// independent Haar unitaries and θ_j uniform in [0, 2π). The trailing W'
/// keeps every layer exactly Haar-distributed and independent of the
/// sub-layer W in front of the gate, which is what the formula assumes.
/// The input is |0…0⟩ and the observable Z on qubit 0; ∂C/∂θ_ℓ is a central
/// difference with step [`FD_STEP`]. Sample `k` uses stream
/// `stream_offset + k` of `seed`.
pub fn variance_mc_check(
    channel: &Channel,
    v: &CMatrix,
    layers: usize,
    ell: usize,
    samples: usize,
    seed: u64,
    stream_offset: u64,
) -> Result<VarianceCheck> {
    let n = channel.n_qubits();
    if n > 3 {
        return Err(Error::TooManyQubits {
            what: "variance harness",
            n,
            max: 3,
        });
    }
    check_generator(v, n)?;
    if ell == 0 || ell > layers || samples < 4 {
        return Err(Error::InvalidArgument(format!(
            "need 1 <= ell <= L and samples >= 4 (ell={ell}, L={layers}, samples={samples})"
        )));
    }
    let dim = dim_of(n);
    let rho_in = DensityMatrix::basis_state(n, 0)?;
    let o = z_on_first_qubit(n);
    let derivs = (0..samples)
        .into_par_iter()
        .map(|k| {
            let mut rng = stream_rng(seed, stream_offset + k as u64);
            variance_sample(channel, v, &rho_in, &o, dim, layers, ell, &mut rng)
        })
        .collect::<Result<Vec<f64>>>()?;
    let g = haar_g_coefficient(channel, v, state::purity(&rho_in), ell)?;
    Ok(VarianceCheck {
        layers,
        mc_variance: stats::variance(&derivs),
        mc_std_error: stats::variance_std_error(&derivs),
        predicted: variance_predictor(channel, &o, layers, ell, g)?,
    })
}

#[allow(clippy::too_many_arguments)]
fn variance_sample(
    channel: &Channel,
    v: &CMatrix,
    rho_in: &DensityMatrix,
    o: &CMatrix,
    dim: usize,
    layers: usize,
    ell: usize,
    rng: &mut StreamRng,
) -> Result<f64> {
    let mut rho = rho_in.matrix().clone();
    let mut branches: Option<[CMatrix; 2]> = None;
    for j in 1..=layers {
        let w = haar::haar_unitary_dim(dim, rng);
        let w2 = haar::haar_unitary_dim(dim, rng);
        let theta = rng.random_range(0.0..TAU);
        let step = |m: &CMatrix, t: f64| -> Result<CMatrix> {
            let u = &w2 * unitary_exp(v, t) * &w;
            channel.apply_operator(&(&u * m * u.adjoint()))
        };
        if j < ell {
            rho = step(&rho, theta)?;
        } else if j == ell {
            branches = Some([step(&rho, theta + FD_STEP)?, step(&rho, theta - FD_STEP)?]);
        } else if let Some([plus, minus]) = branches.as_mut() {
            *plus = step(plus, theta)?;
            *minus = step(minus, theta)?;
        }
    }
    let [plus, minus] = branches.expect("ell <= layers");
    let c_plus = state::trace_product(o, &plus).re;
    let c_minus = state::trace_product(o, &minus).re;
    Ok((c_plus - c_minus) / (2.0 * FD_STEP))
}

/// ln λ_max − ln λ_min of N̂ᵀN̂, the range of the per-layer log purity ratio.
pub fn hoeffding_range(channel: &Channel) -> Result<f64> {
    let (lo, hi) = channel.gram_extremes();
    if lo <= 0.0 {
        return Err(Error::SingularChannel { lambda_min: lo });
    }
    Ok(hi.ln() - lo.ln())
}

/// c = √(½ ln(2/P_max)) · R_ln.
pub fn hoeffding_constant(channel: &Channel, p_max: f64) -> Result<f64> {
    if !(p_max > 0.0 && p_max < 2.0) {
        return Err(Error::OutOfRange {
            name: "P_max",
            value: p_max,
            range: "(0,2)".into(),
        });
    }
    Ok((0.5 * (2.0 / p_max).ln()).sqrt() * hoeffding_range(channel)?)
}

/// Single-instance purity band around the approximate average purity,
/// approx(ℓ)·exp(±c√ℓ) for ℓ = 0…L; each layer's purity falls outside with
/// probability at most P_max.
pub fn hoeffding_band(channel: &Channel, rho_in: &DensityMatrix, layers: usize, p_max: f64) -> Result<Vec<(f64, f64)>> {
    let c = hoeffding_constant(channel, p_max)?;
    Ok((0..=layers)
        .map(|ell| {
            let mid = approx_avg_purity(channel, rho_in, ell);
            let w = c * (ell as f64).sqrt();
            (mid * (-w).exp(), mid * w.exp())
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channels::{amplitude_damping, depolarizing, tensor_power};
    use crate::pauli;

    #[test]
    fn zero_layers() {
        let ch = amplitude_damping(0.2).unwrap();
        let rho = DensityMatrix::basis_state(1, 1).unwrap();
        let mut rng = stream_rng(0, 0);
        let (t, _) = simulate_instance(&ch, &rho, 0, &mut rng).unwrap();
        assert_eq!(t, vec![1.0]);
        assert_eq!(exact_avg_purity(&ch, &rho, 0).unwrap(), 1.0);
        assert_eq!(approx_avg_purity(&ch, &rho, 0), 1.0);
    }

    #[test]
    fn identity_channel_keeps_purity() {
        let ch = Channel::identity(2);
        let mut rng = stream_rng(1, 0);
        let rho = haar::random_mixed_state(2, 2, &mut rng).unwrap();
        let p0 = state::purity(&rho);
        let (t, _) = simulate_instance(&ch, &rho, 5, &mut rng).unwrap();
        assert!(t.iter().all(|p| (p - p0).abs() < 1e-12));
        for l in 0..5 {
            assert!((exact_avg_purity(&ch, &rho, l).unwrap() - p0).abs() < 1e-14);
        }
    }

    #[test]
    fn twirled_overlap_for_depolarizing() {
        let p = 0.1;
        let ch = depolarizing(p, 2).unwrap();
        let rho = DensityMatrix::basis_state(2, 0).unwrap();
        let expected = (1.0 - p) * (1.0 - p) + (2.0 * p * (1.0 - p) + p * p) / 4.0;
        assert!((exact_avg_purity(&ch, &rho, 1).unwrap() - expected).abs() < 1e-14);
    }

    #[test]
    fn approx_single_layer() {
        // p_eff = 0.012 and a pure input give 0.976 after one layer.
        let ch = depolarizing(0.012, 2).unwrap();
        let rho = DensityMatrix::basis_state(2, 0).unwrap();
        assert!((approx_avg_purity(&ch, &rho, 1) - 0.976).abs() < 1e-12);
    }

    #[test]
    fn beta_fixed_point_for_identity() {
        let b = beta_sequence(&Channel::identity(2), 1.0, 5);
        assert!(b.iter().all(|x| (x - b[0]).abs() < 1e-16));
    }

    #[test]
    fn predictor_identity_channel() {
        let n = 2;
        let ch = Channel::identity(n);
        let o = pauli::pauli_op(PauliIndex::from_label("ZI").unwrap()).scale(0.5);
        for (l, ell) in [(1, 1), (5, 2), (7, 7)] {
            let v = variance_predictor(&ch, &o, l, ell, 1.0).unwrap();
            assert!((v - 1.0 / 15.0).abs() < 1e-15);
        }
    }

    #[test]
    fn predictor_rejects_traced_observable() {
        let ch = Channel::identity(1);
        assert!(matches!(
            variance_predictor(&ch, &CMatrix::identity(2, 2), 1, 1, 1.0),
            Err(Error::NotTraceless { .. })
        ));
    }

    #[test]
    fn identity_nu_minus_for_rotated_z() {
        let z = pauli::pauli_op(PauliIndex::from_label("Z").unwrap()).unscale(2f64.sqrt());
        let rho = DensityMatrix::basis_state(1, 0).unwrap();
        let family = SubLayerFamily::Rotations(vec![z.clone()]);
        let mut rng = stream_rng(5, 0);
        let c = estimate_g_coefficients(&Channel::identity(1), &z, &family, &rho, 2, 50, &mut rng).unwrap();
        assert!((c.nu_minus_avg - 4.0).abs() < 1e-12);
        assert!(c.eta_minus_avg.abs() < 1e-12);
    }

    #[test]
    fn haar_closed_form_matches_sampling() {
        let ch = tensor_power(&amplitude_damping(0.3).unwrap(), 2).unwrap();
        let v = pauli::pauli_op(PauliIndex::from_label("XY").unwrap()).scale(0.5);
        let rho = DensityMatrix::basis_state(2, 0).unwrap();
        let mut rng = stream_rng(6, 0);
        for ell in [1, 3] {
            let est = estimate_g_coefficients(&ch, &v, &SubLayerFamily::Haar, &rho, ell, 4000, &mut rng).unwrap();
            let exact = haar_g_coefficient(&ch, &v, 1.0, ell).unwrap();
            assert!(
                (est.g - exact).abs() < 5.0 * est.g_std_error,
                "ell={ell}: {} vs {exact}",
                est.g
            );
        }
    }

    #[test]
    fn hoeffding_identity_has_zero_width() {
        let ch = Channel::identity(1);
        let rho = DensityMatrix::basis_state(1, 0).unwrap();
        let band = hoeffding_band(&ch, &rho, 3, 0.01).unwrap();
        assert!(band.iter().all(|(lo, hi)| lo == hi));
    }

    #[test]
    fn hoeffding_singular_channel() {
        let ch = amplitude_damping(1.0).unwrap();
        let rho = DensityMatrix::basis_state(1, 0).unwrap();
        assert!(matches!(
            hoeffding_band(&ch, &rho, 3, 0.01),
            Err(Error::SingularChannel { .. })
        ));
    }

    #[test]
    fn simulate_is_deterministic() {
        let ch = tensor_power(&amplitude_damping(0.05).unwrap(), 2).unwrap();
        let cfg = ToyModelConfig::new(ch, DensityMatrix::basis_state(2, 0).unwrap(), 4, 6, 9).unwrap();
        assert_eq!(simulate(&cfg).unwrap(), simulate(&cfg).unwrap());
    }
}
