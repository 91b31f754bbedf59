//! Noisy QAOA: graphs, diagonal problem Hamiltonians, density-matrix
//! evolution with noise after every layer, and the purity, derivative,
//! twirl-fidelity and Haar-model statistics.
//!
//! Layer ℓ applies e^{−iγ_ℓ H_P}, then e^{−iα_ℓ Σ X_q}, then the channel.
//! Qubit q corresponds to bit n − 1 − q of a basis index and Z_q has
//! eigenvalue +1 where that bit is 0.

use std::collections::BTreeSet;
use std::f64::consts::TAU;
use std::fmt;
use std::path::Path;

use nalgebra::DVector;
use num_complex::Complex64;
use rand::seq::SliceRandom;
use rand::Rng;
use rayon::prelude::*;

use crate::channels::{self, Channel};
use crate::error::{Error, Result};
use crate::linalg::{dim_of, CMatrix, ZERO};
use crate::pauli::{self, PauliIndex};
use crate::rng::stream_rng;
use crate::state::{self, DensityMatrix};
use crate::stats;
use crate::tol;

/// Simple undirected graph on vertices 0…n−1.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    n_vertices: usize,
    edges: Vec<(usize, usize)>,
    label: String,
}

impl Graph {
    /// Validates and normalizes edges to (min, max), sorted.
    pub fn new(n_vertices: usize, edges: Vec<(usize, usize)>, label: impl Into<String>) -> Result<Graph> {
        let mut seen = BTreeSet::new();
        for &(u, v) in &edges {
            if u >= n_vertices || v >= n_vertices {
                return Err(Error::InvalidGraph(format!("edge ({u}, {v}) outside 0..{n_vertices}")));
            }
            if u == v {
                return Err(Error::InvalidGraph(format!("self-loop at vertex {u}")));
            }
            if !seen.insert((u.min(v), u.max(v))) {
                return Err(Error::InvalidGraph(format!("duplicate edge ({u}, {v})")));
            }
        }
        Ok(Graph {
            n_vertices,
            edges: seen.into_iter().collect(),
            label: label.into(),
        })
    }

    pub fn complete(n_vertices: usize) -> Graph {
        let edges = (0..n_vertices)
            .flat_map(|u| (u + 1..n_vertices).map(move |v| (u, v)))
            .collect();
        Graph {
            n_vertices,
            edges,
            label: format!("K{n_vertices}"),
        }
    }

    pub fn n_vertices(&self) -> usize {
        self.n_vertices
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Graph {
        self.label = label.into();
        self
    }

    pub fn degrees(&self) -> Vec<usize> {
        let mut deg = vec![0; self.n_vertices];
        for &(u, v) in &self.edges {
            deg[u] += 1;
            deg[v] += 1;
        }
        deg
    }

    pub fn is_regular(&self, d: usize) -> bool {
        self.degrees().iter().all(|&k| k == d)
    }

    fn complement(&self) -> Graph {
        let present: BTreeSet<_> = self.edges.iter().copied().collect();
        let edges = Graph::complete(self.n_vertices)
            .edges
            .into_iter()
            .filter(|e| !present.contains(e))
            .collect();
        Graph {
            n_vertices: self.n_vertices,
            edges,
            label: self.label.clone(),
        }
    }

    /// Plain-text form: `n m` on the first line, then one `u v` per edge.
    pub fn to_text(&self) -> String {
        let mut s = format!("{} {}\n", self.n_vertices, self.edges.len());
        for (u, v) in &self.edges {
            s.push_str(&format!("{u} {v}\n"));
        }
        s
    }

    pub fn from_text(text: &str, label: impl Into<String>) -> Result<Graph> {
        let mut lines = text
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with('#'));
        let header = lines
            .next()
            .ok_or_else(|| Error::InvalidGraph("empty graph file".into()))?;
        let (n, m) = parse_pair(header)?;
        let edges = lines.map(parse_pair).collect::<Result<Vec<_>>>()?;
        if edges.len() != m {
            return Err(Error::InvalidGraph(format!(
                "header announces {m} edges, found {}",
                edges.len()
            )));
        }
        Graph::new(n, edges, label)
    }

    pub fn load(path: &Path) -> Result<Graph> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::InvalidGraph(format!("cannot read {}: {e}", path.display())))?;
        Graph::from_text(&text, path.display().to_string())
    }

    pub fn save(&self, path: &Path) -> std::io::Result<()> {
        std::fs::write(path, self.to_text())
    }
}

impl fmt::Display for Graph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} ({} vertices, {} edges)",
            self.label,
            self.n_vertices,
            self.edges.len()
        )
    }
}

fn parse_pair(line: &str) -> Result<(usize, usize)> {
    let mut it = line.split_whitespace();
    let mut next = || -> Result<usize> {
        let tok = it
            .next()
            .ok_or_else(|| Error::InvalidGraph(format!("expected two integers in {line:?}")))?;
        tok.parse()
            .map_err(|_| Error::InvalidGraph(format!("bad integer {tok:?} in {line:?}")))
    };
    let pair = (next()?, next()?);
    if it.next().is_some() {
        return Err(Error::InvalidGraph(format!("trailing tokens in {line:?}")));
    }
    Ok(pair)
}

const MAX_PAIRING_ATTEMPTS: usize = 100_000;

/// Uniform-ish random d-regular simple graph from the pairing model,
/// resampling until the pairing has no loops or multi-edges. Dense cases
/// (d > (n−1)/2) are generated as complements of (n−1−d)-regular graphs.
pub fn random_regular_graph<R: Rng + ?Sized>(n: usize, d: usize, rng: &mut R) -> Result<Graph> {
    if d >= n && !(n == 0 && d == 0) {
        return Err(Error::InfeasibleGraph(format!(
            "degree {d} needs more than {n} vertices"
        )));
    }
    if n * d % 2 == 1 {
        return Err(Error::InfeasibleGraph(format!("n*d = {} is odd", n * d)));
    }
    let label = format!("reg-{n}-{d}");
    if 2 * d > n.saturating_sub(1) {
        let sparse = random_regular_graph(n, n - 1 - d, rng)?;
        return Ok(sparse.complement().with_label(label));
    }
    let stubs: Vec<usize> = (0..n).flat_map(|v| std::iter::repeat_n(v, d)).collect();
    'attempt: for _ in 0..MAX_PAIRING_ATTEMPTS {
        let mut s = stubs.clone();
        s.shuffle(rng);
        let mut edges = BTreeSet::new();
        for pair in s.chunks(2) {
            let (u, v) = (pair[0].min(pair[1]), pair[0].max(pair[1]));
            if u == v || !edges.insert((u, v)) {
                continue 'attempt;
            }
        }
        return Graph::new(n, edges.into_iter().collect(), label);
    }
    Err(Error::InfeasibleGraph(format!(
        "no simple {d}-regular pairing on {n} vertices after {MAX_PAIRING_ATTEMPTS} attempts"
    )))
}

/// G(n, p): each of the n(n−1)/2 edges present independently.
pub fn erdos_renyi<R: Rng + ?Sized>(n: usize, p: f64, rng: &mut R) -> Result<Graph> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::OutOfRange {
            name: "p",
            value: p,
            range: "[0,1]".into(),
        });
    }
    let mut edges = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            if rng.random::<f64>() < p {
                edges.push((u, v));
            }
        }
    }
    Graph::new(n, edges, format!("er-{n}-{p}"))
}

/// Diagonal of a Z-basis Hamiltonian over the 2^n computational states.
#[derive(Debug, Clone, PartialEq)]
pub struct ProblemHamiltonian {
    n_qubits: usize,
    diagonal: Vec<f64>,
}

/// +1 or −1: eigenvalue of Z_q on basis state `b`.
#[inline]
fn z_sign(b: usize, q: usize, n: usize) -> f64 {
    if (b >> (n - 1 - q)) & 1 == 0 {
        1.0
    } else {
        -1.0
    }
}

impl ProblemHamiltonian {
    /// H_P = Σ_{(i,j)∈E} Z_i Z_j.
    pub fn maxcut(graph: &Graph) -> Result<ProblemHamiltonian> {
        let n = graph.n_vertices();
        check_state_cap(n)?;
        let diagonal = (0..dim_of(n))
            .map(|b| {
                graph
                    .edges()
                    .iter()
                    .map(|&(i, j)| z_sign(b, i, n) * z_sign(b, j, n))
                    .sum()
            })
            .collect();
        Ok(ProblemHamiltonian { n_qubits: n, diagonal })
    }

    /// Σ_k w_k Π_{q∈S_k} Z_q for weighted Z-strings.
    pub fn from_z_terms(n_qubits: usize, terms: &[(f64, Vec<usize>)]) -> Result<ProblemHamiltonian> {
        check_state_cap(n_qubits)?;
        for (_, qs) in terms {
            if let Some(&q) = qs.iter().find(|&&q| q >= n_qubits) {
                return Err(Error::InvalidArgument(format!("qubit {q} out of range")));
            }
        }
        let diagonal = (0..dim_of(n_qubits))
            .map(|b| {
                terms
                    .iter()
                    .map(|(w, qs)| w * qs.iter().map(|&q| z_sign(b, q, n_qubits)).product::<f64>())
                    .sum()
            })
            .collect();
        Ok(ProblemHamiltonian { n_qubits, diagonal })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn diagonal(&self) -> &[f64] {
        &self.diagonal
    }

    /// ‖H_P‖_∞.
    pub fn operator_norm(&self) -> f64 {
        self.diagonal.iter().fold(0.0, |m, h| m.max(h.abs()))
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.diagonal.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn to_matrix(&self) -> CMatrix {
        CMatrix::from_diagonal(&DVector::from_iterator(
            self.diagonal.len(),
            self.diagonal.iter().map(|&h| Complex64::from(h)),
        ))
    }
}

fn check_state_cap(n: usize) -> Result<()> {
    if n > tol::MAX_STATE_QUBITS {
        return Err(Error::TooManyQubits {
            what: "QAOA register",
            n,
            max: tol::MAX_STATE_QUBITS,
        });
    }
    Ok(())
}

/// Mixer and problem angles, one pair per layer, reduced to [0, 2π).
#[derive(Debug, Clone, PartialEq)]
pub struct QaoaParams {
    alphas: Vec<f64>,
    gammas: Vec<f64>,
}

impl QaoaParams {
    pub fn new(alphas: Vec<f64>, gammas: Vec<f64>) -> Result<QaoaParams> {
        if alphas.len() != gammas.len() {
            return Err(Error::DimensionMismatch {
                expected: alphas.len(),
                found: gammas.len(),
            });
        }
        if alphas.iter().chain(&gammas).any(|a| !a.is_finite()) {
            return Err(Error::InvalidArgument("non-finite QAOA angle".into()));
        }
        Ok(QaoaParams {
            alphas: alphas.into_iter().map(|a| a.rem_euclid(TAU)).collect(),
            gammas: gammas.into_iter().map(|g| g.rem_euclid(TAU)).collect(),
        })
    }

    /// Angles drawn uniformly from [0, 2π), γ_ℓ before α_ℓ for each layer.
    pub fn random<R: Rng + ?Sized>(layers: usize, rng: &mut R) -> QaoaParams {
        let mut alphas = Vec::with_capacity(layers);
        let mut gammas = Vec::with_capacity(layers);
        for _ in 0..layers {
            gammas.push(rng.random_range(0.0..TAU));
            alphas.push(rng.random_range(0.0..TAU));
        }
        QaoaParams { alphas, gammas }
    }

    pub fn layers(&self) -> usize {
        self.alphas.len()
    }

    pub fn alphas(&self) -> &[f64] {
        &self.alphas
    }

    pub fn gammas(&self) -> &[f64] {
        &self.gammas
    }

    /// The first `layers` layers.
    pub fn truncated(&self, layers: usize) -> QaoaParams {
        QaoaParams {
            alphas: self.alphas[..layers].to_vec(),
            gammas: self.gammas[..layers].to_vec(),
        }
    }
}

/// Which angle a derivative refers to (0-based layer index).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ParamId {
    Gamma(usize),
    Alpha(usize),
}

impl ParamId {
    /// γ of the first layer.
    pub fn first() -> ParamId {
        ParamId::Gamma(0)
    }

    /// α of the last of `layers` layers.
    pub fn last(layers: usize) -> ParamId {
        ParamId::Alpha(layers.saturating_sub(1))
    }
}

/// A QAOA circuit on a noisy device.
#[derive(Debug, Clone)]
pub struct QaoaInstance {
    graph: Option<Graph>,
    hamiltonian: ProblemHamiltonian,
    channel: Channel,
    layers: usize,
}

impl QaoaInstance {
    pub fn maxcut(graph: Graph, channel: Channel, layers: usize) -> Result<QaoaInstance> {
        let hamiltonian = ProblemHamiltonian::maxcut(&graph)?;
        let mut inst = QaoaInstance::new(hamiltonian, channel, layers)?;
        inst.graph = Some(graph);
        Ok(inst)
    }

    pub fn new(hamiltonian: ProblemHamiltonian, channel: Channel, layers: usize) -> Result<QaoaInstance> {
        if channel.n_qubits() != hamiltonian.n_qubits() {
            return Err(Error::DimensionMismatch {
                expected: hamiltonian.n_qubits(),
                found: channel.n_qubits(),
            });
        }
        Ok(QaoaInstance {
            graph: None,
            hamiltonian,
            channel,
            layers,
        })
    }

    pub fn n_qubits(&self) -> usize {
        self.hamiltonian.n_qubits()
    }

    pub fn graph(&self) -> Option<&Graph> {
        self.graph.as_ref()
    }

    pub fn hamiltonian(&self) -> &ProblemHamiltonian {
        &self.hamiltonian
    }

    pub fn channel(&self) -> &Channel {
        &self.channel
    }

    pub fn layers(&self) -> usize {
        self.layers
    }

    /// Same circuit with a different noise channel.
    pub fn with_channel(&self, channel: Channel) -> Result<QaoaInstance> {
        let mut inst = QaoaInstance::new(self.hamiltonian.clone(), channel, self.layers)?;
        inst.graph = self.graph.clone();
        Ok(inst)
    }

    pub fn with_layers(&self, layers: usize) -> QaoaInstance {
        QaoaInstance { layers, ..self.clone() }
    }

    fn check_params(&self, params: &QaoaParams) -> Result<()> {
        if params.layers() != self.layers {
            return Err(Error::DimensionMismatch {
                expected: self.layers,
                found: params.layers(),
            });
        }
        Ok(())
    }

    fn evolver(&self) -> Evolver<'_> {
        Evolver {
            n: self.n_qubits(),
            h: &self.hamiltonian.diagonal,
            channel: &self.channel,
        }
    }
}

/// e^{−iγ h_a} for every basis state.
fn phases(h: &[f64], gamma: f64) -> Vec<Complex64> {
    h.iter().map(|&e| Complex64::from_polar(1.0, -gamma * e)).collect()
}

/// ρ ↦ D ρ D† for the diagonal unitary D = e^{−iγH_P}.
fn apply_phase(m: &mut CMatrix, h: &[f64], gamma: f64) {
    let p = phases(h, gamma);
    let dim = m.nrows();
    for b in 0..dim {
        let pb = p[b].conj();
        for a in 0..dim {
            m[(a, b)] *= p[a] * pb;
        }
    }
}

/// ρ ↦ R ρ R† with R = Π_q e^{−iαX_q}.
fn apply_mixer(m: &mut CMatrix, n: usize, alpha: f64) {
    let (c, s) = (Complex64::from(alpha.cos()), alpha.sin());
    let minus_is = Complex64::new(0.0, -s);
    let plus_is = Complex64::new(0.0, s);
    let dim = m.nrows();
    for q in 0..n {
        let bit = 1 << (n - 1 - q);
        for col in 0..dim {
            for a in 0..dim {
                if a & bit == 0 {
                    let (x, y) = (m[(a, col)], m[(a | bit, col)]);
                    m[(a, col)] = c * x + minus_is * y;
                    m[(a | bit, col)] = minus_is * x + c * y;
                }
            }
        }
        for b in 0..dim {
            if b & bit == 0 {
                for row in 0..dim {
                    let (x, y) = (m[(row, b)], m[(row, b | bit)]);
                    m[(row, b)] = c * x + plus_is * y;
                    m[(row, b | bit)] = plus_is * x + c * y;
                }
            }
        }
    }
}

/// |ψ⟩ ↦ D|ψ⟩.
fn apply_phase_vec(psi: &mut DVector<Complex64>, h: &[f64], gamma: f64) {
    for (amp, p) in psi.iter_mut().zip(phases(h, gamma)) {
        *amp *= p;
    }
}

/// |ψ⟩ ↦ R|ψ⟩.
fn apply_mixer_vec(psi: &mut DVector<Complex64>, n: usize, alpha: f64) {
    let (c, s) = (Complex64::from(alpha.cos()), Complex64::new(0.0, -alpha.sin()));
    for q in 0..n {
        let bit = 1 << (n - 1 - q);
        for a in 0..psi.len() {
            if a & bit == 0 {
                let (x, y) = (psi[a], psi[a | bit]);
                psi[a] = c * x + s * y;
                psi[a | bit] = s * x + c * y;
            }
        }
    }
}

fn plus_vector(n: usize) -> DVector<Complex64> {
    let dim = dim_of(n);
    DVector::from_element(dim, Complex64::from((dim as f64).sqrt().recip()))
}

struct Evolver<'a> {
    n: usize,
    h: &'a [f64],
    channel: &'a Channel,
}

impl Evolver<'_> {
    fn unitary_layer(&self, m: &mut CMatrix, gamma: f64, alpha: f64) {
        apply_phase(m, self.h, gamma);
        apply_mixer(m, self.n, alpha);
    }

    fn noise(&self, m: &CMatrix) -> Result<CMatrix> {
        self.channel.apply_operator(m)
    }

    fn layer(&self, m: &CMatrix, gamma: f64, alpha: f64) -> Result<CMatrix> {
        let mut out = m.clone();
        self.unitary_layer(&mut out, gamma, alpha);
        self.noise(&out)
    }

    fn run(&self, gammas: &[f64], alphas: &[f64]) -> Result<CMatrix> {
        let mut m = DensityMatrix::plus_state(self.n)?.into_matrix();
        for (&g, &a) in gammas.iter().zip(alphas) {
            m = self.layer(&m, g, a)?;
        }
        Ok(m)
    }

    fn cost(&self, m: &CMatrix) -> f64 {
        self.h.iter().enumerate().map(|(a, &e)| e * m[(a, a)].re).sum()
    }
}

/// Final density matrix of the noisy circuit started in |+⟩^{⊗n}.
pub fn qaoa_state(inst: &QaoaInstance, params: &QaoaParams) -> Result<DensityMatrix> {
    inst.check_params(params)?;
    DensityMatrix::from_matrix_unchecked(inst.evolver().run(&params.gammas, &params.alphas)?)
}

/// C(α, γ) = Tr[H_P ρ(α, γ)].
pub fn cost(inst: &QaoaInstance, params: &QaoaParams) -> Result<f64> {
    inst.check_params(params)?;
    let ev = inst.evolver();
    Ok(ev.cost(&ev.run(&params.gammas, &params.alphas)?))
}

/// Default central-difference step.
pub const FD_STEP: f64 = 1e-4;

/// Central finite difference of the cost with respect to one angle. The
/// shifted angles are not wrapped, so this is exact for Hamiltonians with
/// non-integer spectra as well.
pub fn gradient_fd(inst: &QaoaInstance, params: &QaoaParams, which: ParamId, h: f64) -> Result<f64> {
    inst.check_params(params)?;
    let ev = inst.evolver();
    let eval = |shift: f64| -> Result<f64> {
        let mut g = params.gammas.clone();
        let mut a = params.alphas.clone();
        match which {
            ParamId::Gamma(k) if k < g.len() => g[k] += shift,
            ParamId::Alpha(k) if k < a.len() => a[k] += shift,
            _ => return Err(Error::InvalidArgument(format!("{which:?} out of range"))),
        }
        Ok(ev.cost(&ev.run(&g, &a)?))
    };
    Ok((eval(h)? - eval(-h)?) / (2.0 * h))
}

/// A gate e^{−iθP} inserted right after the unitary part of layer
/// `after_layer` (0-based), before that layer's noise.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PauliRotation {
    pub after_layer: usize,
    pub pauli: PauliIndex,
    pub theta: f64,
}

/// Final state of the circuit with an inserted Pauli rotation.
pub fn qaoa_state_with_rotation(
    inst: &QaoaInstance,
    params: &QaoaParams,
    gate: &PauliRotation,
) -> Result<DensityMatrix> {
    inst.check_params(params)?;
    if gate.after_layer >= params.layers() || gate.pauli.n_qubits() != inst.n_qubits() {
        return Err(Error::InvalidArgument(
            "rotation position or width does not fit the circuit".into(),
        ));
    }
    let ev = inst.evolver();
    let rot = channels::pauli_rotation(&pauli::pauli_op(gate.pauli), gate.theta);
    let mut m = DensityMatrix::plus_state(ev.n)?.into_matrix();
    for (k, (&g, &a)) in params.gammas.iter().zip(&params.alphas).enumerate() {
        ev.unitary_layer(&mut m, g, a);
        if k == gate.after_layer {
            m = &rot * &m * rot.adjoint();
        }
        m = ev.noise(&m)?;
    }
    DensityMatrix::from_matrix_unchecked(m)
}

/// Outcome of the parameter-shift evaluation for an inserted rotation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShiftBound {
    /// ∂C/∂θ = C(θ + π/4) − C(θ − π/4).
    pub derivative: f64,
    /// 2‖H_P‖_∞ T(ρ_f^{(+π/4)}, ρ_f^{(−π/4)}).
    pub bound: f64,
}

/// Parameter-shift derivative of the cost with respect to an inserted
/// rotation and the trace-distance bound on its magnitude.
pub fn parameter_shift(inst: &QaoaInstance, params: &QaoaParams, gate: &PauliRotation) -> Result<ShiftBound> {
    let quarter = std::f64::consts::FRAC_PI_4;
    let plus = qaoa_state_with_rotation(
        inst,
        params,
        &PauliRotation {
            theta: gate.theta + quarter,
            ..*gate
        },
    )?;
    let minus = qaoa_state_with_rotation(
        inst,
        params,
        &PauliRotation {
            theta: gate.theta - quarter,
            ..*gate
        },
    )?;
    let h = inst.hamiltonian.to_matrix();
    let derivative = plus.expectation(&h)? - minus.expectation(&h)?;
    let bound = 2.0 * inst.hamiltonian.operator_norm() * state::trace_distance(&plus, &minus)?;
    Ok(ShiftBound { derivative, bound })
}

/// Mean, unbiased variance and standard error of one statistic at depth L.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LayerStats {
    pub layers: usize,
    pub mean: f64,
    pub variance: f64,
    pub std_error: f64,
}

fn layer_stats(layers: usize, xs: &[f64]) -> LayerStats {
    let s = stats::summarize(xs);
    LayerStats {
        layers,
        mean: s.mean,
        variance: s.variance,
        std_error: s.std_error,
    }
}

/// Per-sample angles for depths up to `l_max`; circuits of depth L use the
/// first L layers, so one trajectory yields every depth.
fn sample_angles(l_max: usize, seed: u64, k: usize) -> QaoaParams {
    QaoaParams::random(l_max, &mut stream_rng(seed, k as u64))
}

/// Purity of the circuit output for L = 1…L_max over random parameters.
pub fn purity_statistics(inst: &QaoaInstance, l_max: usize, samples: usize, seed: u64) -> Result<Vec<LayerStats>> {
    if samples < 2 {
        return Err(Error::InvalidArgument(
            "purity statistics need at least 2 samples".into(),
        ));
    }
    let ev = inst.evolver();
    let rows = (0..samples)
        .into_par_iter()
        .map(|k| {
            let p = sample_angles(l_max, seed, k);
            let mut m = DensityMatrix::plus_state(ev.n)?.into_matrix();
            let mut out = Vec::with_capacity(l_max);
            for (&g, &a) in p.gammas.iter().zip(&p.alphas) {
                m = ev.layer(&m, g, a)?;
                out.push(m.iter().map(|z| z.norm_sqr()).sum::<f64>());
            }
            Ok(out)
        })
        .collect::<Result<Vec<Vec<f64>>>>()?;
    Ok((1..=l_max)
        .map(|l| {
            let col: Vec<f64> = rows.iter().map(|r| r[l - 1]).collect();
            layer_stats(l, &col)
        })
        .collect())
}

/// Statistics of ∂C/∂γ_1 and ∂C/∂α_L at depth L.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DerivativeStats {
    pub layers: usize,
    pub mean_abs_dgamma1: f64,
    pub var_dgamma1: f64,
    pub mean_abs_dalpha_last: f64,
    pub var_dalpha_last: f64,
}

/// Finite-difference derivatives with respect to the first problem angle
/// and the last mixer angle, for L = 1…L_max over random parameters.
pub fn derivative_statistics(
    inst: &QaoaInstance,
    l_max: usize,
    samples: usize,
    seed: u64,
) -> Result<Vec<DerivativeStats>> {
    if samples < 2 {
        return Err(Error::InvalidArgument(
            "derivative statistics need at least 2 samples".into(),
        ));
    }
    let ev = inst.evolver();
    let h = FD_STEP;
    let rows = (0..samples)
        .into_par_iter()
        .map(|k| {
            let p = sample_angles(l_max, seed, k);
            let start = DensityMatrix::plus_state(ev.n)?.into_matrix();
            let (mut m, mut plus, mut minus) = (start.clone(), start.clone(), start);
            let mut out = Vec::with_capacity(l_max);
            for (l, (&g, &a)) in p.gammas.iter().zip(&p.alphas).enumerate() {
                let (g_plus, g_minus) = if l == 0 { (g + h, g - h) } else { (g, g) };
                let da = (ev.cost(&ev.layer(&m, g, a + h)?) - ev.cost(&ev.layer(&m, g, a - h)?)) / (2.0 * h);
                plus = ev.layer(&plus, g_plus, a)?;
                minus = ev.layer(&minus, g_minus, a)?;
                m = ev.layer(&m, g, a)?;
                let dg = (ev.cost(&plus) - ev.cost(&minus)) / (2.0 * h);
                out.push((dg, da));
            }
            Ok(out)
        })
        .collect::<Result<Vec<Vec<(f64, f64)>>>>()?;
    Ok((1..=l_max)
        .map(|l| {
            let dg: Vec<f64> = rows.iter().map(|r| r[l - 1].0).collect();
            let da: Vec<f64> = rows.iter().map(|r| r[l - 1].1).collect();
            let abs_g: Vec<f64> = dg.iter().map(|x| x.abs()).collect();
            let abs_a: Vec<f64> = da.iter().map(|x| x.abs()).collect();
            DerivativeStats {
                layers: l,
                mean_abs_dgamma1: stats::mean(&abs_g),
                var_dgamma1: stats::variance(&dg),
                mean_abs_dalpha_last: stats::mean(&abs_a),
                var_dalpha_last: stats::variance(&da),
            }
        })
        .collect())
}

/// Twirl fidelity at one depth.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwirlFidelity {
    pub layers: usize,
    pub fidelity: f64,
    pub std_error: f64,
}

/// Number of jackknife groups used for twirl-fidelity standard errors.
pub const JACKKNIFE_GROUPS: usize = 16;

/// F(𝒜_QAOA(ρ₀), 𝒜_Haar(ρ₀)) with ρ₀ = |+⟩⟨+|^{⊗n}, where 𝒜_QAOA is the
/// channel conjugated by the noiseless circuit unitary, U† N(U · U†) U,
/// averaged over random parameters, and 𝒜_Haar is the depolarizing twirl.
/// Each depth uses fresh parameters from stream (index of L in the list)·samples + k.
pub fn twirl_fidelity(
    hamiltonian: &ProblemHamiltonian,
    channel: &Channel,
    layer_list: &[usize],
    samples: usize,
    seed: u64,
) -> Result<Vec<TwirlFidelity>> {
    let n = hamiltonian.n_qubits();
    if channel.n_qubits() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: channel.n_qubits(),
        });
    }
    if samples == 0 {
        return Err(Error::InvalidArgument("samples must be at least 1".into()));
    }
    let rho0 = DensityMatrix::plus_state(n)?;
    let target = channels::haar_twirl(channel)?.apply(&rho0)?;
    let h = hamiltonian.diagonal();
    layer_list
        .iter()
        .enumerate()
        .map(|(idx, &layers)| {
            let terms = (0..samples)
                .into_par_iter()
                .map(|k| {
                    let p = QaoaParams::random(layers, &mut stream_rng(seed, (idx * samples + k) as u64));
                    let mut psi = plus_vector(n);
                    for (&g, &a) in p.gammas.iter().zip(&p.alphas) {
                        apply_phase_vec(&mut psi, h, g);
                        apply_mixer_vec(&mut psi, n, a);
                    }
                    let mut m = channel.apply_operator(&(&psi * psi.adjoint()))?;
                    for (&g, &a) in p.gammas.iter().zip(&p.alphas).rev() {
                        apply_mixer(&mut m, n, -a);
                        apply_phase(&mut m, h, -g);
                    }
                    Ok(m)
                })
                .collect::<Result<Vec<CMatrix>>>()?;
            let average = |ms: &[&CMatrix]| -> Result<DensityMatrix> {
                let dim = dim_of(n);
                let mut acc = CMatrix::from_element(dim, dim, ZERO);
                for m in ms {
                    acc += *m;
                }
                DensityMatrix::from_matrix_unchecked(acc.unscale(ms.len() as f64))
            };
            let all: Vec<&CMatrix> = terms.iter().collect();
            let fidelity = state::fidelity(&average(&all)?, &target)?;
            let std_error = if samples >= 2 {
                stats::jackknife_std_error(&terms, JACKKNIFE_GROUPS, |ms| {
                    average(ms)
                        .and_then(|rho| state::fidelity(&rho, &target))
                        .unwrap_or(f64::NAN)
                })
            } else {
                f64::NAN
            };
            Ok(TwirlFidelity {
                layers,
                fidelity,
                std_error,
            })
        })
        .collect()
}

/// Mean of 1 − F(ρ_N(α, γ), ρ_Haar(α, γ)) for L = 1…L_max, where ρ_Haar
/// replaces every noise application by the channel's depolarizing twirl.
pub fn haar_model_infidelity(inst: &QaoaInstance, l_max: usize, samples: usize, seed: u64) -> Result<Vec<LayerStats>> {
    if samples == 0 {
        return Err(Error::InvalidArgument("samples must be at least 1".into()));
    }
    let twirled = channels::haar_twirl(&inst.channel)?;
    let true_ev = inst.evolver();
    let haar_ev = Evolver {
        n: true_ev.n,
        h: true_ev.h,
        channel: &twirled,
    };
    let rows = (0..samples)
        .into_par_iter()
        .map(|k| {
            let p = sample_angles(l_max, seed, k);
            let start = DensityMatrix::plus_state(true_ev.n)?.into_matrix();
            let (mut a_state, mut b_state) = (start.clone(), start);
            let mut out = Vec::with_capacity(l_max);
            for (&g, &a) in p.gammas.iter().zip(&p.alphas) {
                a_state = true_ev.layer(&a_state, g, a)?;
                b_state = haar_ev.layer(&b_state, g, a)?;
                let f = state::fidelity(
                    &DensityMatrix::from_matrix_unchecked(a_state.clone())?,
                    &DensityMatrix::from_matrix_unchecked(b_state.clone())?,
                )?;
                out.push(1.0 - f);
            }
            Ok(out)
        })
        .collect::<Result<Vec<Vec<f64>>>>()?;
    Ok((1..=l_max)
        .map(|l| {
            let col: Vec<f64> = rows.iter().map(|r| r[l - 1]).collect();
            layer_stats(l, &col)
        })
        .collect())
}

/// Couplings of the universal one-dimensional QAOA Hamiltonian
/// H_P = Σ_j ω_A Z_{2j} + ω_B Z_{2j+1} + γ_AB Z_{2j}Z_{2j+1} + γ_BA Z_{2j+1}Z_{2j+2}
/// on an odd number of qubits in a line.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UniversalQaoaSpec {
    pub n_qubits: usize,
    pub omega_a: f64,
    pub omega_b: f64,
    pub gamma_ab: f64,
    pub gamma_ba: f64,
}

impl UniversalQaoaSpec {
    /// The couplings used for the five-qubit twirling comparison.
    pub fn reference(n_qubits: usize) -> UniversalQaoaSpec {
        UniversalQaoaSpec {
            n_qubits,
            omega_a: 0.45,
            omega_b: 0.54,
            gamma_ab: 0.22,
            gamma_ba: 0.52,
        }
    }

    /// Checks the odd register size and the five universality conditions.
    pub fn validate(&self) -> Result<()> {
        const EPS: f64 = 1e-12;
        if self.n_qubits.is_multiple_of(2) || self.n_qubits < 3 {
            return Err(Error::InvalidArgument(format!(
                "universal QAOA needs an odd number of qubits >= 3, got {}",
                self.n_qubits
            )));
        }
        let (wa, wb, gab, gba) = (self.omega_a, self.omega_b, self.gamma_ab, self.gamma_ba);
        let checks = [
            ((wa * wa - wb * wb).abs() > EPS, "omega_A^2 != omega_B^2"),
            ((gab * gab - gba * gba).abs() > EPS, "gamma_AB^2 != gamma_BA^2"),
            (
                (gab * gab - 4.0 * gba * gba).abs() > EPS,
                "gamma_AB^2 - 4 gamma_BA^2 != 0",
            ),
            (gab.abs() > EPS, "gamma_AB != 0"),
            (gba.abs() > EPS, "gamma_BA != 0"),
        ];
        for (ok, name) in checks {
            if !ok {
                return Err(Error::UniversalityViolated(name));
            }
        }
        Ok(())
    }

    pub fn hamiltonian(&self) -> Result<ProblemHamiltonian> {
        self.validate()?;
        let n = self.n_qubits;
        let mut terms = Vec::new();
        for j in 0..n.div_ceil(2) {
            let (a, b, c) = (2 * j, 2 * j + 1, 2 * j + 2);
            let candidates = [
                (self.omega_a, vec![a]),
                (self.omega_b, vec![b]),
                (self.gamma_ab, vec![a, b]),
                (self.gamma_ba, vec![b, c]),
            ];
            terms.extend(candidates.into_iter().filter(|(_, qs)| qs.iter().all(|&q| q < n)));
        }
        ProblemHamiltonian::from_z_terms(n, &terms)
    }
}

/// QAOA instance with the universal line Hamiltonian and the X mixer.
pub fn universal_qaoa_instance(spec: &UniversalQaoaSpec, channel: Channel, layers: usize) -> Result<QaoaInstance> {
    QaoaInstance::new(spec.hamiltonian()?, channel, layers)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channels::{amplitude_damping, depolarizing, tensor_power};

    #[test]
    fn k4_is_the_only_cubic_graph_on_four_vertices() {
        let mut rng = stream_rng(1, 0);
        let g = random_regular_graph(4, 3, &mut rng).unwrap();
        assert_eq!(g.edges(), Graph::complete(4).edges());
    }

    #[test]
    fn cubic_graph_on_six_vertices() {
        let mut rng = stream_rng(2, 0);
        for _ in 0..20 {
            let g = random_regular_graph(6, 3, &mut rng).unwrap();
            assert_eq!(g.edges().len(), 9);
            assert!(g.is_regular(3));
        }
        assert!(random_regular_graph(6, 4, &mut rng).unwrap().is_regular(4));
        assert!(random_regular_graph(6, 5, &mut rng).unwrap().is_regular(5));
    }

    #[test]
    fn infeasible_regular_graphs() {
        let mut rng = stream_rng(3, 0);
        assert!(matches!(
            random_regular_graph(4, 4, &mut rng),
            Err(Error::InfeasibleGraph(_))
        ));
        assert!(matches!(
            random_regular_graph(5, 3, &mut rng),
            Err(Error::InfeasibleGraph(_))
        ));
    }

    #[test]
    fn graph_text_round_trip() {
        let g = Graph::new(4, vec![(0, 1), (2, 1), (3, 0)], "g").unwrap();
        let back = Graph::from_text(&g.to_text(), "g").unwrap();
        assert_eq!(g, back);
        assert!(Graph::from_text("3 1\n0 0\n", "bad").is_err());
        assert!(Graph::from_text("3 2\n0 1\n", "bad").is_err());
        assert!(Graph::new(3, vec![(0, 1), (1, 0)], "dup").is_err());
    }

    #[test]
    fn single_edge_hamiltonian() {
        let g = Graph::new(2, vec![(0, 1)], "edge").unwrap();
        let h = ProblemHamiltonian::maxcut(&g).unwrap();
        assert_eq!(h.diagonal(), &[1.0, -1.0, -1.0, 1.0]);
    }

    #[test]
    fn zero_layers_give_plus_state_and_zero_cost() {
        let g = Graph::complete(3);
        let inst = QaoaInstance::maxcut(g, Channel::identity(3), 0).unwrap();
        let p = QaoaParams::new(vec![], vec![]).unwrap();
        assert_eq!(qaoa_state(&inst, &p).unwrap(), DensityMatrix::plus_state(3).unwrap());
        assert!(cost(&inst, &p).unwrap().abs() < 1e-15);
    }

    #[test]
    fn params_wrap_into_period() {
        let p = QaoaParams::new(vec![-0.5], vec![7.0]).unwrap();
        assert!((p.alphas()[0] - (TAU - 0.5)).abs() < 1e-15);
        assert!((p.gammas()[0] - (7.0 - TAU)).abs() < 1e-15);
        assert!(QaoaParams::new(vec![0.0], vec![]).is_err());
    }

    #[test]
    fn full_depolarizing_kills_gamma1_derivative() {
        let g = Graph::complete(3);
        let inst = QaoaInstance::maxcut(g, depolarizing(1.0, 3).unwrap(), 2).unwrap();
        let mut rng = stream_rng(4, 0);
        let p = QaoaParams::random(2, &mut rng);
        assert!(gradient_fd(&inst, &p, ParamId::first(), FD_STEP).unwrap().abs() < 1e-8);
        let st = derivative_statistics(&inst, 3, 4, 1).unwrap();
        for s in &st {
            assert!(s.mean_abs_dgamma1 < 1e-8 && s.var_dgamma1 < 1e-16);
        }
    }

    #[test]
    fn noiseless_purity_is_one() {
        let g = Graph::complete(3);
        let inst = QaoaInstance::maxcut(g, Channel::identity(3), 3).unwrap();
        for s in purity_statistics(&inst, 3, 5, 2).unwrap() {
            assert!((s.mean - 1.0).abs() < 1e-12 && s.variance < 1e-24);
        }
        for s in haar_model_infidelity(&inst, 3, 3, 2).unwrap() {
            assert!(s.mean.abs() < 1e-6);
        }
    }

    #[test]
    fn universality_conditions() {
        let ch = Channel::identity(5);
        assert!(universal_qaoa_instance(&UniversalQaoaSpec::reference(5), ch.clone(), 1).is_ok());
        let mut s = UniversalQaoaSpec::reference(5);
        s.gamma_ba = s.gamma_ab;
        assert_eq!(
            universal_qaoa_instance(&s, ch.clone(), 1).unwrap_err(),
            Error::UniversalityViolated("gamma_AB^2 != gamma_BA^2")
        );
        let mut s = UniversalQaoaSpec::reference(5);
        s.omega_b = s.omega_a;
        assert_eq!(
            universal_qaoa_instance(&s, ch, 1).unwrap_err(),
            Error::UniversalityViolated("omega_A^2 != omega_B^2")
        );
    }

    #[test]
    fn parameter_shift_bound_holds() {
        let g = Graph::complete(3);
        let ch = tensor_power(&amplitude_damping(0.05).unwrap(), 3).unwrap();
        let inst = QaoaInstance::maxcut(g, ch, 2).unwrap();
        let mut rng = stream_rng(5, 0);
        let p = QaoaParams::random(2, &mut rng);
        let gate = PauliRotation {
            after_layer: 0,
            pauli: PauliIndex::from_label("XZY").unwrap(),
            theta: 0.3,
        };
        let sb = parameter_shift(&inst, &p, &gate).unwrap();
        assert!(sb.derivative.abs() <= sb.bound + 1e-12);
    }
}
