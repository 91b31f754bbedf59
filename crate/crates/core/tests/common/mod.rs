#![allow(dead_code)]

use nibp::channels::{self, Channel, LindbladSpec};
use nibp::haar;
use nibp::linalg::{CMatrix, ZERO};
use nibp::rng::Rng;
use nibp::DensityMatrix;
use rand::Rng as _;

/// Random channel with `k` Kraus operators cut from a Haar isometry.
pub fn random_kraus_channel(n: usize, k: usize, rng: &mut Rng) -> Channel {
    let dim = 1 << n;
    let u = haar::haar_unitary_dim(dim * k, rng);
    let kraus = (0..k).map(|j| u.view((j * dim, 0), (dim, dim)).into_owned()).collect();
    Channel::from_kraus(kraus, n, "random").unwrap()
}

/// Mixture of Haar unitaries: unital by construction.
pub fn random_unital_channel(n: usize, m: usize, rng: &mut Rng) -> Channel {
    let weights: Vec<f64> = (0..m).map(|_| rng.random_range(0.05..1.0)).collect();
    let total: f64 = weights.iter().sum();
    let kraus = weights
        .iter()
        .map(|w| haar::haar_unitary(n, rng).scale((w / total).sqrt()))
        .collect();
    Channel::from_kraus(kraus, n, "unital").unwrap()
}

/// Random traceless jump operator with Tr(L†L) = 1.
pub fn random_jump(n: usize, rng: &mut Rng) -> CMatrix {
    let dim = 1 << n;
    let mut l = haar::ginibre(dim, dim, rng);
    let tr = l.trace() / dim as f64;
    for i in 0..dim {
        l[(i, i)] -= tr;
    }
    let norm = l.norm();
    l.unscale(norm)
}

pub fn random_lindblad(n: usize, jumps: usize, strength: f64, rng: &mut Rng) -> Channel {
    let ops = (0..jumps).map(|_| random_jump(n, rng)).collect();
    let spec = LindbladSpec::new(ops, n).unwrap();
    channels::lindblad_channel(&spec, strength).unwrap()
}

/// One of the library's channel families or a random Kraus channel, on `n` qubits.
pub fn any_channel(n: usize, rng: &mut Rng) -> Channel {
    match rng.random_range(0..6) {
        0 => channels::tensor_power(&channels::amplitude_damping(rng.random()).unwrap(), n).unwrap(),
        1 => channels::depolarizing(rng.random::<f64>() * channels::max_depolarizing_strength(n), n).unwrap(),
        2 => {
            let p: [f64; 3] = [rng.random(), rng.random(), rng.random()];
            let s = p.iter().sum::<f64>() * rng.random_range(1.0..3.0);
            let single = channels::pauli_channel(p[0] / s, p[1] / s, p[2] / s).unwrap();
            channels::tensor_power(&single, n).unwrap()
        }
        3 => random_lindblad(n, rng.random_range(1..=3), rng.random_range(0.0..2.0), rng),
        4 => random_unital_channel(n, rng.random_range(1..=3), rng),
        _ => random_kraus_channel(n, rng.random_range(1..=4), rng),
    }
}

pub fn random_state(n: usize, rng: &mut Rng) -> DensityMatrix {
    let rank = rng.random_range(1..=(1usize << n));
    haar::random_mixed_state(n, rank, rng).unwrap()
}

pub fn full_rank_state(n: usize, rng: &mut Rng) -> DensityMatrix {
    haar::random_mixed_state(n, 1 << n, rng).unwrap()
}

pub fn zeros(dim: usize) -> CMatrix {
    CMatrix::from_element(dim, dim, ZERO)
}
