mod common;

use common::*;
use nalgebra::DVector;
use nibp::channels::{self, noise_coefficients};
use nibp::linalg::{self, CMatrix};
use nibp::pauli::{unvectorize, vectorize};
use nibp::ptm::{kraus_trace_sum, ptm_from_kraus, ptm_of_unitary};
use nibp::rng::stream_rng;
use nibp::state::{self, purity, relative_entropy, schatten_norm, trace_distance, DensityMatrix};
use nibp::{haar, toy};
use proptest::prelude::*;
use rand::Rng as _;

const CASES: u32 = 128;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(CASES))]

    #[test]
    fn cptp_ptm_has_trace_row_and_maps_states_to_states(seed in any::<u64>(), n in 1usize..=2) {
        let mut rng = stream_rng(seed, 0);
        let ch = any_channel(n, &mut rng);
        let ptm = ch.ptm().unwrap();
        let m = ptm.matrix();
        prop_assert!((m[(0, 0)] - 1.0).abs() < 1e-10);
        for j in 1..m.ncols() {
            prop_assert!(m[(0, j)].abs() < 1e-10);
        }
        let rho = random_state(n, &mut rng);
        let out = ptm.apply(&rho.vectorize().unwrap()).unwrap();
        prop_assert!(DensityMatrix::new(unvectorize(&out)).is_ok());
    }

    #[test]
    fn ptm_trace_equals_kraus_trace_sum(seed in any::<u64>(), n in 1usize..=2, k in 1usize..=4) {
        let mut rng = stream_rng(seed, 1);
        let ch = random_kraus_channel(n, k, &mut rng);
        let kraus = ch.kraus().unwrap();
        let ptm = ptm_from_kraus(&kraus, n).unwrap();
        prop_assert!((ptm.matrix().trace() - kraus_trace_sum(&kraus)).abs() < 1e-9);
        prop_assert!((ch.ptm_trace() - kraus_trace_sum(&kraus)).abs() < 1e-9);
    }

    #[test]
    fn stored_ptm_matches_kraus_and_both_paths_agree(seed in any::<u64>(), n in 1usize..=2) {
        let mut rng = stream_rng(seed, 2);
        let ch = any_channel(n, &mut rng);
        let kraus = ch.kraus().unwrap();
        let from_kraus = ptm_from_kraus(&kraus, n).unwrap();
        let ptm = ch.ptm().unwrap();
        prop_assert!((ptm.matrix() - from_kraus.matrix()).amax() < 1e-9);
        let rho = random_state(n, &mut rng);
        let direct = ch.apply(&rho).unwrap();
        let via_ptm = ptm.apply_operator(rho.matrix()).unwrap();
        prop_assert!(linalg::max_abs_diff(direct.matrix(), &via_ptm) < 1e-9);
    }

    #[test]
    fn unitary_ptm_is_block_orthogonal(seed in any::<u64>(), n in 1usize..=3) {
        let mut rng = stream_rng(seed, 3);
        let u = haar::haar_unitary(n, &mut rng);
        let m = ptm_of_unitary(&u, n).unwrap().into_matrix();
        let d = m.nrows();
        for j in 1..d {
            prop_assert!(m[(0, j)].abs() < 1e-10 && m[(j, 0)].abs() < 1e-10);
        }
        let block = m.view((1, 1), (d - 1, d - 1)).into_owned();
        let defect = (block.transpose() * &block - nalgebra::DMatrix::<f64>::identity(d - 1, d - 1)).amax();
        prop_assert!(defect < 1e-10);
    }

    #[test]
    fn trace_distance_contracts(seed in any::<u64>(), n in 1usize..=3) {
        let mut rng = stream_rng(seed, 4);
        let ch = any_channel(n, &mut rng);
        let (rho, sigma) = (random_state(n, &mut rng), random_state(n, &mut rng));
        let before = trace_distance(&rho, &sigma).unwrap();
        let after = trace_distance(&ch.apply(&rho).unwrap(), &ch.apply(&sigma).unwrap()).unwrap();
        prop_assert!(after <= before + 1e-10, "{after} > {before}");
    }

    #[test]
    fn holder_chain(seed in any::<u64>(), n in 1usize..=3) {
        let mut rng = stream_rng(seed, 5);
        let o = haar::random_hermitian(1 << n, &mut rng);
        let (rho, sigma) = (random_state(n, &mut rng), random_state(n, &mut rng));
        let diff = rho.matrix() - sigma.matrix();
        let lhs = state::trace_product(&o, &diff).norm();
        let rhs = schatten_norm(&o, f64::INFINITY).unwrap() * schatten_norm(&diff, 1.0).unwrap();
        prop_assert!(lhs <= rhs * (1.0 + 1e-12) + 1e-12);
    }

    #[test]
    fn pinsker_chain(seed in any::<u64>(), n in 1usize..=3) {
        let mut rng = stream_rng(seed, 6);
        let rho = random_state(n, &mut rng);
        let sigma = full_rank_state(n, &mut rng);
        let t1 = schatten_norm(&(rho.matrix() - sigma.matrix()), 1.0).unwrap();
        let d = relative_entropy(&rho, &sigma).unwrap();
        prop_assert!(t1 * t1 <= 2.0 * std::f64::consts::LN_2 * d + 1e-10);
    }

    #[test]
    fn relative_entropy_to_mixed_bounded_by_purity(seed in any::<u64>(), n in 1usize..=3) {
        let mut rng = stream_rng(seed, 7);
        let rho = random_state(n, &mut rng);
        let mixed = DensityMatrix::maximally_mixed(n).unwrap();
        let d = relative_entropy(&rho, &mixed).unwrap();
        prop_assert!(d <= n as f64 + purity(&rho).log2() + 1e-10);
    }

    #[test]
    fn r_from_projector_matches_coefficients(seed in any::<u64>(), n in 1usize..=2) {
        let mut rng = stream_rng(seed, 8);
        let ch = any_channel(n, &mut rng);
        let m = ch.ptm().unwrap().into_matrix();
        let d = m.nrows();
        let mut proj = nalgebra::DMatrix::<f64>::identity(d, d);
        proj[(0, 0)] = 0.0;
        let r_proj = (m.transpose() * &m * proj).trace() / (d - 1) as f64;
        let c = noise_coefficients(&ch);
        prop_assert!((r_proj - c.r).abs() < 1e-10);
        let four = d as f64;
        let two = four.sqrt();
        prop_assert!((c.r * (four - 1.0) - (four * c.nu - two * c.eta)).abs() < 1e-9);
        prop_assert!(c.eta >= 1.0 / two - 1e-12 && c.eta <= 1.0 + 1e-12);
        prop_assert!(c.r >= -1e-12 && c.r <= 1.0 + 1e-12);
    }

    #[test]
    fn weak_lindbladian_r_tracks_twice_p_eff(seed in any::<u64>(), n in 1usize..=2, jumps in 1usize..=3) {
        let mut rng = stream_rng(seed, 9);
        let strength = rng.random_range(1e-6..1e-3);
        let ch = random_lindblad(n, jumps, strength, &mut rng);
        let c = noise_coefficients(&ch);
        let bound = 10.0 * strength * strength * 4f64.powi(n as i32);
        prop_assert!((c.r - (1.0 - 2.0 * c.p_eff)).abs() <= bound, "{} vs {}", c.r - (1.0 - 2.0 * c.p_eff), bound);
    }

    #[test]
    fn unital_channels_have_minimal_eta(seed in any::<u64>(), n in 1usize..=3, m in 1usize..=3) {
        let mut rng = stream_rng(seed, 10);
        let ch = random_unital_channel(n, m, &mut rng);
        let c = noise_coefficients(&ch);
        prop_assert!((c.eta - 1.0 / (1u64 << n) as f64).abs() < 1e-12);
    }

    #[test]
    fn vectorize_round_trip(seed in any::<u64>(), n in 1usize..=4) {
        let mut rng = stream_rng(seed, 11);
        let a = haar::random_hermitian(1 << n, &mut rng);
        let back = unvectorize(&vectorize(&a, n).unwrap());
        prop_assert!(linalg::max_abs_diff(&a, &back) < 1e-12);
    }

    #[test]
    fn tensor_ptm_is_kronecker(seed in any::<u64>()) {
        let mut rng = stream_rng(seed, 12);
        let a = any_channel(1, &mut rng);
        let b = any_channel(2, &mut rng);
        let t = channels::tensor(&[a.clone(), b.clone()]).unwrap();
        let kron = a.ptm().unwrap().tensor(&b.ptm().unwrap()).unwrap();
        prop_assert!((t.ptm().unwrap().matrix() - kron.matrix()).amax() < 1e-12);
        let c = noise_coefficients(&t);
        let direct = nibp::ptm::Ptm::new(3, kron.into_matrix()).unwrap();
        let from_dense = channels::Channel::from_ptm(direct, "dense").unwrap().noise_coefficients();
        prop_assert!((c.nu - from_dense.nu).abs() < 1e-12 && (c.eta - from_dense.eta).abs() < 1e-12);
        prop_assert!((c.p_eff - from_dense.p_eff).abs() < 1e-12);
    }

    #[test]
    fn exact_overlap_obeys_one_layer_recursion(seed in any::<u64>(), n in 1usize..=3, layers in 1usize..=50) {
        let mut rng = stream_rng(seed, 13);
        let ch = any_channel(n, &mut rng);
        let (a, b) = (random_state(n, &mut rng), random_state(n, &mut rng));
        let c = noise_coefficients(&ch);
        let dim = (1u64 << n) as f64;
        let offset = dim * (dim * c.eta - c.nu) / (dim * dim - 1.0);
        let now = toy::exact_avg_overlap(&ch, &a, &b, layers).unwrap();
        let before = toy::exact_avg_overlap(&ch, &a, &b, layers - 1).unwrap();
        prop_assert!((now - (c.r * before + offset)).abs() < 1e-12);
    }

    #[test]
    fn cost_concentrates_with_purity(seed in any::<u64>(), n in 1usize..=3, layers in 0usize..=8) {
        let mut rng = stream_rng(seed, 14);
        let ch = any_channel(n, &mut rng);
        let o = haar::random_hermitian(1 << n, &mut rng);
        let rho_in = random_state(n, &mut rng);
        let (_, rho) = toy::simulate_instance(&ch, &rho_in, layers, &mut rng).unwrap();
        let dim = (1u64 << n) as f64;
        let lhs = (rho.expectation(&o).unwrap() - o.trace().re / dim).abs();
        let p = purity(&rho);
        let rhs = schatten_norm(&o, f64::INFINITY).unwrap()
            * (2.0 * std::f64::consts::LN_2 * (n as f64 + p.log2()).max(0.0)).sqrt();
        prop_assert!(lhs <= rhs + 1e-9, "{lhs} > {rhs}");
    }

    #[test]
    fn channel_outputs_are_states(seed in any::<u64>(), n in 1usize..=3) {
        let mut rng = stream_rng(seed, 15);
        let ch = any_channel(n, &mut rng);
        let out = ch.apply(&random_state(n, &mut rng)).unwrap();
        prop_assert!(out.validate().is_ok());
        let p = purity(&out);
        prop_assert!(p >= 1.0 / (1u64 << n) as f64 - 1e-12 && p <= 1.0 + 1e-12);
    }

    #[test]
    fn distances_stay_in_unit_interval(seed in any::<u64>(), n in 1usize..=3) {
        let mut rng = stream_rng(seed, 16);
        let (rho, sigma) = (random_state(n, &mut rng), random_state(n, &mut rng));
        let t = trace_distance(&rho, &sigma).unwrap();
        let f = state::fidelity(&rho, &sigma).unwrap();
        prop_assert!((0.0..=1.0).contains(&t) && (0.0..=1.0).contains(&f));
        // Fuchs-van de Graaf; equality for pure pairs, where the root
        // fidelity carries sqrt(eps)-sized error from near-zero eigenvalues.
        prop_assert!(1.0 - f <= t + 1e-9 && t <= (1.0 - f * f).max(0.0).sqrt() + 1e-7);
    }
}

#[test]
fn trace_from_kraus_for_twenty_channels() {
    let mut rng = stream_rng(99, 0);
    for _ in 0..20 {
        let ch = random_kraus_channel(2, 3, &mut rng);
        let kraus: Vec<CMatrix> = ch.kraus().unwrap();
        let sum: f64 = kraus.iter().map(|a| a.trace().norm_sqr()).sum();
        assert!((ch.ptm().unwrap().matrix().trace() - sum).abs() < 1e-9);
    }
}

#[test]
fn haar_first_moment_is_scaled_identity() {
    let n = 1;
    let samples = 2000;
    let mut rng = stream_rng(100, 0);
    let a = haar::random_hermitian(2, &mut rng);
    let target = a.trace() / 2.0;
    let mut entries: Vec<Vec<f64>> = (0..8).map(|_| Vec::with_capacity(samples)).collect();
    for _ in 0..samples {
        let u = haar::haar_unitary(n, &mut rng);
        let m = u.adjoint() * &a * &u;
        for (k, z) in m.iter().enumerate() {
            entries[2 * k].push(z.re);
            entries[2 * k + 1].push(z.im);
        }
    }
    let expected = DVector::from_vec(vec![target.re, target.im, 0.0, 0.0, 0.0, 0.0, target.re, target.im]);
    for (k, xs) in entries.iter().enumerate() {
        let s = nibp::stats::summarize(xs);
        assert!(
            (s.mean - expected[k]).abs() <= 5.0 * s.std_error + 1e-12,
            "entry {k}: {} vs {}",
            s.mean,
            expected[k]
        );
    }
}
