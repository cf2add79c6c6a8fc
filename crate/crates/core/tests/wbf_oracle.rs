//! WBF primitives checked against dense brute-force evaluations.

use proptest::prelude::*;

use sc_ldpc::stream::FrameStreams;
use sc_ldpc::wbf::{
    compute_weights, decode_wbf, flip_candidates, flip_metric, syndrome, FlipMode, WbfParams,
};
use sc_ldpc::SparseParityCheck;

fn dense_syndrome(dense: &[Vec<u8>], y: &[u8]) -> Vec<u8> {
    dense
        .iter()
        .map(|row| row.iter().zip(y).map(|(&h, &b)| h * b).sum::<u8>() % 2)
        .collect()
}

fn dense_metric(dense: &[Vec<u8>], s: &[u8], w: &[f64]) -> Vec<f64> {
    let n = dense[0].len();
    let mut e = vec![0.0; n];
    for (i, ei) in e.iter_mut().enumerate() {
        for (j, row) in dense.iter().enumerate() {
            if row[i] == 1 {
                *ei += (2.0 * s[j] as f64 - 1.0) * w[j];
            }
        }
    }
    e
}

fn instance() -> impl Strategy<Value = (Vec<Vec<u8>>, Vec<u8>, Vec<f64>)> {
    (1usize..=12, 1usize..=24).prop_flat_map(|(m, n)| {
        (
            prop::collection::vec(prop::collection::vec(0u8..2, n), m),
            prop::collection::vec(0u8..2, n),
            prop::collection::vec(-3.0f64..3.0, n),
        )
    })
}

fn sparse(dense: &[Vec<u8>]) -> SparseParityCheck {
    let n = dense[0].len();
    let rows = dense
        .iter()
        .map(|r| r.iter().enumerate().filter(|(_, &b)| b == 1).map(|(i, _)| i).collect())
        .collect();
    SparseParityCheck::from_rows(n, rows).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn syndrome_matches_dense_product((dense, y, _) in instance()) {
        let h = sparse(&dense);
        prop_assert_eq!(syndrome(&h, &y).unwrap(), dense_syndrome(&dense, &y));
    }

    #[test]
    fn metric_matches_dense_double_loop((dense, y, r) in instance()) {
        let h = sparse(&dense);
        let mags: Vec<f64> = r.iter().map(|x| x.abs()).collect();
        let w = compute_weights(&h, &mags).unwrap();
        for (j, row) in dense.iter().enumerate() {
            let brute = row
                .iter()
                .zip(&mags)
                .filter(|(&b, _)| b == 1)
                .map(|(_, &a)| a)
                .fold(f64::INFINITY, f64::min);
            prop_assert_eq!(w[j], if brute.is_finite() { brute } else { 0.0 });
        }
        let s = dense_syndrome(&dense, &y);
        let e = flip_metric(&h, &s, &w).unwrap();
        for (a, b) in e.iter().zip(dense_metric(&dense, &s, &w)) {
            prop_assert!((a - b).abs() <= 1e-12);
        }
    }

    #[test]
    fn candidates_invariant_under_positive_scaling(
        (dense, y, r) in instance(),
        scale in 0.01f64..100.0,
    ) {
        let h = sparse(&dense);
        let s = syndrome(&h, &y).unwrap();
        let mags: Vec<f64> = r.iter().map(|x| x.abs()).collect();
        let scaled: Vec<f64> = mags.iter().map(|x| x * scale).collect();
        let e = flip_metric(&h, &s, &compute_weights(&h, &mags).unwrap()).unwrap();
        let es = flip_metric(&h, &s, &compute_weights(&h, &scaled).unwrap()).unwrap();
        for (a, b) in e.iter().zip(&es) {
            prop_assert!((a * scale - b).abs() <= 1e-9 * (1.0 + b.abs()));
        }
        // Powers of two scale exactly, so the tie set is preserved bit for bit.
        let pow2 = 2f64.powi((scale.log2().round()) as i32);
        let exact: Vec<f64> = mags.iter().map(|x| x * pow2).collect();
        let ep = flip_metric(&h, &s, &compute_weights(&h, &exact).unwrap()).unwrap();
        prop_assert_eq!(flip_candidates(&e), flip_candidates(&ep));
    }

    #[test]
    fn decoder_flip_counts_and_convergence(
        (dense, y, r) in instance(),
        cap in 0usize..30,
        seed in any::<u64>(),
        multi in any::<bool>(),
    ) {
        let h = sparse(&dense);
        let mode = if multi { FlipMode::Multi } else { FlipMode::Single };
        let stopping_rows = h.n_rows();

        // Replay the decoder one iteration at a time to observe each step.
        let mut rng = FrameStreams::derive(seed, 0).decoder;
        let full = decode_wbf(&h, &r, &y, WbfParams { max_iterations: cap, mode, stopping_rows }, &mut rng).unwrap();
        prop_assert!(full.iterations <= cap);
        if full.converged {
            prop_assert!(syndrome(&h, &full.decision).unwrap().iter().all(|&b| b == 0));
        }

        let mags: Vec<f64> = r.iter().map(|x| x.abs()).collect();
        let w = compute_weights(&h, &mags).unwrap();
        let mut current = y.clone();
        let mut rng = FrameStreams::derive(seed, 0).decoder;
        for _ in 0..full.iterations {
            let s = syndrome(&h, &current).unwrap();
            let f = flip_candidates(&flip_metric(&h, &s, &w).unwrap());
            let step = decode_wbf(&h, &r, &current, WbfParams { max_iterations: 1, mode, stopping_rows }, &mut rng).unwrap();
            let flipped: Vec<usize> = (0..current.len()).filter(|&i| step.decision[i] != current[i]).collect();
            match mode {
                FlipMode::Single => {
                    prop_assert_eq!(flipped.len(), 1);
                    prop_assert!(f.contains(&flipped[0]));
                }
                FlipMode::Multi => prop_assert_eq!(flipped, f),
            }
            current = step.decision;
        }
    }

    #[test]
    fn single_flip_is_deterministic_per_stream((dense, y, r) in instance(), seed in any::<u64>()) {
        let h = sparse(&dense);
        let params = WbfParams { max_iterations: 20, mode: FlipMode::Single, stopping_rows: h.n_rows() };
        let a = decode_wbf(&h, &r, &y, params, &mut FrameStreams::derive(seed, 1).decoder).unwrap();
        let b = decode_wbf(&h, &r, &y, params, &mut FrameStreams::derive(seed, 1).decoder).unwrap();
        prop_assert_eq!(a, b);
    }
}

#[test]
fn all_ones_syndrome_gives_positive_metric() {
    let h = SparseParityCheck::from_rows(4, vec![vec![0, 1, 2], vec![1, 2, 3]]).unwrap();
    let w = compute_weights(&h, &[0.9, 0.2, 0.8, 0.7]).unwrap();
    assert_eq!(flip_metric(&h, &[1, 1], &w).unwrap(), vec![0.2, 0.4, 0.4, 0.2]);
    assert_eq!(flip_metric(&h, &[0, 0], &w).unwrap(), vec![-0.2, -0.4, -0.4, -0.2]);
}
