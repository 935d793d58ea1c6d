mod support;

use rand::Rng;
use support::{compare, random_instance};
use tagclust::{Axis, CoclusterConfig, CostMode, Coupling, DenseMatrix, Engine};

#[test]
fn cocluster_merge_sequences_match_brute_force() {
    let mut worst: f64 = 0.0;
    for seed in 0..220 {
        let m = random_instance(seed);
        for mode in [CostMode::Composite, CostMode::KlOnly] {
            let (steps, w) = compare(&m, mode, Coupling::Cocluster);
            assert_eq!(steps, m.n_rows() + m.n_cols() - 2);
            worst = worst.max(w);
        }
    }
    assert!(worst <= 1e-9, "worst KL drift {worst:e}");
}

#[test]
fn independent_merge_sequences_match_brute_force() {
    for seed in 1000..1060 {
        let m = random_instance(seed);
        for mode in [CostMode::Composite, CostMode::KlOnly] {
            let (_, w) = compare(&m, mode, Coupling::Independent);
            assert!(w <= 1e-9);
        }
    }
}

#[test]
fn support_mismatch_still_matches() {
    for seed in 2000..2060 {
        let mut r = support::rng(seed);
        let (n, m) = (r.random_range(3..=10), r.random_range(3..=9));
        let mat = support::sparse_real_matrix(&mut r, n, m, 0.4);
        let (_, w) = compare(&mat, CostMode::Composite, Coupling::Cocluster);
        assert!(w <= 1e-9, "drift {w:e}");
    }
}

#[test]
fn engine_drift_check_agrees() {
    let m = random_instance(7);
    let mut engine = Engine::new(&m, CoclusterConfig::default()).unwrap();
    while engine.step().unwrap().is_some() {
        assert!(engine.kl_drift().unwrap() <= 1e-9);
    }
}

#[test]
fn two_block_matrix_pairs_within_blocks_first() {
    let ones = |i: usize, j: usize| if (i < 2) == (j < 2) { 1.0 } else { 0.0 };
    let raw = DenseMatrix::from_vec(4, 4, (0..16).map(|x| ones(x / 4, x % 4)).collect()).unwrap();
    let bin = tagclust::SparseBinaryMatrix::from_entries(
        4,
        4,
        (0..4).flat_map(|i| (0..4).map(move |j| (i, j))).filter(|&(i, j)| ones(i, j) > 0.0).collect::<Vec<_>>(),
    )
    .unwrap();
    let smoothed = tagclust::smoothing::smooth::<f64>(&bin, &Default::default()).unwrap().matrix;
    for m in [raw, smoothed] {
        for mode in [CostMode::Composite, CostMode::KlOnly] {
            compare(&m, mode, Coupling::Cocluster);
            let cfg = CoclusterConfig { cost_mode: mode, ..Default::default() };
            let mut engine = Engine::new(&m, cfg).unwrap();
            for _ in 0..4 {
                let r = engine.step().unwrap().unwrap();
                assert!(r.kl_cost.abs() < 1e-12, "{r:?}");
                assert_eq!(r.left_id.index() < 2, r.right_id.index() < 2);
            }
            for axis in [Axis::Row, Axis::Col] {
                let l = engine.partition(axis).labels();
                assert_eq!(engine.partition(axis).n_clusters(), 2);
                assert!(l[0] == l[1] && l[2] == l[3] && l[0] != l[2]);
            }
        }
    }
}
