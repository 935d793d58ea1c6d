mod support;

use rand::Rng;
use tagclust::smoothing::{
    document_similarity, keyword_similarity, sinkhorn_knopp, smooth, smooth_matrix, SmoothingConfig,
};
use tagclust::{DenseMatrix, SparseBinaryMatrix};

const TOL: f64 = 1e-8;

fn random_binary(seed: u64, max_n: usize, max_m: usize) -> SparseBinaryMatrix {
    let mut r = support::rng(seed);
    let n = r.random_range(2..=max_n);
    let m = r.random_range(2..=max_m);
    let density = r.random_range(0.05..0.6);
    support::binary_matrix(&mut r, n, m, density)
}

fn random_symmetric_positive(seed: u64) -> DenseMatrix<f64> {
    let mut r = support::rng(seed);
    let n = r.random_range(2..=30);
    let mut s = DenseMatrix::zeros(n, n);
    for i in 0..n {
        for j in i..n {
            let v = if i == j { r.random_range(0.5..2.0) } else { r.random_range(0.0..1.0) };
            s.set(i, j, v);
            s.set(j, i, v);
        }
    }
    s
}

fn sums(t: &DenseMatrix<f64>) -> (Vec<f64>, Vec<f64>) {
    let (n, m) = t.shape();
    let rows = (0..n).map(|i| t.row(i).iter().sum()).collect();
    let cols = (0..m).map(|j| (0..n).map(|i| t.get(i, j)).sum()).collect();
    (rows, cols)
}

#[test]
fn sinkhorn_output_is_bistochastic() {
    for seed in 0..100 {
        let s = random_symmetric_positive(seed);
        let res = sinkhorn_knopp(&s, TOL, 10_000).unwrap();
        assert!(res.converged);
        assert!(res.max_residual <= TOL);
        let (rows, cols) = sums(&res.transition);
        for v in rows.iter().chain(&cols) {
            assert!((v - 1.0).abs() <= TOL, "sum {v}");
        }
        let n = s.n_rows();
        for i in 0..n {
            for j in 0..n {
                assert!((res.transition.get(i, j) - res.transition.get(j, i)).abs() <= 1e-9);
            }
        }
    }
}

#[test]
fn smoothing_preserves_total_mass() {
    for seed in 100..180 {
        let m = random_binary(seed, 40, 30);
        let sm = smooth::<f64>(&m, &SmoothingConfig::default()).unwrap();
        assert!(sm.docs.max_residual <= TOL && sm.keys.max_residual <= TOL);
        let before = m.nnz() as f64;
        let after = sm.matrix.sum();
        assert!(((after - before) / before).abs() <= 1e-6, "{before} -> {after}");
        assert!(sm.matrix.values().iter().all(|&v| v >= 0.0));
    }
}

#[test]
fn product_matches_quadruple_sum() {
    for seed in 200..260 {
        let m = random_binary(seed, 8, 8);
        let sm = smooth::<f64>(&m, &SmoothingConfig::default()).unwrap();
        let expected = support::quadruple_sum_smoothing(&m, &sm.docs.transition, &sm.keys.transition);
        for (a, b) in sm.matrix.values().iter().zip(&expected) {
            assert!((a - b).abs() <= 1e-12, "{a} vs {b}");
        }
    }
}

#[test]
fn identity_transitions_leave_matrix_unchanged() {
    let m = random_binary(7, 12, 9);
    let out = smooth_matrix::<f64>(
        &m,
        &DenseMatrix::identity(m.n_rows()),
        &DenseMatrix::identity(m.n_cols()),
    )
    .unwrap();
    assert_eq!(out, m.to_dense::<f64>());
}

#[test]
fn similarities_are_symmetric_with_unit_diagonal() {
    for seed in 300..340 {
        let m = random_binary(seed, 25, 25);
        for s in [document_similarity::<f64>(&m).unwrap(), keyword_similarity::<f64>(&m).unwrap()] {
            let n = s.n_rows();
            for i in 0..n {
                assert_eq!(s.get(i, i), 1.0);
                for j in 0..n {
                    let v = s.get(i, j);
                    assert!((0.0..=1.0).contains(&v));
                    assert!((v - s.get(j, i)).abs() <= 1e-12);
                }
            }
        }
    }
}

#[test]
fn similarity_hand_values() {
    let m = SparseBinaryMatrix::from_entries(2, 3, vec![(0, 0), (0, 1), (1, 0), (1, 2)]).unwrap();
    assert!((document_similarity::<f64>(&m).unwrap().get(0, 1) - 1.0 / 3.0).abs() < 1e-12);
    let m = SparseBinaryMatrix::from_entries(2, 2, vec![(0, 0), (0, 1), (1, 0)]).unwrap();
    assert!((keyword_similarity::<f64>(&m).unwrap().get(0, 1) - 1.0 / 3f64.sqrt()).abs() < 1e-12);
}

#[test]
fn sinkhorn_hand_values() {
    let t = sinkhorn_knopp(&DenseMatrix::from_rows(&[vec![2.0, 1.0], vec![1.0, 2.0]]).unwrap(), 1e-12, 10_000)
        .unwrap()
        .transition;
    let want: [f64; 4] = [2.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0, 2.0 / 3.0];
    for (a, b) in t.values().iter().zip(want) {
        assert!((a - b).abs() < 1e-9);
    }
    let t = sinkhorn_knopp(&DenseMatrix::from_rows(&[vec![1.0, 1.0], vec![1.0, 1.0]]).unwrap(), TOL, 100)
        .unwrap()
        .transition;
    assert!(t.values().iter().all(|v| (v - 0.5).abs() < 1e-12));
}

#[test]
fn empty_tiles_inside_filled_structure_gain_mass() {
    let ds = tagclust::synthgen::generate_checkerboard(&tagclust::synthgen::CheckerboardSpec::square(
        300, 4, 0.5, 0.3, 11,
    ))
    .unwrap()
    .without_empty();
    let m = &ds.matrix;
    let sm = smooth::<f64>(m, &SmoothingConfig::default()).unwrap().matrix;
    let zeros_before = m.n_rows() * m.n_cols() - m.nnz();
    let zeros_after = sm.values().iter().filter(|&&v| v == 0.0).count();
    assert!(zeros_after < zeros_before / 2, "{zeros_before} -> {zeros_after}");
}
