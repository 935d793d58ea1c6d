//! Context enhancement of the binary documents-keywords matrix.
//!
//! Both similarity matrices are weighted cosines: a shared keyword counts
//! `1 / c_k` (its inverse document frequency) when comparing documents, a
//! shared document counts `1 / r_k` when comparing keywords. Each similarity
//! matrix is balanced into a symmetric doubly stochastic transition matrix
//! with Sinkhorn-Knopp, and the binary matrix is smoothed from both sides:
//! `M* = T_docs · M · T_keys`. Row and column masses move, the global mass
//! does not.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::matrix::{DenseMatrix, SparseBinaryMatrix};
use crate::scalar::Scalar;

pub const DEFAULT_SINKHORN_TOL: f64 = 1e-8;
pub const DEFAULT_SINKHORN_MAX_ITERS: usize = 10_000;

/// Entries of the smoothed matrix below this are set to zero.
pub const SMOOTHED_ZERO_CLAMP: f64 = 1e-15;

/// Weighted cosine similarity between documents (rows).
pub fn document_similarity<T: Scalar>(m: &SparseBinaryMatrix) -> Result<DenseMatrix<T>> {
    weighted_cosine(m, "keyword")
}

/// Weighted cosine similarity between keywords (columns).
pub fn keyword_similarity<T: Scalar>(m: &SparseBinaryMatrix) -> Result<DenseMatrix<T>> {
    weighted_cosine(&m.transpose(), "document")
}

/// Row-vs-row cosine where column `k` is weighted by the inverse of its sum.
fn weighted_cosine<T: Scalar>(m: &SparseBinaryMatrix, feature: &str) -> Result<DenseMatrix<T>> {
    let n = m.n_rows();
    let col_sums = m.col_sums();
    if let Some(k) = col_sums.iter().position(|&c| c == 0) {
        return Err(Error::DivisionByZero(format!("{feature} {k} never occurs")));
    }
    let inv: Vec<T> = col_sums.iter().map(|&c| T::one() / T::from_count(c)).collect();
    let norms: Vec<T> = (0..n)
        .map(|i| m.row(i).iter().fold(T::zero(), |acc, &k| acc + inv[k]))
        .collect();

    let rows: Vec<Vec<T>> = (0..n)
        .into_par_iter()
        .map(|i| {
            let mut acc = vec![T::zero(); n];
            for &k in m.row(i) {
                for &j in m.col(k) {
                    acc[j] += inv[k];
                }
            }
            for (j, a) in acc.iter_mut().enumerate() {
                if i == j {
                    *a = if norms[i] > T::zero() { T::one() } else { T::zero() };
                } else if *a > T::zero() {
                    *a = (*a / (norms[i] * norms[j]).sqrt()).min(T::one());
                }
            }
            acc
        })
        .collect();
    Ok(DenseMatrix::from_vec_unchecked(n, n, rows.concat()))
}

#[derive(Clone, Debug)]
pub struct SinkhornResult<T> {
    pub transition: DenseMatrix<T>,
    pub row_scaling: Vec<T>,
    pub col_scaling: Vec<T>,
    pub iterations: usize,
    /// Worst `|sum - 1|` over the rows and columns of `transition`.
    pub max_residual: T,
    pub converged: bool,
}

fn mat_vec<T: Scalar>(s: &DenseMatrix<T>, x: &[T]) -> Vec<T> {
    (0..s.n_rows())
        .into_par_iter()
        .map(|i| s.row(i).iter().zip(x).fold(T::zero(), |acc, (&a, &b)| acc + a * b))
        .collect()
}

fn mat_t_vec<T: Scalar>(s: &DenseMatrix<T>, x: &[T]) -> Vec<T> {
    let mut out = vec![T::zero(); s.n_cols()];
    for (i, &xi) in x.iter().enumerate() {
        for (o, &a) in out.iter_mut().zip(s.row(i)) {
            *o += a * xi;
        }
    }
    out
}

fn reciprocal<T: Scalar>(v: Vec<T>, what: &str) -> Result<Vec<T>> {
    v.into_iter()
        .enumerate()
        .map(|(i, x)| {
            if x > T::zero() && x.is_finite() {
                Ok(T::one() / x)
            } else {
                Err(Error::NumericalFailure(format!(
                    "Sinkhorn-Knopp: {what} {i} has no support"
                )))
            }
        })
        .collect()
}

fn max_residual<T: Scalar>(t: &DenseMatrix<T>) -> T {
    t.row_sums()
        .into_iter()
        .chain(t.col_sums())
        .fold(T::zero(), |acc, s| acc.max((s - T::one()).abs()))
}

/// Balances a nonnegative square matrix into a doubly stochastic one,
/// `T = D(r) S D(c)`, alternating `c = 1 / (Sᵀ r)` and `r = 1 / (S c)`.
///
/// Symmetric inputs yield a symmetric result: the balanced matrix is
/// averaged with its transpose to cancel round-off. Running out of
/// iterations is not an error; check `converged` and `max_residual`.
pub fn sinkhorn_knopp<T: Scalar>(
    s: &DenseMatrix<T>,
    tol: T,
    max_iters: usize,
) -> Result<SinkhornResult<T>> {
    if !s.is_square() || s.n_rows() == 0 {
        return Err(Error::invalid(format!(
            "Sinkhorn-Knopp needs a non-empty square matrix, got {}x{}",
            s.n_rows(),
            s.n_cols()
        )));
    }
    let n = s.n_rows();
    let symmetric = s.max_asymmetry() == T::zero();
    let mut r = vec![T::one(); n];
    let mut c = vec![T::one(); n];
    let mut iterations = 0;
    let mut residual = T::infinity();
    while iterations < max_iters {
        iterations += 1;
        c = reciprocal(mat_t_vec(s, &r), "column")?;
        let sc = mat_vec(s, &c);
        r = reciprocal(sc, "row")?;
        // Row sums are now 1 up to rounding; the column sums carry the error.
        let col_sums = mat_t_vec(s, &r);
        residual = col_sums
            .iter()
            .zip(&c)
            .fold(T::zero(), |acc, (&v, &cj)| acc.max((v * cj - T::one()).abs()));
        if residual <= tol {
            break;
        }
    }

    let mut values = Vec::with_capacity(n * n);
    for i in 0..n {
        values.extend(s.row(i).iter().zip(&c).map(|(&v, &cj)| r[i] * v * cj));
    }
    let mut transition = DenseMatrix::from_vec_unchecked(n, n, values);
    if symmetric {
        let half = T::lit(0.5);
        for i in 0..n {
            for j in 0..i {
                let avg = (transition.get(i, j) + transition.get(j, i)) * half;
                transition.set(i, j, avg);
                transition.set(j, i, avg);
            }
        }
    }
    let final_residual = max_residual(&transition);
    let converged = residual <= tol && final_residual <= tol;
    if !converged {
        log::warn!(
            "Sinkhorn-Knopp stopped after {iterations} iterations with residual {final_residual}"
        );
    }
    Ok(SinkhornResult {
        transition,
        row_scaling: r,
        col_scaling: c,
        iterations,
        max_residual: final_residual,
        converged,
    })
}

/// `M* = T_docs · M · T_keys`, with entries below [`SMOOTHED_ZERO_CLAMP`]
/// set to zero.
pub fn smooth_matrix<T: Scalar>(
    m: &SparseBinaryMatrix,
    t_docs: &DenseMatrix<T>,
    t_keys: &DenseMatrix<T>,
) -> Result<DenseMatrix<T>> {
    let (n, k) = (m.n_rows(), m.n_cols());
    if t_docs.shape() != (n, n) || t_keys.shape() != (k, k) {
        return Err(Error::invalid(format!(
            "transition shapes {:?} and {:?} do not fit a {n}x{k} matrix",
            t_docs.shape(),
            t_keys.shape()
        )));
    }
    // M · T_keys: each document row is the sum of its keywords' transition rows.
    let right: Vec<Vec<T>> = (0..n)
        .into_par_iter()
        .map(|i| {
            let mut acc = vec![T::zero(); k];
            for &l in m.row(i) {
                for (a, &t) in acc.iter_mut().zip(t_keys.row(l)) {
                    *a += t;
                }
            }
            acc
        })
        .collect();
    let clamp = T::lit(SMOOTHED_ZERO_CLAMP);
    let rows: Vec<Vec<T>> = (0..n)
        .into_par_iter()
        .map(|i| {
            let mut acc = vec![T::zero(); k];
            for (row, &w) in right.iter().zip(t_docs.row(i)) {
                if w > T::zero() {
                    for (a, &v) in acc.iter_mut().zip(row) {
                        *a += w * v;
                    }
                }
            }
            for a in acc.iter_mut() {
                if *a < clamp {
                    *a = T::zero();
                }
            }
            acc
        })
        .collect();
    Ok(DenseMatrix::from_vec_unchecked(n, k, rows.concat()))
}

#[derive(Clone, Copy, Debug)]
pub struct SmoothingConfig {
    pub tol: f64,
    pub max_iters: usize,
}

impl Default for SmoothingConfig {
    fn default() -> Self {
        Self {
            tol: DEFAULT_SINKHORN_TOL,
            max_iters: DEFAULT_SINKHORN_MAX_ITERS,
        }
    }
}

#[derive(Clone, Debug)]
pub struct Smoothed<T> {
    pub matrix: DenseMatrix<T>,
    pub docs: SinkhornResult<T>,
    pub keys: SinkhornResult<T>,
}

/// Full smoothing chain: similarities, transitions, two-sided product.
pub fn smooth<T: Scalar>(m: &SparseBinaryMatrix, cfg: &SmoothingConfig) -> Result<Smoothed<T>> {
    let tol = T::lit(cfg.tol);
    let docs = sinkhorn_knopp(&document_similarity::<T>(m)?, tol, cfg.max_iters)?;
    let keys = sinkhorn_knopp(&keyword_similarity::<T>(m)?, tol, cfg.max_iters)?;
    let matrix = smooth_matrix(m, &docs.transition, &keys.transition)?;
    Ok(Smoothed { matrix, docs, keys })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn sparse(rows: &[&[u8]]) -> SparseBinaryMatrix {
        let entries = rows.iter().enumerate().flat_map(|(i, r)| {
            r.iter()
                .enumerate()
                .filter(|(_, &v)| v == 1)
                .map(move |(j, _)| (i, j))
        });
        SparseBinaryMatrix::from_entries(rows.len(), rows[0].len(), entries).unwrap()
    }

    fn dense(rows: &[&[f64]]) -> DenseMatrix<f64> {
        DenseMatrix::from_rows(&rows.iter().map(|r| r.to_vec()).collect::<Vec<_>>()).unwrap()
    }

    #[test]
    fn document_similarity_hand_value() {
        let s: DenseMatrix<f64> = document_similarity(&sparse(&[&[1, 1, 0], &[1, 0, 1]])).unwrap();
        assert_abs_diff_eq!(s.get(0, 1), 1.0 / 3.0, epsilon = 1e-12);
        assert_abs_diff_eq!(s.get(1, 0), 1.0 / 3.0, epsilon = 1e-12);
        assert_eq!(s.get(0, 0), 1.0);
    }

    #[test]
    fn identical_and_disjoint_documents() {
        let s: DenseMatrix<f64> =
            document_similarity(&sparse(&[&[1, 1, 0, 0], &[1, 1, 0, 0], &[0, 0, 1, 1]])).unwrap();
        assert_abs_diff_eq!(s.get(0, 1), 1.0, epsilon = 1e-12);
        assert_eq!(s.get(0, 2), 0.0);
    }

    #[test]
    fn keyword_similarity_hand_value() {
        let s: DenseMatrix<f64> = keyword_similarity(&sparse(&[&[1, 1], &[1, 0]])).unwrap();
        assert_abs_diff_eq!(s.get(0, 1), 1.0 / 3f64.sqrt(), epsilon = 1e-12);
        assert_eq!(s.get(1, 1), 1.0);
    }

    #[test]
    fn keywords_never_co_occurring() {
        let s: DenseMatrix<f64> = keyword_similarity(&sparse(&[&[1, 0], &[0, 1]])).unwrap();
        assert_eq!(s.get(0, 1), 0.0);
        assert_eq!(s.get(0, 0), 1.0);
    }

    #[test]
    fn zero_marginals_are_rejected() {
        let m = SparseBinaryMatrix::from_entries(2, 3, [(0, 0), (1, 1)]).unwrap();
        assert!(matches!(document_similarity::<f64>(&m), Err(Error::DivisionByZero(_))));
        let m = SparseBinaryMatrix::from_entries(3, 2, [(0, 0), (1, 1)]).unwrap();
        assert!(matches!(keyword_similarity::<f64>(&m), Err(Error::DivisionByZero(_))));
    }

    #[test]
    fn sinkhorn_uniform() {
        let res = sinkhorn_knopp(&dense(&[&[1.0, 1.0], &[1.0, 1.0]]), 1e-12, 100).unwrap();
        for v in res.transition.values() {
            assert_abs_diff_eq!(*v, 0.5, epsilon = 1e-12);
        }
    }

    #[test]
    fn sinkhorn_two_by_two() {
        let res = sinkhorn_knopp(&dense(&[&[2.0, 1.0], &[1.0, 2.0]]), 1e-12, 10_000).unwrap();
        let t = &res.transition;
        assert!(res.converged);
        assert_abs_diff_eq!(t.get(0, 0), 2.0 / 3.0, epsilon = 1e-9);
        assert_abs_diff_eq!(t.get(0, 1), 1.0 / 3.0, epsilon = 1e-9);
        assert_abs_diff_eq!(t.get(1, 1), 2.0 / 3.0, epsilon = 1e-9);
    }

    #[test]
    fn sinkhorn_identity_is_fixed_point() {
        let res = sinkhorn_knopp(&DenseMatrix::<f64>::identity(4), 1e-12, 10).unwrap();
        assert_eq!(res.transition, DenseMatrix::identity(4));
        assert_eq!(res.iterations, 1);
    }

    #[test]
    fn sinkhorn_rejects_non_square() {
        assert!(sinkhorn_knopp(&DenseMatrix::<f64>::zeros(2, 3), 1e-8, 10).is_err());
    }

    #[test]
    fn sinkhorn_reports_non_convergence() {
        let s = dense(&[&[1.0, 5.0, 0.1], &[5.0, 1.0, 2.0], &[0.1, 2.0, 3.0]]);
        let res = sinkhorn_knopp(&s, 1e-300, 3).unwrap();
        assert!(!res.converged);
        assert_eq!(res.iterations, 3);
        assert!(res.max_residual > 0.0);
    }

    #[test]
    fn identity_transitions_leave_matrix_unchanged() {
        let m = sparse(&[&[1, 0, 1], &[0, 1, 0]]);
        let out = smooth_matrix(&m, &DenseMatrix::<f64>::identity(2), &DenseMatrix::identity(3))
            .unwrap();
        assert_eq!(out, m.to_dense());
    }

    #[test]
    fn smoothing_shape_mismatch() {
        let m = sparse(&[&[1, 0, 1], &[0, 1, 0]]);
        assert!(smooth_matrix(&m, &DenseMatrix::<f64>::identity(3), &DenseMatrix::identity(3))
            .is_err());
    }

    #[test]
    fn f32_smoothing_preserves_mass() {
        let m = sparse(&[&[1, 1, 0, 0], &[0, 1, 1, 0], &[0, 0, 1, 1], &[1, 0, 0, 1]]);
        let out: Smoothed<f32> = smooth(&m, &SmoothingConfig { tol: 1e-6, max_iters: 10_000 })
            .unwrap();
        assert!((out.matrix.sum() - 8.0).abs() < 1e-4);
    }
}
