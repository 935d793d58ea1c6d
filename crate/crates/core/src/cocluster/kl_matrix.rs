//! Cluster conditional distributions and the directed KL matrix built from
//! them.

use rayon::prelude::*;

use super::cost::{kl_merge_delta, kl_term};
use crate::aggregate::AggregatedMass;
use crate::error::{Error, Result};
use crate::matrix::DenseMatrix;
use crate::partition::ClusterId;
use crate::scalar::Scalar;

/// Distribution of a row cluster over the live column clusters (ascending id
/// order): `G[a][b] / Σ_b G[a][b]`.
pub fn row_cluster_distribution<T: Scalar>(g: &AggregatedMass<T>, a: ClusterId) -> Result<Vec<T>> {
    let total = g
        .row_total(a)
        .ok_or_else(|| Error::invalid(format!("row cluster {a} is not live")))?;
    if !(total > T::zero()) {
        return Err(Error::DegenerateCluster(a.index()));
    }
    Ok(g.col_ids()
        .into_iter()
        .map(|b| g.get(a, b).expect("live ids") / total)
        .collect())
}

/// Distribution of a column cluster over the live row clusters (ascending id
/// order): `G[a][b] / Σ_a G[a][b]`.
pub fn col_cluster_distribution<T: Scalar>(g: &AggregatedMass<T>, b: ClusterId) -> Result<Vec<T>> {
    let total = g
        .col_total(b)
        .ok_or_else(|| Error::invalid(format!("column cluster {b} is not live")))?;
    if !(total > T::zero()) {
        return Err(Error::DegenerateCluster(b.index()));
    }
    Ok(g.row_ids()
        .into_iter()
        .map(|a| g.get(a, b).expect("live ids") / total)
        .collect())
}

/// Square matrix of `KL(A || B)` between the distributions of every ordered
/// pair of clusters of one axis. The diagonal is zero.
#[derive(Clone, Debug, PartialEq)]
pub struct DirectedKlMatrix<T> {
    n: usize,
    values: Vec<T>,
}

impl<T: Scalar> DirectedKlMatrix<T> {
    pub(crate) fn zeros(n: usize) -> Self {
        Self {
            n,
            values: vec![T::zero(); n * n],
        }
    }

    /// Full computation from one distribution per row of `dists`.
    pub fn from_distributions(dists: &DenseMatrix<T>) -> Self {
        let n = dists.n_rows();
        let rows: Vec<Vec<T>> = (0..n)
            .into_par_iter()
            .map(|a| {
                (0..n)
                    .map(|b| {
                        if a == b {
                            T::zero()
                        } else {
                            dists
                                .row(a)
                                .iter()
                                .zip(dists.row(b))
                                .fold(T::zero(), |acc, (&x, &y)| acc + kl_term(x, y))
                        }
                    })
                    .collect()
            })
            .collect();
        Self {
            n,
            values: rows.concat(),
        }
    }

    pub fn size(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, a: usize, b: usize) -> T {
        self.values[a * self.n + b]
    }

    #[inline]
    pub(crate) fn set(&mut self, a: usize, b: usize, v: T) {
        self.values[a * self.n + b] = v;
    }

    pub(crate) fn row(&self, a: usize) -> &[T] {
        &self.values[a * self.n..(a + 1) * self.n]
    }

    pub(crate) fn values_mut(&mut self) -> &mut [T] {
        &mut self.values
    }
}

/// Updates every entry for the merge of features `i` and `j`, where row `a`
/// of `dists` is cluster `a`'s distribution before the merge.
pub fn incremental_kl_update<T: Scalar>(
    kl: &DirectedKlMatrix<T>,
    dists: &DenseMatrix<T>,
    i: usize,
    j: usize,
) -> Result<DirectedKlMatrix<T>> {
    let n_features = dists.n_cols();
    if i == j || i >= n_features || j >= n_features {
        return Err(Error::invalid(format!(
            "cannot merge features {i} and {j} of {n_features}"
        )));
    }
    if dists.n_rows() != kl.size() {
        return Err(Error::invalid(format!(
            "{} distributions for a {}x{} KL matrix",
            dists.n_rows(),
            kl.size(),
            kl.size()
        )));
    }
    let mut out = kl.clone();
    for a in 0..kl.size() {
        for b in 0..kl.size() {
            if a != b {
                let (ra, rb) = (dists.row(a), dists.row(b));
                let delta = kl_merge_delta(ra[i], ra[j], rb[i], rb[j]);
                out.set(a, b, kl.get(a, b) + delta);
            }
        }
    }
    Ok(out)
}
