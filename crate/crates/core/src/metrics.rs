//! Information-theoretic evaluation: Shannon and partition entropies, the
//! V-measure family against ground-truth labels, and the mutual information
//! of a row/column co-partition. All logarithms are base 2.

use std::collections::HashMap;

use rayon::prelude::*;

use crate::aggregate::AggregatedMass;
use crate::error::{Error, Result};
use crate::partition::Partition;
use crate::scalar::{ordered_sum, Scalar};

const DISTRIBUTION_TOL: f64 = 1e-9;

pub(crate) fn check_distribution<T: Scalar>(p: &[T]) -> Result<()> {
    if p.iter().any(|&x| x < T::zero() || !x.is_finite()) {
        return Err(Error::invalid("distribution has negative or non-finite entries"));
    }
    let total: T = p.iter().copied().sum();
    if (total - T::one()).abs() > T::lit(DISTRIBUTION_TOL) {
        return Err(Error::invalid(format!("distribution sums to {total}, expected 1")));
    }
    Ok(())
}

/// `-Σ p log2 p`, with `0 log 0 = 0`.
pub fn shannon_entropy<T: Scalar>(p: &[T]) -> Result<T> {
    check_distribution(p)?;
    Ok(-p.iter().map(|&x| x.xlog2x()).sum::<T>())
}

/// Partition entropy of cluster sizes, ignoring clusters of size `<= r`,
/// normalized by `log2` of the total cluster count.
pub fn restricted_entropy_of_sizes<T: Scalar>(sizes: &[usize], r: usize) -> Result<T> {
    let k = sizes.len();
    if k < 2 {
        return Err(Error::UndefinedEntropy(k));
    }
    let n = T::from_count(sizes.iter().sum());
    let h: T = sizes
        .iter()
        .filter(|&&s| s > r)
        .map(|&s| (T::from_count(s) / n).xlog2x())
        .sum();
    let rel = -h / T::from_count(k).log2();
    Ok(rel.max(T::zero()).min(T::one()))
}

/// `H(C) / log2 |C|` with size-based cluster probabilities.
pub fn relative_partition_entropy<T: Scalar>(p: &Partition) -> Result<T> {
    restricted_partition_entropy(p, 0)
}

/// Relative partition entropy counting only clusters with more than `r`
/// items; smaller clusters are treated as outliers.
pub fn restricted_partition_entropy<T: Scalar>(p: &Partition, r: usize) -> Result<T> {
    let sizes: Vec<usize> = p.cluster_sizes().map(|(_, s)| s).collect();
    restricted_entropy_of_sizes(&sizes, r)
}

/// Ground-truth classes against predicted clusters, summarized by their
/// contingency table.
#[derive(Clone, Debug)]
pub struct LabeledPartitionPair {
    n_items: usize,
    class_counts: Vec<usize>,
    cluster_counts: Vec<usize>,
    /// `(class, cluster) -> joint count`, dense-indexed.
    contingency: HashMap<(usize, usize), usize>,
}

impl LabeledPartitionPair {
    pub fn new(true_labels: &[usize], predicted: &[usize]) -> Result<Self> {
        if true_labels.len() != predicted.len() {
            return Err(Error::invalid(format!(
                "{} true labels but {} predicted labels",
                true_labels.len(),
                predicted.len()
            )));
        }
        if true_labels.is_empty() {
            return Err(Error::invalid("empty labelling"));
        }
        let classes = densify(true_labels);
        let clusters = densify(predicted);
        let mut class_counts = vec![0; classes.iter().max().map_or(0, |m| m + 1)];
        let mut cluster_counts = vec![0; clusters.iter().max().map_or(0, |m| m + 1)];
        let mut contingency = HashMap::new();
        for (&l, &k) in classes.iter().zip(&clusters) {
            class_counts[l] += 1;
            cluster_counts[k] += 1;
            *contingency.entry((l, k)).or_insert(0) += 1;
        }
        Ok(Self {
            n_items: true_labels.len(),
            class_counts,
            cluster_counts,
            contingency,
        })
    }

    pub fn n_items(&self) -> usize {
        self.n_items
    }

    pub fn n_classes(&self) -> usize {
        self.class_counts.len()
    }

    pub fn n_clusters(&self) -> usize {
        self.cluster_counts.len()
    }

    fn count_entropy(&self, counts: &[usize]) -> f64 {
        let n = self.n_items as f64;
        -counts.iter().map(|&c| (c as f64 / n).xlog2x()).sum::<f64>()
    }

    /// `H(L | K)` when `given_cluster`, `H(K | L)` otherwise.
    fn conditional_entropy(&self, given_cluster: bool) -> f64 {
        let n = self.n_items as f64;
        let mut cells: Vec<_> = self.contingency.iter().collect();
        cells.sort_unstable_by_key(|(key, _)| **key);
        -cells
            .into_iter()
            .map(|(&(l, k), &c)| {
                let marginal = if given_cluster {
                    self.cluster_counts[k]
                } else {
                    self.class_counts[l]
                };
                let c = c as f64;
                c / n * (c / marginal as f64).log2()
            })
            .sum::<f64>()
    }

    pub fn homogeneity(&self) -> f64 {
        let h_classes = self.count_entropy(&self.class_counts);
        if h_classes <= 0.0 {
            return 1.0;
        }
        (1.0 - self.conditional_entropy(true) / h_classes).clamp(0.0, 1.0)
    }

    pub fn completeness(&self) -> f64 {
        let h_clusters = self.count_entropy(&self.cluster_counts);
        if h_clusters <= 0.0 {
            return 1.0;
        }
        (1.0 - self.conditional_entropy(false) / h_clusters).clamp(0.0, 1.0)
    }

    /// `(1 + β) h c / (β h + c)`; zero when `h = c = 0`.
    pub fn v_measure(&self, beta: f64) -> Result<f64> {
        if !(beta >= 0.0) || !beta.is_finite() {
            return Err(Error::invalid(format!("beta must be a nonnegative number, got {beta}")));
        }
        let (h, c) = (self.homogeneity(), self.completeness());
        let denom = beta * h + c;
        Ok(if denom <= 0.0 { 0.0 } else { (1.0 + beta) * h * c / denom })
    }

    pub fn scores(&self) -> VMeasure {
        VMeasure {
            homogeneity: self.homogeneity(),
            completeness: self.completeness(),
            v_measure: self.v_measure(1.0).expect("beta = 1 is valid"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct VMeasure {
    pub homogeneity: f64,
    pub completeness: f64,
    pub v_measure: f64,
}

/// Homogeneity, completeness and balanced V-measure in one call.
pub fn v_measure(true_labels: &[usize], predicted: &[usize]) -> Result<VMeasure> {
    Ok(LabeledPartitionPair::new(true_labels, predicted)?.scores())
}

fn densify(labels: &[usize]) -> Vec<usize> {
    let mut map = HashMap::new();
    labels
        .iter()
        .map(|&l| {
            let next = map.len();
            *map.entry(l).or_insert(next)
        })
        .collect()
}

/// `I = H(X) + H(Y) - H(X, Y)` of the joint distribution `G / total_mass`.
pub fn mutual_information<T: Scalar>(g: &AggregatedMass<T>) -> Result<T> {
    let total = g.total_mass();
    if !(total > T::zero()) {
        return Err(Error::invalid("mutual information of a zero-mass matrix"));
    }
    let rows = g.live_row_slots();
    let cols = g.live_col_slots();
    let h_x = -ordered_sum(
        &rows
            .iter()
            .map(|&r| (g.row_total_at(r) / total).xlog2x())
            .collect::<Vec<_>>(),
    );
    let h_y = -ordered_sum(
        &cols
            .iter()
            .map(|&c| (g.col_total_at(c) / total).xlog2x())
            .collect::<Vec<_>>(),
    );
    let per_row: Vec<T> = rows
        .par_iter()
        .map(|&r| {
            let row = g.row_slot(r);
            cols.iter().fold(T::zero(), |acc, &c| acc + (row[c] / total).xlog2x())
        })
        .collect();
    let h_xy = -ordered_sum(&per_row);
    Ok((h_x + h_y - h_xy).max(T::zero()))
}
