//! Spectral co-clustering baseline.
//!
//! `M_n = D1^-1/2 M D2^-1/2` is decomposed by SVD. Rows of `D1^-1/2 U` and
//! `D2^-1/2 V`, restricted to singular dimensions `1..=l` with
//! `l = ceil(log2 k)` (dimension 0 is skipped), are stacked and clustered
//! jointly by k-means, so row and column partitions share cluster ids.

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_xoshiro::Xoshiro256PlusPlus;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::SparseBinaryMatrix;
use crate::partition::Partition;

pub const DEFAULT_KMEANS_RESTARTS: usize = 10;
pub const DEFAULT_KMEANS_MAX_ITERS: usize = 300;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub struct SpectralConfig {
    pub k: usize,
    pub kmeans_restarts: usize,
    pub kmeans_max_iters: usize,
    pub seed: u64,
}

impl SpectralConfig {
    pub fn new(k: usize, seed: u64) -> Self {
        Self {
            k,
            kmeans_restarts: DEFAULT_KMEANS_RESTARTS,
            kmeans_max_iters: DEFAULT_KMEANS_MAX_ITERS,
            seed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.k < 2 {
            return Err(Error::invalid(format!("spectral k must be >= 2, got {}", self.k)));
        }
        if self.kmeans_restarts == 0 || self.kmeans_max_iters == 0 {
            return Err(Error::invalid("k-means needs at least one restart and one iteration"));
        }
        Ok(())
    }
}

/// Number of singular dimensions fed to k-means.
pub fn embedding_dims(k: usize) -> usize {
    (usize::BITS - (k.max(2) - 1).leading_zeros()) as usize
}

#[derive(Clone, Debug, PartialEq)]
pub struct SpectralResult {
    pub rows: Partition,
    pub cols: Partition,
    /// Singular dimensions used, 0-based, first one skipped.
    pub dims: Vec<usize>,
    pub singular_values: Vec<f64>,
    pub inertia: f64,
}

pub fn spectral_cocluster(
    m: &SparseBinaryMatrix,
    cfg: &SpectralConfig,
) -> Result<(Partition, Partition)> {
    spectral_cocluster_detailed(m, cfg).map(|r| (r.rows, r.cols))
}

pub fn spectral_cocluster_detailed(
    m: &SparseBinaryMatrix,
    cfg: &SpectralConfig,
) -> Result<SpectralResult> {
    cfg.validate()?;
    let (n_rows, n_cols) = (m.n_rows(), m.n_cols());
    if !m.empty_rows().is_empty() || !m.empty_cols().is_empty() {
        return Err(Error::invalid(
            "spectral co-clustering needs every row and column to have a nonzero",
        ));
    }
    if cfg.k > n_rows + n_cols {
        return Err(Error::invalid(format!(
            "k = {} exceeds the {} items to cluster",
            cfg.k,
            n_rows + n_cols
        )));
    }
    let d1: Vec<f64> = m.row_sums().iter().map(|&s| 1.0 / (s as f64).sqrt()).collect();
    let d2: Vec<f64> = m.col_sums().iter().map(|&s| 1.0 / (s as f64).sqrt()).collect();
    let mut mn = DMatrix::<f64>::zeros(n_rows, n_cols);
    for (i, j) in m.entries() {
        mn[(i, j)] = d1[i] * d2[j];
    }
    let svd = nalgebra::SVD::try_new(mn, true, true, 1e-14, 0)
        .ok_or_else(|| Error::NumericalFailure("SVD did not converge".into()))?;
    let u = svd.u.as_ref().expect("U requested");
    let v_t = svd.v_t.as_ref().expect("V requested");

    let available = n_rows.min(n_cols);
    let dims: Vec<usize> = (1..=embedding_dims(cfg.k)).filter(|&d| d < available).collect();
    if dims.is_empty() {
        return Err(Error::invalid("matrix too small for a spectral embedding"));
    }
    let width = dims.len();
    // singular vector pairs are defined up to a joint sign flip
    let signs: Vec<f64> = dims
        .iter()
        .map(|&d| {
            let entries = (0..n_rows).map(|i| u[(i, d)]).chain((0..n_cols).map(|j| v_t[(d, j)]));
            let skew: f64 = entries.clone().map(|x| x * x * x).sum();
            let peak = entries.fold(0.0f64, |a, x| if x.abs() > a.abs() { x } else { a });
            let key = if skew.abs() > 1e-9 { skew } else { peak };
            if key < 0.0 { -1.0 } else { 1.0 }
        })
        .collect();
    let mut z = Vec::with_capacity((n_rows + n_cols) * width);
    for i in 0..n_rows {
        z.extend(dims.iter().zip(&signs).map(|(&d, s)| s * d1[i] * u[(i, d)]));
    }
    for j in 0..n_cols {
        z.extend(dims.iter().zip(&signs).map(|(&d, s)| s * d2[j] * v_t[(d, j)]));
    }

    // k-means sees the points in coordinate order, so the input order of
    // rows and columns does not matter
    let n_points = n_rows + n_cols;
    let point = |i: usize| &z[i * width..(i + 1) * width];
    let grid = |x: f64| (x * 1e9).round();
    let mut order: Vec<usize> = (0..n_points).collect();
    order.sort_by(|&a, &b| {
        let (pa, pb) = (point(a), point(b));
        pa.iter()
            .zip(pb)
            .map(|(x, y)| grid(*x).total_cmp(&grid(*y)))
            .find(|o| o.is_ne())
            .or_else(|| pa.iter().zip(pb).map(|(x, y)| x.total_cmp(y)).find(|o| o.is_ne()))
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    let sorted: Vec<f64> = order.iter().flat_map(|&i| point(i).iter().copied()).collect();
    let fit = kmeans(&sorted, width, cfg)?;
    let mut labels = vec![0; n_points];
    for (pos, &i) in order.iter().enumerate() {
        labels[i] = fit.labels[pos];
    }
    Ok(SpectralResult {
        rows: Partition::from_labels(&labels[..n_rows])?,
        cols: Partition::from_labels(&labels[n_rows..])?,
        dims,
        singular_values: svd.singular_values.iter().copied().collect(),
        inertia: fit.inertia,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct KMeansFit {
    pub labels: Vec<usize>,
    pub centroids: Vec<f64>,
    pub inertia: f64,
}

/// Lloyd's k-means with k-means++ seeding on `points` (row-major,
/// `width` columns). Restarts are independent streams derived from the seed;
/// the lowest inertia wins, earliest restart on ties.
pub fn kmeans(points: &[f64], width: usize, cfg: &SpectralConfig) -> Result<KMeansFit> {
    cfg.validate()?;
    if width == 0 || !points.len().is_multiple_of(width) {
        return Err(Error::invalid("point buffer does not match the dimension"));
    }
    let n = points.len() / width;
    if n < cfg.k {
        return Err(Error::invalid(format!("{n} points cannot form {} clusters", cfg.k)));
    }
    let fits: Vec<KMeansFit> = (0..cfg.kmeans_restarts)
        .into_par_iter()
        .map(|restart| {
            let mut rng = Xoshiro256PlusPlus::seed_from_u64(cfg.seed);
            for _ in 0..restart {
                rng.jump();
            }
            lloyd(points, width, cfg.k, cfg.kmeans_max_iters, &mut rng)
        })
        .collect();
    let mut best = 0;
    for (i, f) in fits.iter().enumerate() {
        if f.inertia < fits[best].inertia {
            best = i;
        }
    }
    Ok(fits.into_iter().nth(best).expect("at least one restart"))
}

fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

fn nearest(p: &[f64], centroids: &[f64], width: usize) -> (usize, f64) {
    let mut best = (0, f64::INFINITY);
    for (c, centroid) in centroids.chunks_exact(width).enumerate() {
        let d = sq_dist(p, centroid);
        if d < best.1 {
            best = (c, d);
        }
    }
    best
}

fn plus_plus_seeds(points: &[f64], width: usize, k: usize, rng: &mut impl Rng) -> Vec<f64> {
    let n = points.len() / width;
    let point = |i: usize| &points[i * width..(i + 1) * width];
    let first = rng.random_range(0..n);
    let mut centroids = point(first).to_vec();
    let mut d2: Vec<f64> = (0..n).map(|i| sq_dist(point(i), point(first))).collect();
    while centroids.len() < k * width {
        let total: f64 = d2.iter().sum();
        let pick = if total > 0.0 {
            let mut target = rng.random::<f64>() * total;
            let mut chosen = n - 1;
            for (i, &d) in d2.iter().enumerate() {
                if target < d {
                    chosen = i;
                    break;
                }
                target -= d;
            }
            chosen
        } else {
            rng.random_range(0..n)
        };
        centroids.extend_from_slice(point(pick));
        for (i, d) in d2.iter_mut().enumerate() {
            *d = d.min(sq_dist(point(i), point(pick)));
        }
    }
    centroids
}

fn lloyd(points: &[f64], width: usize, k: usize, max_iters: usize, rng: &mut impl Rng) -> KMeansFit {
    let n = points.len() / width;
    let mut centroids = plus_plus_seeds(points, width, k, rng);
    let mut labels = vec![usize::MAX; n];
    for _ in 0..max_iters {
        let mut changed = false;
        for (i, p) in points.chunks_exact(width).enumerate() {
            let (c, _) = nearest(p, &centroids, width);
            if labels[i] != c {
                labels[i] = c;
                changed = true;
            }
        }
        if !changed {
            break;
        }
        let mut sums = vec![0.0; k * width];
        let mut counts = vec![0usize; k];
        for (p, &c) in points.chunks_exact(width).zip(&labels) {
            counts[c] += 1;
            for (s, x) in sums[c * width..(c + 1) * width].iter_mut().zip(p) {
                *s += x;
            }
        }
        // empty clusters keep their previous centroid
        for c in 0..k {
            if counts[c] > 0 {
                for t in 0..width {
                    centroids[c * width + t] = sums[c * width + t] / counts[c] as f64;
                }
            }
        }
    }
    let inertia = points
        .chunks_exact(width)
        .zip(&labels)
        .map(|(p, &c)| sq_dist(p, &centroids[c * width..(c + 1) * width]))
        .sum();
    KMeansFit { labels, centroids, inertia }
}
