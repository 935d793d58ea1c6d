//! Labelled checkerboard benchmark.
//!
//! Rows and columns are cut into contiguous, near-equal blocks. Each tile
//! (row block × column block) is filled with probability `alpha`; a filled
//! tile draws its own rate uniformly from `[0, beta]` and sets each cell to 1
//! with that rate. Expected density is `alpha * beta / 2`.
//!
//! Randomness is SplitMix64. A selection stream seeded with `seed` visits the
//! tiles in row-major order and, per tile, draws the fill decision, then (for
//! filled tiles) the tile rate and the seed of that tile's cell stream. Cell
//! streams visit the tile's cells in row-major order, one draw per cell.
//! Uniform reals are `(u64 >> 11) * 2^-53`.

use rand::RngCore;
use rand::seq::SliceRandom;
use rand_xoshiro::SplitMix64;
use rand::SeedableRng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::SparseBinaryMatrix;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub struct CheckerboardSpec {
    pub n_x: usize,
    pub n_y: usize,
    pub k_x: usize,
    pub k_y: usize,
    /// Probability that a tile is filled at all.
    pub alpha: f64,
    /// Upper bound of the per-tile fill rate.
    pub beta: f64,
    pub seed: u64,
    /// Randomly permute rows and columns (labels follow).
    #[serde(default)]
    pub shuffle: bool,
}

impl CheckerboardSpec {
    pub fn square(n: usize, k: usize, alpha: f64, beta: f64, seed: u64) -> Self {
        Self {
            n_x: n,
            n_y: n,
            k_x: k,
            k_y: k,
            alpha,
            beta,
            seed,
            shuffle: false,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.k_x == 0 || self.k_y == 0 || self.k_x > self.n_x || self.k_y > self.n_y {
            return Err(Error::invalid(format!(
                "need 1 <= k <= n on both axes, got k_x={} n_x={} k_y={} n_y={}",
                self.k_x, self.n_x, self.k_y, self.n_y
            )));
        }
        for (name, v) in [("alpha", self.alpha), ("beta", self.beta)] {
            if !(0.0..=1.0).contains(&v) {
                return Err(Error::invalid(format!("{name} = {v} outside [0, 1]")));
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct LabeledDataset {
    pub matrix: SparseBinaryMatrix,
    pub row_labels: Vec<usize>,
    pub col_labels: Vec<usize>,
    /// Realized fill rate per tile, `k_x × k_y` row-major; zero when unfilled.
    pub tile_rates: Vec<f64>,
    pub empty_rows: Vec<usize>,
    pub empty_cols: Vec<usize>,
}

impl LabeledDataset {
    pub fn fill_rate(&self) -> f64 {
        self.matrix.nnz() as f64 / (self.matrix.n_rows() * self.matrix.n_cols()) as f64
    }

    /// Drops all-zero rows and columns (repeatedly) along with their labels.
    pub fn without_empty(&self) -> LabeledDataset {
        let (matrix, rows, cols) = self.matrix.drop_empty();
        LabeledDataset {
            matrix,
            row_labels: rows.iter().map(|&i| self.row_labels[i]).collect(),
            col_labels: cols.iter().map(|&j| self.col_labels[j]).collect(),
            tile_rates: self.tile_rates.clone(),
            empty_rows: Vec::new(),
            empty_cols: Vec::new(),
        }
    }
}

/// Block label of every item: `k` contiguous blocks whose sizes differ by
/// at most one, larger blocks first.
pub fn block_labels(n: usize, k: usize) -> Vec<usize> {
    let (base, extra) = (n / k, n % k);
    (0..k)
        .flat_map(|b| std::iter::repeat_n(b, base + usize::from(b < extra)))
        .collect()
}

#[inline]
fn uniform(rng: &mut SplitMix64) -> f64 {
    (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

pub fn generate_checkerboard(spec: &CheckerboardSpec) -> Result<LabeledDataset> {
    generate(spec, false)
}

/// Test hook: every filled tile uses `beta` itself as its rate.
#[doc(hidden)]
pub fn generate_checkerboard_max_rate(spec: &CheckerboardSpec) -> Result<LabeledDataset> {
    generate(spec, true)
}

fn generate(spec: &CheckerboardSpec, force_max_rate: bool) -> Result<LabeledDataset> {
    spec.validate()?;
    let row_labels = block_labels(spec.n_x, spec.k_x);
    let col_labels = block_labels(spec.n_y, spec.k_y);
    let row_start = block_starts(&row_labels, spec.k_x);
    let col_start = block_starts(&col_labels, spec.k_y);

    let mut selection = SplitMix64::seed_from_u64(spec.seed);
    let mut tile_rates = vec![0.0; spec.k_x * spec.k_y];
    let mut entries = Vec::new();
    for a in 0..spec.k_x {
        for b in 0..spec.k_y {
            if uniform(&mut selection) >= spec.alpha {
                continue;
            }
            let drawn = uniform(&mut selection) * spec.beta;
            let rate = if force_max_rate { spec.beta } else { drawn };
            let mut cells = SplitMix64::seed_from_u64(selection.next_u64());
            tile_rates[a * spec.k_y + b] = rate;
            for i in row_start[a]..row_start[a + 1] {
                for j in col_start[b]..col_start[b + 1] {
                    if uniform(&mut cells) < rate {
                        entries.push((i, j));
                    }
                }
            }
        }
    }

    let (mut row_labels, mut col_labels) = (row_labels, col_labels);
    if spec.shuffle {
        let mut rng = SplitMix64::seed_from_u64(spec.seed ^ 0x5348_5546_464c_4521);
        let mut row_perm: Vec<usize> = (0..spec.n_x).collect();
        let mut col_perm: Vec<usize> = (0..spec.n_y).collect();
        row_perm.shuffle(&mut rng);
        col_perm.shuffle(&mut rng);
        // item i moves to position perm[i]
        for e in entries.iter_mut() {
            *e = (row_perm[e.0], col_perm[e.1]);
        }
        row_labels = permute(&row_labels, &row_perm);
        col_labels = permute(&col_labels, &col_perm);
    }

    let matrix = SparseBinaryMatrix::from_entries(spec.n_x, spec.n_y, entries)?;
    let empty_rows = matrix.empty_rows();
    let empty_cols = matrix.empty_cols();
    if !empty_rows.is_empty() || !empty_cols.is_empty() {
        log::debug!(
            "checkerboard seed {}: {} empty row(s), {} empty column(s)",
            spec.seed,
            empty_rows.len(),
            empty_cols.len()
        );
    }
    Ok(LabeledDataset {
        matrix,
        row_labels,
        col_labels,
        tile_rates,
        empty_rows,
        empty_cols,
    })
}

fn block_starts(labels: &[usize], k: usize) -> Vec<usize> {
    let mut starts = vec![0; k + 1];
    for &l in labels {
        starts[l + 1] += 1;
    }
    for b in 0..k {
        starts[b + 1] += starts[b];
    }
    starts
}

fn permute(labels: &[usize], perm: &[usize]) -> Vec<usize> {
    let mut out = vec![0; labels.len()];
    for (i, &p) in perm.iter().enumerate() {
        out[p] = labels[i];
    }
    out
}
