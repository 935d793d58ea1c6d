//! Independent reference implementations used by the integration tests.
#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_xoshiro::Xoshiro256PlusPlus;
use tagclust::{Axis, CoclusterConfig, CostMode, Coupling, DenseMatrix, Engine, SparseBinaryMatrix};

pub fn rng(seed: u64) -> Xoshiro256PlusPlus {
    Xoshiro256PlusPlus::seed_from_u64(seed)
}

/// Strictly positive random matrix.
pub fn positive_matrix(r: &mut impl Rng, n: usize, m: usize) -> DenseMatrix<f64> {
    let values = (0..n * m).map(|_| r.random_range(0.01..1.0)).collect();
    DenseMatrix::from_vec(n, m, values).unwrap()
}

/// Random matrix with roughly `zero_rate` exact zeros; every row and column
/// keeps at least one positive entry.
pub fn sparse_real_matrix(r: &mut impl Rng, n: usize, m: usize, zero_rate: f64) -> DenseMatrix<f64> {
    let mut values: Vec<f64> = (0..n * m)
        .map(|_| if r.random::<f64>() < zero_rate { 0.0 } else { r.random_range(0.01..1.0) })
        .collect();
    for i in 0..n {
        let j = i % m;
        if values[i * m + j] == 0.0 {
            values[i * m + j] = r.random_range(0.01..1.0);
        }
    }
    for j in 0..m {
        let i = j % n;
        if values[i * m + j] == 0.0 {
            values[i * m + j] = r.random_range(0.01..1.0);
        }
    }
    DenseMatrix::from_vec(n, m, values).unwrap()
}

/// Random binary matrix without empty rows or columns.
pub fn binary_matrix(r: &mut impl Rng, n: usize, m: usize, density: f64) -> SparseBinaryMatrix {
    let mut entries = Vec::new();
    for i in 0..n {
        for j in 0..m {
            if r.random::<f64>() < density || j == i % m || i == j % n {
                entries.push((i, j));
            }
        }
    }
    entries.sort_unstable();
    entries.dedup();
    SparseBinaryMatrix::from_entries(n, m, entries).unwrap()
}

/// `M*_ij = Σ_k Σ_l T_X[i][k] T_Y[l][j] M_kl`, summed term by term.
pub fn quadruple_sum_smoothing(
    m: &SparseBinaryMatrix,
    t_docs: &DenseMatrix<f64>,
    t_keys: &DenseMatrix<f64>,
) -> Vec<f64> {
    let (n, w) = (m.n_rows(), m.n_cols());
    let mut out = vec![0.0; n * w];
    for i in 0..n {
        for j in 0..w {
            let mut s = 0.0;
            for k in 0..n {
                for l in 0..w {
                    let mkl = if m.contains(k, l) { 1.0 } else { 0.0 };
                    s += t_docs.get(i, k) * t_keys.get(l, j) * mkl;
                }
            }
            out[i * w + j] = s;
        }
    }
    out
}

const EPS: f64 = 1e-12;

pub fn kl(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .filter(|(x, _)| **x > 0.0)
        .map(|(&x, &y)| x * (x.log2() - if y > 0.0 { y.log2() } else { EPS.log2() }))
        .sum()
}

fn xlogx(x: f64) -> f64 {
    if x > 0.0 {
        x * x.log2()
    } else {
        0.0
    }
}

/// Tie rule of the engine: equal up to rounding means equal.
fn cheaper(a: f64, b: f64) -> bool {
    a < b - (tagclust::cocluster::COST_TIE_REL * a.abs().max(b.abs()) + tagclust::cocluster::COST_TIE_ABS)
}

#[derive(Clone, Debug, PartialEq)]
pub struct OracleMerge {
    pub axis: Axis,
    pub lo: usize,
    pub hi: usize,
    pub new: usize,
    pub kl: f64,
    pub merge: f64,
    pub cost: f64,
    pub new_size: usize,
}

/// From-scratch engine: every round rebuilds the cluster masses and scores
/// every pair with no cached state.
pub struct BruteForce {
    m: DenseMatrix<f64>,
    mode: CostMode,
    coupling: Coupling,
    alpha: f64,
    labels: [Vec<usize>; 2],
    next: [usize; 2],
}

fn idx(axis: Axis) -> usize {
    match axis {
        Axis::Row => 0,
        Axis::Col => 1,
    }
}

impl BruteForce {
    pub fn new(m: &DenseMatrix<f64>, mode: CostMode, coupling: Coupling, alpha: f64) -> Self {
        let (n, w) = m.shape();
        Self {
            m: m.clone(),
            mode,
            coupling,
            alpha,
            labels: [(0..n).collect(), (0..w).collect()],
            next: [n, w],
        }
    }

    pub fn clusters(&self, axis: Axis) -> Vec<usize> {
        let mut ids = self.labels[idx(axis)].clone();
        ids.sort_unstable();
        ids.dedup();
        ids
    }

    fn value(&self, axis: Axis, item: usize, feature_item: usize) -> f64 {
        match axis {
            Axis::Row => self.m.get(item, feature_item),
            Axis::Col => self.m.get(feature_item, item),
        }
    }

    /// Conditional distribution of every live cluster of `axis`, by id.
    pub fn distributions(&self, axis: Axis) -> Vec<(usize, Vec<f64>)> {
        let own = &self.labels[idx(axis)];
        let other_axis = axis.other();
        let other: Vec<usize> = match self.coupling {
            Coupling::Cocluster => self.labels[idx(other_axis)].clone(),
            Coupling::Independent => (0..self.labels[idx(other_axis)].len()).collect(),
        };
        let mut features = other.clone();
        features.sort_unstable();
        features.dedup();
        self.clusters(axis)
            .into_iter()
            .map(|c| {
                let mut v = vec![0.0; features.len()];
                for (item, _) in own.iter().enumerate().filter(|(_, &l)| l == c) {
                    for (f_item, f_label) in other.iter().enumerate() {
                        let pos = features.binary_search(f_label).unwrap();
                        v[pos] += self.value(axis, item, f_item);
                    }
                }
                let total: f64 = v.iter().sum();
                (c, v.into_iter().map(|x| x / total).collect())
            })
            .collect()
    }

    fn best(&self, axis: Axis) -> Option<OracleMerge> {
        let dists = self.distributions(axis);
        let k = dists.len();
        if k < 2 {
            return None;
        }
        let n = self.labels[idx(axis)].len() as f64;
        let size = |c: usize| self.labels[idx(axis)].iter().filter(|&&l| l == c).count();
        let mut best: Option<OracleMerge> = None;
        for x in 0..k {
            for y in x + 1..k {
                let ((lo, a), (hi, b)) = (&dists[x], &dists[y]);
                let kl_j = ((1.0 - self.alpha) * kl(a, b) + self.alpha * kl(b, a)).max(0.0);
                let merge = if self.mode == CostMode::Composite && k >= 3 {
                    let (pi, pj) = (size(*lo) as f64 / n, size(*hi) as f64 / n);
                    let raw = -((xlogx(pi) + xlogx(pj)) / (k as f64).log2()
                        - xlogx(pi + pj) / ((k - 1) as f64).log2());
                    raw.max(1e-12)
                } else {
                    1.0
                };
                let cost = kl_j * merge;
                if best.as_ref().is_none_or(|b| cheaper(cost, b.cost)) {
                    best = Some(OracleMerge {
                        axis,
                        lo: *lo,
                        hi: *hi,
                        new: self.next[idx(axis)],
                        kl: kl_j,
                        merge,
                        cost,
                        new_size: size(*lo) + size(*hi),
                    });
                }
            }
        }
        best
    }

    pub fn step(&mut self) -> Option<OracleMerge> {
        let chosen = match (self.best(Axis::Row), self.best(Axis::Col)) {
            (None, None) => return None,
            (Some(r), None) => r,
            (None, Some(c)) => c,
            (Some(r), Some(c)) => {
                if cheaper(c.cost, r.cost) {
                    c
                } else {
                    r
                }
            }
        };
        let a = idx(chosen.axis);
        for l in self.labels[a].iter_mut() {
            if *l == chosen.lo || *l == chosen.hi {
                *l = chosen.new;
            }
        }
        self.next[a] += 1;
        Some(chosen)
    }
}

/// Steps the engine and the brute-force oracle side by side; returns the
/// number of merges compared and the worst KL discrepancy seen.
pub fn compare(m: &DenseMatrix<f64>, mode: CostMode, coupling: Coupling) -> (usize, f64) {
    let cfg = CoclusterConfig {
        cost_mode: mode,
        coupling,
        ..Default::default()
    };
    let mut engine = Engine::new(m, cfg).unwrap();
    let mut oracle = BruteForce::new(m, mode, coupling, 0.5);
    let mut worst: f64 = 0.0;
    let mut steps = 0;
    loop {
        for axis in [Axis::Row, Axis::Col] {
            let dists = oracle.distributions(axis);
            for (a, da) in &dists {
                for (b, db) in &dists {
                    let kept = engine
                        .directed_kl(axis, tagclust::ClusterId(*a), tagclust::ClusterId(*b))
                        .expect("oracle and engine agree on live ids");
                    let fresh = if a == b { 0.0 } else { kl(da, db) };
                    worst = worst.max((kept - fresh).abs());
                }
            }
        }
        let expected = oracle.step();
        let got = engine.step().unwrap();
        match (expected, got) {
            (None, None) => break,
            (Some(e), Some(g)) => {
                let got = OracleMerge {
                    axis: g.axis,
                    lo: g.left_id.index(),
                    hi: g.right_id.index(),
                    new: g.new_id.index(),
                    kl: g.kl_cost,
                    merge: g.merge_cost,
                    cost: g.composite_cost,
                    new_size: g.new_size,
                };
                assert_eq!(
                    (e.axis, e.lo, e.hi, e.new, e.new_size),
                    (got.axis, got.lo, got.hi, got.new, got.new_size),
                    "merge {} differs ({mode:?}, {coupling:?})",
                    steps + 1
                );
                for (x, y) in [(e.kl, got.kl), (e.merge, got.merge), (e.cost, got.cost)] {
                    assert!((x - y).abs() <= 1e-9 * x.abs().max(1.0), "{x} vs {y}");
                }
                steps += 1;
            }
            (e, g) => panic!("oracle {e:?} vs engine {g:?}"),
        }
    }
    assert!(engine.is_finished());
    (steps, worst)
}

pub fn random_instance(seed: u64) -> DenseMatrix<f64> {
    let mut r = rng(seed);
    let n = r.random_range(2..=12);
    let m = r.random_range(2..=10);
    match seed % 3 {
        0 | 1 => positive_matrix(&mut r, n, m),
        _ => {
            let b = binary_matrix(&mut r, n, m, 0.3);
            tagclust::smoothing::smooth::<f64>(&b, &Default::default())
                .unwrap()
                .matrix
        }
    }
}
