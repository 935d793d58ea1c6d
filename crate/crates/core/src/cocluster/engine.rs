//! Greedy agglomeration over both axes.
//!
//! Every round scores all live same-axis pairs on both axes with
//! `KL^J × Merge`, merges the cheapest pair, and updates the two KL
//! matrices: the merged axis gets one fresh row and column, the opposite
//! axis sees two of its features collapse into one and is patched pair by
//! pair in `O(k²)`.
//!
//! Each axis caches its cluster distributions `d`, their floored base-2 logs
//! `l` and the self terms `Σ d log d`, so that
//! `KL(A || B) = self_A - Σ a_c l_B[c]` and the merge delta of two features
//! only touches two coordinates.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::cost::{blend, check_alpha, log2_floor, size_cost_from_terms, MERGE_COST_FLOOR};
use super::kl_matrix::{DirectedKlMatrix, col_cluster_distribution, row_cluster_distribution};
use crate::aggregate::AggregatedMass;
use crate::dendrogram::{Axis, Dendrogram, MergeRecord, StepTrace};
use crate::error::{Error, Result};
use crate::matrix::DenseMatrix;
use crate::metrics::{mutual_information, restricted_entropy_of_sizes};
use crate::partition::{ClusterId, Partition};
use crate::scalar::Scalar;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CostMode {
    /// `KL^J × Merge`.
    #[default]
    Composite,
    /// `KL^J` alone.
    KlOnly,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Coupling {
    /// Distributions are taken over the opposite axis's current clusters.
    #[default]
    Cocluster,
    /// Distributions are always taken over the opposite axis's items.
    Independent,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub struct CoclusterConfig {
    pub cost_mode: CostMode,
    pub coupling: Coupling,
    /// Balance of the J-symmetrized KL divergence.
    pub alpha: f64,
    pub trace_metrics: bool,
    /// Record metrics every `trace_stride` merges (and after the last one).
    pub trace_stride: usize,
    /// Clusters of at most this many items are ignored by the restricted
    /// partition entropy in the trace.
    pub restricted_r: usize,
}

impl Default for CoclusterConfig {
    fn default() -> Self {
        Self {
            cost_mode: CostMode::Composite,
            coupling: Coupling::Cocluster,
            alpha: 0.5,
            trace_metrics: true,
            trace_stride: 1,
            restricted_r: 1,
        }
    }
}

struct AxisState<T> {
    /// `kl[s][t] = KL(d_s || d_t)`, slot indexed.
    kl: DirectedKlMatrix<T>,
    /// Transpose of `kl`, kept so both directions of a pair are read along rows.
    kl_t: DirectedKlMatrix<T>,
    dist: Vec<T>,
    logs: Vec<T>,
    self_term: Vec<T>,
    width: usize,
    /// `(s / n) log2(s / n)` for every cluster size `s`.
    size_terms: Vec<T>,
    slot_ids: Vec<usize>,
    sizes: Vec<usize>,
    live: Vec<usize>,
}

#[derive(Clone, Copy, Debug)]
struct Candidate<T> {
    cost: T,
    kl: T,
    merge: T,
    floored: bool,
    lo: usize,
    hi: usize,
    slot_lo: usize,
    slot_hi: usize,
}

/// Costs this close count as equal and fall back to the id order, so
/// rounding in the cached KL never decides between exchangeable clusters.
pub const COST_TIE_REL: f64 = 1e-10;
pub const COST_TIE_ABS: f64 = 1e-15;

/// `a` is cheaper than `b` by more than the tie tolerance.
fn strictly_cheaper<T: Scalar>(a: T, b: T) -> bool {
    let tol = T::lit(COST_TIE_REL) * a.abs().max(b.abs()) + T::lit(COST_TIE_ABS);
    a < b - tol
}

impl<T: Scalar> Candidate<T> {
    fn better_than(&self, other: &Candidate<T>) -> bool {
        strictly_cheaper(self.cost, other.cost)
            || (!strictly_cheaper(other.cost, self.cost) && (self.lo, self.hi) < (other.lo, other.hi))
    }
}

fn pick<T: Scalar>(a: Option<Candidate<T>>, b: Option<Candidate<T>>) -> Option<Candidate<T>> {
    match (a, b) {
        (Some(x), Some(y)) => Some(if y.better_than(&x) { y } else { x }),
        (x, None) => x,
        (None, y) => y,
    }
}

#[inline]
fn dot<T: Scalar>(a: &[T], b: &[T]) -> T {
    a.iter().zip(b).fold(T::zero(), |acc, (&x, &y)| acc + x * y)
}

impl<T: Scalar> AxisState<T> {
    /// `masses` is `n × width` row-major with positive row sums.
    fn new(masses: Vec<T>, n: usize, width: usize) -> Result<Self> {
        let mut dist = masses;
        for s in 0..n {
            let row = &mut dist[s * width..(s + 1) * width];
            let total: T = row.iter().copied().sum();
            if !(total > T::zero()) {
                return Err(Error::DegenerateCluster(s));
            }
            row.iter_mut().for_each(|v| *v /= total);
        }
        let logs: Vec<T> = dist.iter().map(|&v| log2_floor(v)).collect();
        let self_term: Vec<T> = (0..n)
            .map(|s| dot(&dist[s * width..(s + 1) * width], &logs[s * width..(s + 1) * width]))
            .collect();
        let rows: Vec<Vec<T>> = (0..n)
            .into_par_iter()
            .map(|s| {
                let d = &dist[s * width..(s + 1) * width];
                (0..n)
                    .map(|t| {
                        if s == t {
                            T::zero()
                        } else {
                            self_term[s] - dot(d, &logs[t * width..(t + 1) * width])
                        }
                    })
                    .collect()
            })
            .collect();
        let mut kl = DirectedKlMatrix::zeros(n);
        let mut kl_t = DirectedKlMatrix::zeros(n);
        for (s, row) in rows.into_iter().enumerate() {
            for (t, v) in row.into_iter().enumerate() {
                kl.set(s, t, v);
                kl_t.set(t, s, v);
            }
        }
        let n_t = T::from_count(n);
        let size_terms = (0..=n).map(|c| (T::from_count(c) / n_t).xlog2x()).collect();
        Ok(Self {
            kl,
            kl_t,
            dist,
            logs,
            self_term,
            width,
            size_terms,
            slot_ids: (0..n).collect(),
            sizes: vec![1; n],
            live: (0..n).collect(),
        })
    }

    fn dist_row(&self, s: usize) -> &[T] {
        &self.dist[s * self.width..(s + 1) * self.width]
    }

    fn log_row(&self, s: usize) -> &[T] {
        &self.logs[s * self.width..(s + 1) * self.width]
    }

    fn best_pair(&self, mode: CostMode, alpha: T) -> Option<Candidate<T>> {
        let k = self.live.len();
        if k < 2 {
            return None;
        }
        let use_size = mode == CostMode::Composite && k >= 3;
        let log_k = T::from_count(k).log2();
        let log_k1 = T::from_count(k.saturating_sub(1).max(1)).log2();
        let floor = T::lit(MERGE_COST_FLOOR);
        let live = &self.live;
        let partials: Vec<Option<Candidate<T>>> = (0..k - 1)
            .into_par_iter()
            .map(|p| {
                let s = live[p];
                let id_s = self.slot_ids[s];
                let size_s = self.sizes[s];
                let row = &self.kl.row(s);
                let row_t = &self.kl_t.row(s);
                let mut best: Option<Candidate<T>> = None;
                for &t in &live[p + 1..] {
                    let id_t = self.slot_ids[t];
                    // row[t] = KL(s || t), row_t[t] = KL(t || s)
                    let kl = if id_s < id_t {
                        blend(row[t], row_t[t], alpha)
                    } else {
                        blend(row_t[t], row[t], alpha)
                    }
                    .max(T::zero());
                    let (merge, floored) = if use_size {
                        let size_t = self.sizes[t];
                        let raw = size_cost_from_terms(
                            self.size_terms[size_s] + self.size_terms[size_t],
                            self.size_terms[size_s + size_t],
                            log_k,
                            log_k1,
                        );
                        if raw < floor { (floor, true) } else { (raw, false) }
                    } else {
                        (T::one(), false)
                    };
                    let (lo, hi, slot_lo, slot_hi) =
                        if id_s < id_t { (id_s, id_t, s, t) } else { (id_t, id_s, t, s) };
                    let cand = Candidate {
                        cost: kl * merge,
                        kl,
                        merge,
                        floored,
                        lo,
                        hi,
                        slot_lo,
                        slot_hi,
                    };
                    if best.as_ref().is_none_or(|b| cand.better_than(b)) {
                        best = Some(cand);
                    }
                }
                best
            })
            .collect();
        partials.into_iter().fold(None, pick)
    }

    /// Replaces slot `keep` by the mass-weighted blend of `keep` and `drop`
    /// and refreshes its KL row and column.
    fn merge_clusters(&mut self, keep: usize, drop: usize, w_keep: T, w_drop: T, new_id: usize) {
        let w = self.width;
        let total = w_keep + w_drop;
        for c in 0..w {
            let v = (w_keep * self.dist[keep * w + c] + w_drop * self.dist[drop * w + c]) / total;
            self.dist[keep * w + c] = v;
            self.logs[keep * w + c] = log2_floor(v);
            self.dist[drop * w + c] = T::zero();
            self.logs[drop * w + c] = log2_floor(T::zero());
        }
        self.self_term[keep] = dot(self.dist_row(keep), self.log_row(keep));
        self.self_term[drop] = T::zero();
        self.sizes[keep] += self.sizes[drop];
        self.sizes[drop] = 0;
        self.slot_ids[keep] = new_id;
        let pos = self.live.binary_search(&drop).expect("live slot");
        self.live.remove(pos);

        let fresh: Vec<(usize, T, T)> = self
            .live
            .par_iter()
            .filter(|&&t| t != keep)
            .map(|&t| {
                let out = self.self_term[keep] - dot(self.dist_row(keep), self.log_row(t));
                let inc = self.self_term[t] - dot(self.dist_row(t), self.log_row(keep));
                (t, out, inc)
            })
            .collect();
        for (t, out, inc) in fresh {
            self.kl.set(keep, t, out);
            self.kl_t.set(t, keep, out);
            self.kl.set(t, keep, inc);
            self.kl_t.set(keep, t, inc);
        }
        self.kl.set(keep, keep, T::zero());
        self.kl_t.set(keep, keep, T::zero());
    }

    /// Collapses features `fi` and `fj` (into `fi`) in every live
    /// distribution and patches every KL entry with the exact delta.
    fn merge_features(&mut self, fi: usize, fj: usize) {
        let w = self.width;
        let k = self.live.len();
        let mut a_i = Vec::with_capacity(k);
        let mut a_j = Vec::with_capacity(k);
        let mut l_i = Vec::with_capacity(k);
        let mut l_j = Vec::with_capacity(k);
        let mut joined = Vec::with_capacity(k);
        let mut l_joined = Vec::with_capacity(k);
        let mut self_delta = Vec::with_capacity(k);
        for &u in &self.live {
            let (ai, aj) = (self.dist[u * w + fi], self.dist[u * w + fj]);
            let (li, lj) = (self.logs[u * w + fi], self.logs[u * w + fj]);
            let a = ai + aj;
            let la = log2_floor(a);
            a_i.push(ai);
            a_j.push(aj);
            l_i.push(li);
            l_j.push(lj);
            joined.push(a);
            l_joined.push(la);
            self_delta.push(a * la - ai * li - aj * lj);
        }
        // KL(u || v) changes by self_delta[u] - (A_u l'_v - a_iu l_vi - a_ju l_vj).
        let n_slots = self.kl.size();
        let mut pos_of = vec![usize::MAX; n_slots];
        for (p, &u) in self.live.iter().enumerate() {
            pos_of[u] = p;
        }
        let live = &self.live;
        let cross = |x: usize, y: usize| joined[x] * l_joined[y] - a_i[x] * l_i[y] - a_j[x] * l_j[y];
        // kl rows hold KL(u || ·); kl_t rows hold KL(· || u).
        for (matrix, transposed) in [(&mut self.kl, false), (&mut self.kl_t, true)] {
            matrix
                .values_mut()
                .par_chunks_exact_mut(n_slots)
                .enumerate()
                .filter(|(s, _)| pos_of[*s] != usize::MAX)
                .for_each(|(s, row)| {
                    let ps = pos_of[s];
                    for (pv, &v) in live.iter().enumerate() {
                        if pv == ps {
                            continue;
                        }
                        let (x, y) = if transposed { (pv, ps) } else { (ps, pv) };
                        row[v] += self_delta[x] - cross(x, y);
                    }
                });
        }

        for (p, &u) in self.live.iter().enumerate() {
            self.dist[u * w + fi] = joined[p];
            self.logs[u * w + fi] = l_joined[p];
            self.dist[u * w + fj] = T::zero();
            self.logs[u * w + fj] = log2_floor(T::zero());
            self.self_term[u] += self_delta[p];
        }
    }
}

/// One agglomeration run; see [`agglomerate`].
pub struct Engine<T> {
    config: CoclusterConfig,
    alpha: T,
    m_star: DenseMatrix<T>,
    joint: AggregatedMass<T>,
    rows: Partition,
    cols: Partition,
    row_state: AxisState<T>,
    col_state: AxisState<T>,
    history: Dendrogram<T>,
    step: usize,
    floor_hits: usize,
}

impl<T: Scalar> Engine<T> {
    pub fn new(m_star: &DenseMatrix<T>, config: CoclusterConfig) -> Result<Self> {
        let (n, m) = m_star.shape();
        if n < 2 || m < 2 {
            return Err(Error::invalid(format!(
                "co-clustering needs at least a 2x2 matrix, got {n}x{m}"
            )));
        }
        if !(m_star.sum() > T::zero()) {
            return Err(Error::invalid("matrix has zero total mass"));
        }
        let alpha = T::lit(config.alpha);
        check_alpha(alpha)?;
        if config.trace_stride == 0 {
            return Err(Error::invalid("trace stride must be at least 1"));
        }
        let joint = AggregatedMass::from_matrix(m_star)?;
        let row_state = AxisState::new(m_star.values().to_vec(), n, m)?;
        let col_state = AxisState::new(m_star.transpose().into_values(), m, n)?;
        Ok(Self {
            config,
            alpha,
            m_star: m_star.clone(),
            joint,
            rows: Partition::singletons(n)?,
            cols: Partition::singletons(m)?,
            row_state,
            col_state,
            history: Dendrogram::new(n, m),
            step: 0,
            floor_hits: 0,
        })
    }

    pub fn config(&self) -> &CoclusterConfig {
        &self.config
    }

    pub fn partition(&self, axis: Axis) -> &Partition {
        match axis {
            Axis::Row => &self.rows,
            Axis::Col => &self.cols,
        }
    }

    /// Joint mass of the current row and column clusters.
    pub fn aggregate(&self) -> &AggregatedMass<T> {
        &self.joint
    }

    pub fn history(&self) -> &Dendrogram<T> {
        &self.history
    }

    pub fn is_finished(&self) -> bool {
        self.rows.n_clusters() == 1 && self.cols.n_clusters() == 1
    }

    fn state(&self, axis: Axis) -> &AxisState<T> {
        match axis {
            Axis::Row => &self.row_state,
            Axis::Col => &self.col_state,
        }
    }

    fn slot_of(&self, axis: Axis, id: ClusterId) -> Option<usize> {
        let state = self.state(axis);
        state.live.iter().copied().find(|&s| state.slot_ids[s] == id.index())
    }

    /// Maintained `KL(A || B)` between two live clusters of one axis.
    pub fn directed_kl(&self, axis: Axis, a: ClusterId, b: ClusterId) -> Option<T> {
        let (sa, sb) = (self.slot_of(axis, a)?, self.slot_of(axis, b)?);
        Some(self.state(axis).kl.get(sa, sb))
    }

    /// Largest absolute difference between the maintained KL matrices and a
    /// full recomputation from the current partitions.
    pub fn kl_drift(&self) -> Result<T> {
        let mut worst = T::zero();
        for axis in [Axis::Row, Axis::Col] {
            let feature_partition = match self.config.coupling {
                Coupling::Cocluster => self.partition(axis.other()).clone(),
                Coupling::Independent => Partition::singletons(self.history.n_items(axis.other()))?,
            };
            let (rows, cols) = match axis {
                Axis::Row => (&self.rows, &feature_partition),
                Axis::Col => (&feature_partition, &self.cols),
            };
            let g = AggregatedMass::build(&self.m_star, rows, cols)?;
            let ids: Vec<ClusterId> = self.partition(axis).cluster_ids().collect();
            let dists: Vec<Vec<T>> = ids
                .iter()
                .map(|&id| match axis {
                    Axis::Row => row_cluster_distribution(&g, id),
                    Axis::Col => col_cluster_distribution(&g, id),
                })
                .collect::<Result<_>>()?;
            let n_features = dists.first().map_or(0, Vec::len);
            let dense = DenseMatrix::from_vec_unchecked(ids.len(), n_features, dists.concat());
            let fresh = DirectedKlMatrix::from_distributions(&dense);
            for (x, &a) in ids.iter().enumerate() {
                for (y, &b) in ids.iter().enumerate() {
                    let kept = self.directed_kl(axis, a, b).expect("live ids");
                    worst = worst.max((kept - fresh.get(x, y)).abs());
                }
            }
        }
        Ok(worst)
    }

    /// Performs one merge. Returns `None` once both axes are a single cluster.
    pub fn step(&mut self) -> Result<Option<MergeRecord<T>>> {
        let mode = self.config.cost_mode;
        let row_best = self.row_state.best_pair(mode, self.alpha);
        let col_best = self.col_state.best_pair(mode, self.alpha);
        let (axis, cand) = match (row_best, col_best) {
            (None, None) => return Ok(None),
            (Some(r), None) => (Axis::Row, r),
            (None, Some(c)) => (Axis::Col, c),
            (Some(r), Some(c)) => {
                if strictly_cheaper(c.cost, r.cost) {
                    (Axis::Col, c)
                } else {
                    (Axis::Row, r)
                }
            }
        };
        if cand.floored {
            self.floor_hits += 1;
        }
        let (lo, hi) = (ClusterId(cand.lo), ClusterId(cand.hi));
        let (keep, drop) = (cand.slot_lo.min(cand.slot_hi), cand.slot_lo.max(cand.slot_hi));
        let coupled = self.config.coupling == Coupling::Cocluster;

        let new_id = match axis {
            Axis::Row => {
                let (w_keep, w_drop) = (self.joint.row_total_at(keep), self.joint.row_total_at(drop));
                let new_id = self.rows.merge(lo, hi)?;
                self.row_state.merge_clusters(keep, drop, w_keep, w_drop, new_id.index());
                if coupled {
                    self.col_state.merge_features(keep, drop);
                }
                self.joint.merge_rows(lo, hi, new_id)?;
                new_id
            }
            Axis::Col => {
                let (w_keep, w_drop) = (self.joint.col_total_at(keep), self.joint.col_total_at(drop));
                let new_id = self.cols.merge(lo, hi)?;
                self.col_state.merge_clusters(keep, drop, w_keep, w_drop, new_id.index());
                if coupled {
                    self.row_state.merge_features(keep, drop);
                }
                self.joint.merge_cols(lo, hi, new_id)?;
                new_id
            }
        };

        self.step += 1;
        let record = MergeRecord {
            step: self.step,
            axis,
            left_id: lo,
            right_id: hi,
            new_id,
            kl_cost: cand.kl,
            merge_cost: cand.merge,
            composite_cost: cand.cost,
            new_size: self.partition(axis).size(new_id).expect("new cluster is live"),
        };
        match axis {
            Axis::Row => self.history.row_merges.push(record.clone()),
            Axis::Col => self.history.col_merges.push(record.clone()),
        }
        if self.config.trace_metrics
            && (self.step.is_multiple_of(self.config.trace_stride) || self.is_finished())
        {
            let trace = self.trace_entry()?;
            self.history.trace.push(trace);
        }
        Ok(Some(record))
    }

    fn trace_entry(&self) -> Result<StepTrace<T>> {
        let r = self.config.restricted_r;
        let h_rel = |p: &Partition| -> Result<T> {
            if p.n_clusters() < 2 {
                return Ok(T::zero());
            }
            let sizes: Vec<usize> = p.cluster_sizes().map(|(_, s)| s).collect();
            restricted_entropy_of_sizes(&sizes, r)
        };
        let h_rows = h_rel(&self.rows)?;
        let h_cols = h_rel(&self.cols)?;
        let mi = mutual_information(&self.joint)?;
        Ok(StepTrace {
            step: self.step,
            k_rows: self.rows.n_clusters(),
            k_cols: self.cols.n_clusters(),
            h_rel_rows: h_rows,
            h_rel_cols: h_cols,
            mutual_info: mi,
            criterion_rows: h_rows * mi,
            criterion_cols: h_cols * mi,
        })
    }

    /// Runs to a single cluster per axis and returns the dendrogram.
    pub fn run(mut self) -> Result<Dendrogram<T>> {
        while self.step()?.is_some() {}
        if self.floor_hits > 0 {
            log::info!(
                "size-based merge cost floored at {MERGE_COST_FLOOR:e} for {} merge(s)",
                self.floor_hits
            );
        }
        Ok(self.history)
    }
}

/// Full agglomeration of a smoothed matrix down to one row and one column
/// cluster.
pub fn agglomerate<T: Scalar>(m_star: &DenseMatrix<T>, config: &CoclusterConfig) -> Result<Dendrogram<T>> {
    Engine::new(m_star, config.clone())?.run()
}
