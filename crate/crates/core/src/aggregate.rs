//! The aggregated mass matrix `G`: summed smoothed mass per
//! (row cluster, column cluster) pair, maintained under merges.
//!
//! Storage is slot based. A cluster occupies a slot; merging two clusters
//! folds the higher slot into the lower one and retires it, so the backing
//! buffer never moves.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::matrix::DenseMatrix;
use crate::partition::{ClusterId, Partition};
use crate::scalar::Scalar;

#[derive(Clone, Debug)]
struct AxisSlots {
    slot_ids: Vec<Option<ClusterId>>,
    slot_of: HashMap<ClusterId, usize>,
    live: Vec<usize>,
}

impl AxisSlots {
    fn new(ids: Vec<ClusterId>) -> Self {
        let slot_of = ids.iter().enumerate().map(|(s, &id)| (id, s)).collect();
        let live = (0..ids.len()).collect();
        Self {
            slot_ids: ids.into_iter().map(Some).collect(),
            slot_of,
            live,
        }
    }

    fn slot(&self, id: ClusterId) -> Result<usize> {
        self.slot_of
            .get(&id)
            .copied()
            .ok_or_else(|| Error::InvalidMerge(format!("cluster {id} is not live")))
    }

    /// Returns `(kept, retired)` slots.
    fn merge(&mut self, a: ClusterId, b: ClusterId, new_id: ClusterId) -> Result<(usize, usize)> {
        if a == b {
            return Err(Error::InvalidMerge(format!("cannot merge cluster {a} with itself")));
        }
        let (sa, sb) = (self.slot(a)?, self.slot(b)?);
        if self.slot_of.contains_key(&new_id) {
            return Err(Error::InvalidMerge(format!("cluster id {new_id} already in use")));
        }
        let (keep, drop) = (sa.min(sb), sa.max(sb));
        self.slot_of.remove(&a);
        self.slot_of.remove(&b);
        self.slot_of.insert(new_id, keep);
        self.slot_ids[keep] = Some(new_id);
        self.slot_ids[drop] = None;
        let pos = self.live.binary_search(&drop).expect("live slot");
        self.live.remove(pos);
        Ok((keep, drop))
    }

    fn ids_ascending(&self) -> Vec<ClusterId> {
        let mut ids: Vec<_> = self.slot_of.keys().copied().collect();
        ids.sort_unstable();
        ids
    }
}

#[derive(Clone, Debug)]
pub struct AggregatedMass<T> {
    n_col_slots: usize,
    values: Vec<T>,
    row_totals: Vec<T>,
    col_totals: Vec<T>,
    total_mass: T,
    rows: AxisSlots,
    cols: AxisSlots,
}

impl<T: Scalar> AggregatedMass<T> {
    /// Sums `m_star` over the blocks induced by the two partitions. With
    /// singleton partitions the result equals `m_star`.
    pub fn build(m_star: &DenseMatrix<T>, rows: &Partition, cols: &Partition) -> Result<Self> {
        if rows.n_items() != m_star.n_rows() || cols.n_items() != m_star.n_cols() {
            return Err(Error::invalid(format!(
                "partitions cover {}x{} items but the matrix is {}x{}",
                rows.n_items(),
                cols.n_items(),
                m_star.n_rows(),
                m_star.n_cols()
            )));
        }
        let row_ids: Vec<ClusterId> = rows.cluster_ids().collect();
        let col_ids: Vec<ClusterId> = cols.cluster_ids().collect();
        let (kr, kc) = (row_ids.len(), col_ids.len());
        let row_slot: HashMap<ClusterId, usize> =
            row_ids.iter().enumerate().map(|(s, &id)| (id, s)).collect();
        let col_slot: Vec<usize> = {
            let map: HashMap<ClusterId, usize> =
                col_ids.iter().enumerate().map(|(s, &id)| (id, s)).collect();
            (0..cols.n_items()).map(|j| map[&cols.cluster_of(j)]).collect()
        };
        let mut values = vec![T::zero(); kr * kc];
        for i in 0..m_star.n_rows() {
            let base = row_slot[&rows.cluster_of(i)] * kc;
            for (j, &v) in m_star.row(i).iter().enumerate() {
                values[base + col_slot[j]] += v;
            }
        }
        let mut agg = Self {
            n_col_slots: kc,
            values,
            row_totals: vec![T::zero(); kr],
            col_totals: vec![T::zero(); kc],
            total_mass: m_star.sum(),
            rows: AxisSlots::new(row_ids),
            cols: AxisSlots::new(col_ids),
        };
        for r in 0..kr {
            agg.row_totals[r] = agg.row_slot(r).iter().copied().sum();
        }
        for r in 0..kr {
            for c in 0..kc {
                agg.col_totals[c] += agg.values[r * kc + c];
            }
        }
        Ok(agg)
    }

    /// Singleton partitions on both axes.
    pub fn from_matrix(m_star: &DenseMatrix<T>) -> Result<Self> {
        let rows = Partition::singletons(m_star.n_rows())?;
        let cols = Partition::singletons(m_star.n_cols())?;
        Self::build(m_star, &rows, &cols)
    }

    pub fn total_mass(&self) -> T {
        self.total_mass
    }

    pub fn n_live_rows(&self) -> usize {
        self.rows.live.len()
    }

    pub fn n_live_cols(&self) -> usize {
        self.cols.live.len()
    }

    /// Live row cluster ids, ascending.
    pub fn row_ids(&self) -> Vec<ClusterId> {
        self.rows.ids_ascending()
    }

    /// Live column cluster ids, ascending.
    pub fn col_ids(&self) -> Vec<ClusterId> {
        self.cols.ids_ascending()
    }

    pub fn get(&self, row: ClusterId, col: ClusterId) -> Option<T> {
        let r = self.rows.slot_of.get(&row)?;
        let c = self.cols.slot_of.get(&col)?;
        Some(self.values[r * self.n_col_slots + c])
    }

    pub fn row_total(&self, row: ClusterId) -> Option<T> {
        self.rows.slot_of.get(&row).map(|&r| self.row_totals[r])
    }

    pub fn col_total(&self, col: ClusterId) -> Option<T> {
        self.cols.slot_of.get(&col).map(|&c| self.col_totals[c])
    }

    /// Dense copy with rows and columns in ascending id order.
    pub fn to_dense(&self) -> DenseMatrix<T> {
        let rows = self.row_ids();
        let cols = self.col_ids();
        let mut out = DenseMatrix::zeros(rows.len(), cols.len());
        for (i, &r) in rows.iter().enumerate() {
            for (j, &c) in cols.iter().enumerate() {
                out.set(i, j, self.get(r, c).expect("live ids"));
            }
        }
        out
    }

    /// Folds row cluster `b` into `a` under the new id. Column totals and the
    /// total mass are unchanged.
    pub fn merge_rows(&mut self, a: ClusterId, b: ClusterId, new_id: ClusterId) -> Result<()> {
        let (keep, drop) = self.rows.merge(a, b, new_id)?;
        let w = self.n_col_slots;
        let (head, tail) = self.values.split_at_mut(drop * w);
        let kept = &mut head[keep * w..(keep + 1) * w];
        let dropped = &mut tail[..w];
        for (k, d) in kept.iter_mut().zip(dropped.iter_mut()) {
            *k += *d;
            *d = T::zero();
        }
        self.row_totals[keep] = self.cols.live.iter().map(|&c| kept[c]).sum();
        self.row_totals[drop] = T::zero();
        Ok(())
    }

    /// Folds column cluster `b` into `a` under the new id.
    pub fn merge_cols(&mut self, a: ClusterId, b: ClusterId, new_id: ClusterId) -> Result<()> {
        let (keep, drop) = self.cols.merge(a, b, new_id)?;
        let w = self.n_col_slots;
        let mut total = T::zero();
        for &r in &self.rows.live {
            let base = r * w;
            let moved = self.values[base + drop];
            self.values[base + keep] += moved;
            self.values[base + drop] = T::zero();
            total += self.values[base + keep];
        }
        self.col_totals[keep] = total;
        self.col_totals[drop] = T::zero();
        Ok(())
    }

    // Slot-level access for the clustering engine.

    pub(crate) fn live_row_slots(&self) -> &[usize] {
        &self.rows.live
    }

    pub(crate) fn live_col_slots(&self) -> &[usize] {
        &self.cols.live
    }

    pub(crate) fn row_slot(&self, slot: usize) -> &[T] {
        &self.values[slot * self.n_col_slots..(slot + 1) * self.n_col_slots]
    }

    pub(crate) fn row_total_at(&self, slot: usize) -> T {
        self.row_totals[slot]
    }

    pub(crate) fn col_total_at(&self, slot: usize) -> T {
        self.col_totals[slot]
    }
}
