//! Merge history of a co-clustering run.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::partition::{ClusterId, Partition};
use crate::scalar::Scalar;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Axis {
    Row,
    Col,
}

impl Axis {
    pub fn other(self) -> Axis {
        match self {
            Axis::Row => Axis::Col,
            Axis::Col => Axis::Row,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Axis::Row => "row",
            Axis::Col => "col",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MergeRecord<T> {
    /// 1-based position in the global (both axes) merge order.
    pub step: usize,
    pub axis: Axis,
    #[serde(rename = "left")]
    pub left_id: ClusterId,
    #[serde(rename = "right")]
    pub right_id: ClusterId,
    #[serde(rename = "new")]
    pub new_id: ClusterId,
    pub kl_cost: T,
    pub merge_cost: T,
    pub composite_cost: T,
    pub new_size: usize,
}

/// Metrics recorded after a merge.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StepTrace<T> {
    pub step: usize,
    pub k_rows: usize,
    pub k_cols: usize,
    pub h_rel_rows: T,
    pub h_rel_cols: T,
    pub mutual_info: T,
    pub criterion_rows: T,
    pub criterion_cols: T,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Dendrogram<T> {
    pub n_rows: usize,
    pub n_cols: usize,
    pub row_merges: Vec<MergeRecord<T>>,
    pub col_merges: Vec<MergeRecord<T>>,
    pub trace: Vec<StepTrace<T>>,
}

impl<T: Scalar> Dendrogram<T> {
    pub fn new(n_rows: usize, n_cols: usize) -> Self {
        Self {
            n_rows,
            n_cols,
            row_merges: Vec::new(),
            col_merges: Vec::new(),
            trace: Vec::new(),
        }
    }

    pub fn merges(&self, axis: Axis) -> &[MergeRecord<T>] {
        match axis {
            Axis::Row => &self.row_merges,
            Axis::Col => &self.col_merges,
        }
    }

    pub fn n_items(&self, axis: Axis) -> usize {
        match axis {
            Axis::Row => self.n_rows,
            Axis::Col => self.n_cols,
        }
    }

    pub fn total_merges(&self) -> usize {
        self.row_merges.len() + self.col_merges.len()
    }

    /// True when both axes were merged down to a single cluster.
    pub fn is_complete(&self) -> bool {
        self.row_merges.len() + 1 == self.n_rows && self.col_merges.len() + 1 == self.n_cols
    }

    /// Flat partition of one axis with `k` live clusters, obtained by
    /// replaying that axis's merges.
    pub fn cut(&self, axis: Axis, k: usize) -> Result<Partition> {
        let n = self.n_items(axis);
        let merges = self.merges(axis);
        if k == 0 || k > n || n - k > merges.len() {
            return Err(Error::invalid(format!(
                "cannot cut the {} dendrogram at {k} clusters ({n} items, {} merges recorded)",
                axis.name(),
                merges.len()
            )));
        }
        let mut p = Partition::singletons(n)?;
        for rec in &merges[..n - k] {
            apply_record(&mut p, rec)?;
        }
        Ok(p)
    }

    /// Walks the merges of both axes in global step order.
    pub fn replay(&self) -> Result<Replay<'_, T>> {
        Ok(Replay {
            dendrogram: self,
            rows: Partition::singletons(self.n_rows)?,
            cols: Partition::singletons(self.n_cols)?,
            next_row: 0,
            next_col: 0,
        })
    }
}

fn apply_record<T>(p: &mut Partition, rec: &MergeRecord<T>) -> Result<()> {
    let id = p.merge(rec.left_id, rec.right_id)?;
    if id != rec.new_id {
        return Err(Error::InvalidMerge(format!(
            "merge record at step {} names new id {} but replay produced {}",
            rec.step, rec.new_id, id
        )));
    }
    Ok(())
}

/// Stateful replay of a dendrogram; see [`Dendrogram::replay`].
pub struct Replay<'a, T> {
    dendrogram: &'a Dendrogram<T>,
    rows: Partition,
    cols: Partition,
    next_row: usize,
    next_col: usize,
}

impl<'a, T: Scalar> Replay<'a, T> {
    /// Applies the next merge and returns its axis and record, or `None` once
    /// every recorded merge has been applied.
    pub fn advance(&mut self) -> Result<Option<(Axis, &'a MergeRecord<T>)>> {
        let d = self.dendrogram;
        let row = d.row_merges.get(self.next_row);
        let col = d.col_merges.get(self.next_col);
        let axis = match (row, col) {
            (None, None) => return Ok(None),
            (Some(_), None) => Axis::Row,
            (None, Some(_)) => Axis::Col,
            (Some(r), Some(c)) if r.step < c.step => Axis::Row,
            _ => Axis::Col,
        };
        let rec = match axis {
            Axis::Row => {
                self.next_row += 1;
                let rec = &d.row_merges[self.next_row - 1];
                apply_record(&mut self.rows, rec)?;
                rec
            }
            Axis::Col => {
                self.next_col += 1;
                let rec = &d.col_merges[self.next_col - 1];
                apply_record(&mut self.cols, rec)?;
                rec
            }
        };
        Ok(Some((axis, rec)))
    }

    pub fn rows(&self) -> &Partition {
        &self.rows
    }

    pub fn cols(&self) -> &Partition {
        &self.cols
    }

    pub fn partition(&self, axis: Axis) -> &Partition {
        match axis {
            Axis::Row => &self.rows,
            Axis::Col => &self.cols,
        }
    }
}
