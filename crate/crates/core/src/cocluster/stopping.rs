//! Unsupervised choice of the cluster count: the step maximizing restricted
//! relative partition entropy times the mutual information between the row
//! and column partitions, chosen separately per axis.

use serde::{Deserialize, Serialize};

use crate::dendrogram::{Axis, Dendrogram};
use crate::error::{Error, Result};
use crate::metrics::restricted_partition_entropy;
use crate::scalar::Scalar;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CriterionPoint {
    pub step: usize,
    pub k: usize,
    pub h_rel: f64,
    pub mutual_info: f64,
    pub value: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AxisEstimate {
    pub k_star: usize,
    /// Step of the trace at which the maximum was reached.
    pub step: usize,
    pub value: f64,
    /// The criterion was zero everywhere; `k_star` is the earliest step.
    pub degenerate: bool,
    pub curve: Vec<CriterionPoint>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StoppingEstimate {
    pub restricted_r: usize,
    pub rows: AxisEstimate,
    pub cols: AxisEstimate,
}

impl StoppingEstimate {
    pub fn axis(&self, axis: Axis) -> &AxisEstimate {
        match axis {
            Axis::Row => &self.rows,
            Axis::Col => &self.cols,
        }
    }

    pub fn k_star_rows(&self) -> usize {
        self.rows.k_star
    }

    pub fn k_star_cols(&self) -> usize {
        self.cols.k_star
    }
}

/// Scans the recorded trace and returns, per axis, the cluster count
/// maximizing `H*_rel(C; r) × I(C_rows, C_cols)`. Entropies are recomputed
/// from the replayed partitions, so `r` may differ from the one used while
/// tracing.
pub fn stopping_criterion<T: Scalar>(d: &Dendrogram<T>, r: usize) -> Result<StoppingEstimate> {
    if d.trace.is_empty() {
        return Err(Error::invalid("dendrogram has no metric trace"));
    }
    let mut curves: [Vec<CriterionPoint>; 2] = [Vec::new(), Vec::new()];
    let mut replay = d.replay()?;
    let mut step = 0;
    for entry in &d.trace {
        while step < entry.step {
            if replay.advance()?.is_none() {
                return Err(Error::invalid(format!(
                    "trace refers to step {} beyond the recorded merges",
                    entry.step
                )));
            }
            step += 1;
        }
        let mi = entry.mutual_info.as_f64();
        for (curve, axis) in curves.iter_mut().zip([Axis::Row, Axis::Col]) {
            let p = replay.partition(axis);
            let h_rel = if p.n_clusters() < 2 {
                0.0
            } else {
                restricted_partition_entropy::<f64>(p, r)?
            };
            curve.push(CriterionPoint {
                step: entry.step,
                k: p.n_clusters(),
                h_rel,
                mutual_info: mi,
                value: h_rel * mi,
            });
        }
    }
    let [row_curve, col_curve] = curves;
    Ok(StoppingEstimate {
        restricted_r: r,
        rows: best_point(row_curve, d.n_rows, Axis::Row),
        cols: best_point(col_curve, d.n_cols, Axis::Col),
    })
}

fn best_point(curve: Vec<CriterionPoint>, n_items: usize, axis: Axis) -> AxisEstimate {
    let mut best = 0;
    for (i, p) in curve.iter().enumerate() {
        if p.value > curve[best].value {
            best = i;
        }
    }
    let degenerate = !(curve[best].value > 0.0);
    if degenerate {
        log::warn!(
            "stopping criterion is zero along the whole {} trace; reporting the earliest step",
            axis.name()
        );
    }
    let point = curve[best];
    AxisEstimate {
        k_star: point.k.clamp(2.min(n_items), n_items),
        step: point.step,
        value: point.value,
        degenerate,
        curve,
    }
}
