//! Scoring a dendrogram: V-measure along the merge order against known
//! labels, and the unsupervised summary at the estimated cluster counts.

use serde::{Deserialize, Serialize};

use crate::cocluster::{stopping_criterion, StoppingEstimate};
use crate::dendrogram::{Axis, Dendrogram};
use crate::error::{Error, Result};
use crate::metrics::{v_measure, VMeasure};
use crate::scalar::Scalar;

/// Scores of both axes after a given number of merges.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct StepScore {
    pub step: usize,
    pub k_rows: usize,
    pub k_cols: usize,
    pub rows: VMeasure,
    pub cols: VMeasure,
}

impl StepScore {
    pub fn axis(&self, axis: Axis) -> &VMeasure {
        match axis {
            Axis::Row => &self.rows,
            Axis::Col => &self.cols,
        }
    }

    pub fn k(&self, axis: Axis) -> usize {
        match axis {
            Axis::Row => self.k_rows,
            Axis::Col => self.k_cols,
        }
    }
}

/// V-measure of both axes at every step, starting from the singletons
/// (step 0).
pub fn v_measure_curve<T: Scalar>(
    d: &Dendrogram<T>,
    row_labels: &[usize],
    col_labels: &[usize],
) -> Result<Vec<StepScore>> {
    if row_labels.len() != d.n_rows || col_labels.len() != d.n_cols {
        return Err(Error::invalid(format!(
            "labels cover {}x{} items but the dendrogram has {}x{}",
            row_labels.len(),
            col_labels.len(),
            d.n_rows,
            d.n_cols
        )));
    }
    let mut replay = d.replay()?;
    let mut rows = v_measure(row_labels, &replay.rows().labels())?;
    let mut cols = v_measure(col_labels, &replay.cols().labels())?;
    let mut out = Vec::with_capacity(d.total_merges() + 1);
    let mut step = 0;
    loop {
        out.push(StepScore {
            step,
            k_rows: replay.rows().n_clusters(),
            k_cols: replay.cols().n_clusters(),
            rows,
            cols,
        });
        match replay.advance()? {
            None => break,
            Some((Axis::Row, _)) => rows = v_measure(row_labels, &replay.rows().labels())?,
            Some((Axis::Col, _)) => cols = v_measure(col_labels, &replay.cols().labels())?,
        }
        step += 1;
    }
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AxisBest {
    pub v_measure: f64,
    pub step: usize,
    pub k: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MaxV {
    pub rows: AxisBest,
    pub cols: AxisBest,
    /// Mean of the two per-axis maxima.
    pub mean: f64,
}

/// Best V-measure reached by each axis anywhere along the curve, earliest
/// step on ties.
pub fn max_v_measure(curve: &[StepScore]) -> Result<MaxV> {
    if curve.is_empty() {
        return Err(Error::invalid("empty V-measure curve"));
    }
    let best = |axis: Axis| {
        let mut b = &curve[0];
        for s in curve {
            if s.axis(axis).v_measure > b.axis(axis).v_measure {
                b = s;
            }
        }
        AxisBest {
            v_measure: b.axis(axis).v_measure,
            step: b.step,
            k: b.k(axis),
        }
    };
    let (rows, cols) = (best(Axis::Row), best(Axis::Col));
    Ok(MaxV {
        rows,
        cols,
        mean: (rows.v_measure + cols.v_measure) / 2.0,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AxisSummary {
    pub k_hat: usize,
    pub step: usize,
    pub h_rel: f64,
    pub mutual_info: f64,
    pub criterion: f64,
    /// Largest restricted relative entropy seen along the trace.
    pub max_h_rel: f64,
    /// Scores of the flat cut at `k_hat`, when labels are known.
    pub at_k_hat: Option<VMeasure>,
    pub best: Option<AxisBest>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EvaluationSummary {
    pub restricted_r: usize,
    pub rows: AxisSummary,
    pub cols: AxisSummary,
    pub max_v_mean: Option<f64>,
    pub degenerate_criterion: bool,
}

impl EvaluationSummary {
    pub fn axis(&self, axis: Axis) -> &AxisSummary {
        match axis {
            Axis::Row => &self.rows,
            Axis::Col => &self.cols,
        }
    }
}

/// Stopping estimate plus, when `labels` (rows, cols) are given, supervised
/// scores at the estimate and along the whole curve.
pub fn evaluate<T: Scalar>(
    d: &Dendrogram<T>,
    labels: Option<(&[usize], &[usize])>,
    restricted_r: usize,
) -> Result<EvaluationSummary> {
    let estimate = stopping_criterion(d, restricted_r)?;
    let max_v = match labels {
        Some((rl, cl)) => Some(max_v_measure(&v_measure_curve(d, rl, cl)?)?),
        None => None,
    };
    let axis = |axis: Axis| -> Result<AxisSummary> {
        summarize_axis(d, &estimate, axis, labels, max_v.as_ref())
    };
    Ok(EvaluationSummary {
        restricted_r,
        rows: axis(Axis::Row)?,
        cols: axis(Axis::Col)?,
        max_v_mean: max_v.map(|m| m.mean),
        degenerate_criterion: estimate.rows.degenerate || estimate.cols.degenerate,
    })
}

fn summarize_axis<T: Scalar>(
    d: &Dendrogram<T>,
    estimate: &StoppingEstimate,
    axis: Axis,
    labels: Option<(&[usize], &[usize])>,
    max_v: Option<&MaxV>,
) -> Result<AxisSummary> {
    let e = estimate.axis(axis);
    let point = e
        .curve
        .iter()
        .find(|p| p.step == e.step)
        .copied()
        .expect("estimate step is on its curve");
    let at_k_hat = match labels {
        Some((rl, cl)) => {
            let truth = match axis {
                Axis::Row => rl,
                Axis::Col => cl,
            };
            Some(v_measure(truth, &d.cut(axis, e.k_star)?.labels())?)
        }
        None => None,
    };
    Ok(AxisSummary {
        k_hat: e.k_star,
        step: e.step,
        h_rel: point.h_rel,
        mutual_info: point.mutual_info,
        criterion: point.value,
        max_h_rel: e.curve.iter().map(|p| p.h_rel).fold(0.0, f64::max),
        at_k_hat,
        best: max_v.map(|m| match axis {
            Axis::Row => m.rows,
            Axis::Col => m.cols,
        }),
    })
}
