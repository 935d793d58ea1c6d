//! End-to-end run: load or generate, smooth, agglomerate, evaluate, export.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::cocluster::{agglomerate, CoclusterConfig};
use crate::dendrogram::{Axis, Dendrogram};
use crate::error::{Error, Result};
use crate::evaluate::{evaluate, EvaluationSummary};
use crate::io;
use crate::matrix::SparseBinaryMatrix;
use crate::smoothing::{smooth, SmoothingConfig, DEFAULT_SINKHORN_MAX_ITERS, DEFAULT_SINKHORN_TOL};
use crate::synthgen::{generate_checkerboard, CheckerboardSpec};

pub const FAILURE_MARKER: &str = "FAILED";
pub const MATRIX_FILE: &str = "matrix.mtx";
pub const ROW_LABELS_FILE: &str = "row_labels.tsv";
pub const COL_LABELS_FILE: &str = "col_labels.tsv";
pub const SMOOTHED_FILE: &str = "smoothed.mtx";
pub const DENDROGRAM_FILE: &str = "dendrogram.json";
pub const TRACE_FILE: &str = "trace.csv";
pub const METRICS_FILE: &str = "metrics.json";
pub const CUT_STEM: &str = "cut";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "kind")]
pub enum InputSource {
    Checkerboard(CheckerboardSpec),
    DocTag {
        path: PathBuf,
        min_tag_count: usize,
    },
    MatrixMarket {
        path: PathBuf,
        row_labels: Option<PathBuf>,
        col_labels: Option<PathBuf>,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub struct RunConfig {
    pub input: InputSource,
    pub sinkhorn_tol: f64,
    pub sinkhorn_max_iters: usize,
    pub cocluster: CoclusterConfig,
    pub cut: Option<usize>,
    /// Not part of the header, so identical runs into different
    /// directories produce identical files.
    #[serde(skip)]
    pub output_dir: PathBuf,
}

impl RunConfig {
    pub fn new(input: InputSource, output_dir: impl Into<PathBuf>) -> Self {
        Self {
            input,
            sinkhorn_tol: DEFAULT_SINKHORN_TOL,
            sinkhorn_max_iters: DEFAULT_SINKHORN_MAX_ITERS,
            cocluster: CoclusterConfig::default(),
            cut: None,
            output_dir: output_dir.into(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        match &self.input {
            InputSource::Checkerboard(spec) => spec.validate()?,
            InputSource::DocTag { min_tag_count, .. } if *min_tag_count == 0 => {
                return Err(Error::invalid("min tag count must be at least 1"));
            }
            _ => {}
        }
        if !(self.sinkhorn_tol > 0.0) || self.sinkhorn_max_iters == 0 {
            return Err(Error::invalid("Sinkhorn tolerance and iteration cap must be positive"));
        }
        if self.cocluster.restricted_r == 0 {
            return Err(Error::invalid("restricted r must be at least 1"));
        }
        if !(0.0..=1.0).contains(&self.cocluster.alpha) {
            return Err(Error::invalid(format!(
                "alpha balance {} outside [0, 1]",
                self.cocluster.alpha
            )));
        }
        if self.cut.is_some_and(|k| k == 0) {
            return Err(Error::invalid("cut must be at least 1 cluster"));
        }
        Ok(())
    }

    /// One-line JSON echo of the configuration, embedded in every output.
    pub fn header(&self) -> String {
        serde_json::to_string(self).expect("config serializes")
    }

    fn smoothing(&self) -> SmoothingConfig {
        SmoothingConfig {
            tol: self.sinkhorn_tol,
            max_iters: self.sinkhorn_max_iters,
        }
    }
}

/// Matrix ready for clustering, with optional ground truth and names.
#[derive(Clone, Debug, PartialEq)]
pub struct LoadedData {
    pub matrix: SparseBinaryMatrix,
    pub labels: Option<(Vec<usize>, Vec<usize>)>,
    pub row_names: Option<Vec<String>>,
    pub col_names: Option<Vec<String>>,
}

pub fn load_input(input: &InputSource) -> Result<LoadedData> {
    let data = match input {
        InputSource::Checkerboard(spec) => {
            let ds = generate_checkerboard(spec)?;
            LoadedData {
                matrix: ds.matrix,
                labels: Some((ds.row_labels, ds.col_labels)),
                row_names: None,
                col_names: None,
            }
        }
        InputSource::DocTag { path, min_tag_count } => {
            let d = io::ingest_doc_tag_pairs(path, *min_tag_count)?;
            LoadedData {
                matrix: d.matrix,
                labels: None,
                row_names: Some(d.doc_ids),
                col_names: Some(d.tag_ids),
            }
        }
        InputSource::MatrixMarket {
            path,
            row_labels,
            col_labels,
        } => {
            let matrix = io::read_matrix_market_binary(path)?;
            let labels = match (row_labels, col_labels) {
                (Some(r), Some(c)) => Some((io::read_labels(r)?, io::read_labels(c)?)),
                (None, None) => None,
                _ => return Err(Error::invalid("row and column labels go together")),
            };
            if let Some((r, c)) = &labels {
                if r.len() != matrix.n_rows() || c.len() != matrix.n_cols() {
                    return Err(Error::invalid("label files do not match the matrix shape"));
                }
            }
            LoadedData {
                matrix,
                labels,
                row_names: None,
                col_names: None,
            }
        }
    };
    let data = data.without_empty();
    let (n, m) = (data.matrix.n_rows(), data.matrix.n_cols());
    if n < 2 || m < 2 {
        return Err(Error::invalid(format!(
            "input has {n} non-empty row(s) and {m} non-empty column(s), at least 2 of each are needed"
        )));
    }
    Ok(data)
}

impl LoadedData {
    /// Removes all-zero rows and columns, keeping labels and names aligned.
    pub fn without_empty(self) -> LoadedData {
        let (matrix, rows, cols) = self.matrix.drop_empty();
        let dropped = (self.matrix.n_rows() - rows.len(), self.matrix.n_cols() - cols.len());
        if dropped != (0, 0) {
            log::info!("dropped {} empty row(s) and {} empty column(s)", dropped.0, dropped.1);
        }
        let pick = |v: &[usize], idx: &[usize]| idx.iter().map(|&i| v[i]).collect::<Vec<_>>();
        let pick_names =
            |v: &[String], idx: &[usize]| idx.iter().map(|&i| v[i].clone()).collect::<Vec<_>>();
        LoadedData {
            labels: self
                .labels
                .map(|(r, c)| (pick(&r, &rows), pick(&c, &cols))),
            row_names: self.row_names.map(|n| pick_names(&n, &rows)),
            col_names: self.col_names.map(|n| pick_names(&n, &cols)),
            matrix,
        }
    }
}

#[derive(Clone, Debug)]
pub struct PipelineReport {
    pub dendrogram: Dendrogram<f64>,
    pub summary: EvaluationSummary,
    pub files: Vec<PathBuf>,
}

/// Runs every stage and writes the artifacts into `cfg.output_dir`. On
/// failure a `FAILED` marker naming the stage is left next to whatever was
/// already written.
pub fn run_pipeline(cfg: &RunConfig) -> Result<PipelineReport> {
    cfg.validate()?;
    let dir = &cfg.output_dir;
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let marker = dir.join(FAILURE_MARKER);
    if marker.exists() {
        fs::remove_file(&marker).map_err(|e| Error::io(&marker, e))?;
    }
    run_stages(cfg).inspect_err(|e| {
        let note = format!("{e}\n");
        if let Err(w) = fs::write(&marker, note) {
            log::error!("could not write failure marker {}: {w}", marker.display());
        }
    })
}

fn stage<T>(name: &'static str, r: Result<T>) -> Result<T> {
    r.map_err(|e| e.in_stage(name))
}

fn run_stages(cfg: &RunConfig) -> Result<PipelineReport> {
    let dir = &cfg.output_dir;
    let header = cfg.header();
    let mut files = Vec::new();
    let mut out = |name: &str| {
        let p = dir.join(name);
        files.push(p.clone());
        p
    };

    let data = stage("load", load_input(&cfg.input))?;
    log::info!(
        "input {}x{} with {} ones",
        data.matrix.n_rows(),
        data.matrix.n_cols(),
        data.matrix.nnz()
    );
    stage("load", io::write_matrix_market_pattern(&out(MATRIX_FILE), &data.matrix, &header))?;
    if let Some((r, c)) = &data.labels {
        stage("load", io::write_labels(&out(ROW_LABELS_FILE), r, &header))?;
        stage("load", io::write_labels(&out(COL_LABELS_FILE), c, &header))?;
    }

    let smoothed = stage("smooth", smooth::<f64>(&data.matrix, &cfg.smoothing()))?;
    for (name, s) in [("document", &smoothed.docs), ("keyword", &smoothed.keys)] {
        log::info!(
            "{name} transition: {} Sinkhorn iterations, residual {:.2e}",
            s.iterations,
            s.max_residual
        );
    }
    stage(
        "smooth",
        io::write_matrix_market_real(&out(SMOOTHED_FILE), &smoothed.matrix, &header),
    )?;

    let d = stage("cocluster", agglomerate(&smoothed.matrix, &cfg.cocluster))?;
    stage("cocluster", io::write_dendrogram_json(&out(DENDROGRAM_FILE), &d, &header))?;
    stage("cocluster", io::write_trace_csv(&out(TRACE_FILE), &d, &header))?;

    let labels = data.labels.as_ref().map(|(r, c)| (r.as_slice(), c.as_slice()));
    let summary = stage("evaluate", evaluate(&d, labels, cfg.cocluster.restricted_r))?;
    stage("evaluate", io::write_metrics_json(&out(METRICS_FILE), &summary, &header))?;

    if let Some(k) = cfg.cut {
        let written = stage("export", write_cuts(dir, &d, &data, k, &header))?;
        files.extend(written);
    }
    Ok(PipelineReport {
        dendrogram: d,
        summary,
        files,
    })
}

/// Flat cuts of both axes at `k` clusters (clamped to the item count).
pub fn write_cuts(
    dir: &Path,
    d: &Dendrogram<f64>,
    data: &LoadedData,
    k: usize,
    header: &str,
) -> Result<Vec<PathBuf>> {
    let mut files = Vec::new();
    for axis in [Axis::Row, Axis::Col] {
        let k_axis = k.min(d.n_items(axis));
        let p = d.cut(axis, k_axis)?;
        let (names, freq) = match axis {
            Axis::Row => (data.row_names.as_deref(), data.matrix.row_sums()),
            Axis::Col => (data.col_names.as_deref(), data.matrix.col_sums()),
        };
        let (a, b) = io::write_flat_cut(dir, CUT_STEM, axis, &p, names, &freq, header)?;
        files.push(a);
        files.push(b);
    }
    Ok(files)
}
