//! `tagclust` command line.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use tagclust::dendrogram::Axis;
use tagclust::io;
use tagclust::metrics::v_measure;
use tagclust::pipeline::{self, InputSource, LoadedData, RunConfig};
use tagclust::smoothing::{smooth, SmoothingConfig};
use tagclust::spectral::{spectral_cocluster_detailed, SpectralConfig};
use tagclust::synthgen::{generate_checkerboard, CheckerboardSpec};
use tagclust::{agglomerate, evaluate::evaluate, CoclusterConfig, Coupling, CostMode};

const THREADS_ENV: &str = "TAGCLUST_THREADS";

#[derive(Parser, Debug)]
#[command(name = "tagclust", version, about = "Tag co-clustering for sparse document-keyword data")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Generate a labelled checkerboard dataset.
    Generate(GenerateArgs),
    /// Smooth a binary matrix into a real one.
    Smooth(SmoothArgs),
    /// Agglomerate a smoothed matrix into a dendrogram.
    Cocluster(CoclusterArgs),
    /// Spectral co-clustering baseline.
    Spectral(SpectralArgs),
    /// Stopping estimate, metrics and flat cuts of a dendrogram.
    Evaluate(EvaluateArgs),
    /// Every stage end to end.
    Pipeline(PipelineArgs),
}

#[derive(Copy, Clone, Debug, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
enum CostModeArg {
    Composite,
    KlOnly,
}

impl From<CostModeArg> for CostMode {
    fn from(v: CostModeArg) -> Self {
        match v {
            CostModeArg::Composite => CostMode::Composite,
            CostModeArg::KlOnly => CostMode::KlOnly,
        }
    }
}

#[derive(Copy, Clone, Debug, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
enum CouplingArg {
    Cocluster,
    Independent,
}

impl From<CouplingArg> for Coupling {
    fn from(v: CouplingArg) -> Self {
        match v {
            CouplingArg::Cocluster => Coupling::Cocluster,
            CouplingArg::Independent => Coupling::Independent,
        }
    }
}

#[derive(Args, Debug, Clone, Serialize)]
struct CheckerboardArgs {
    /// Rows (documents).
    #[arg(long)]
    n_x: usize,
    /// Columns (keywords).
    #[arg(long)]
    n_y: usize,
    /// Row clusters.
    #[arg(long)]
    k_x: usize,
    /// Column clusters.
    #[arg(long)]
    k_y: usize,
    /// Probability that a tile is filled.
    #[arg(long, default_value_t = 0.2)]
    alpha: f64,
    /// Upper bound of the per-tile fill rate.
    #[arg(long, default_value_t = 0.2)]
    beta: f64,
    #[arg(long)]
    seed: u64,
    /// Permute rows and columns.
    #[arg(long)]
    shuffle: bool,
}

impl CheckerboardArgs {
    fn spec(&self) -> CheckerboardSpec {
        CheckerboardSpec {
            n_x: self.n_x,
            n_y: self.n_y,
            k_x: self.k_x,
            k_y: self.k_y,
            alpha: self.alpha,
            beta: self.beta,
            seed: self.seed,
            shuffle: self.shuffle,
        }
    }
}

#[derive(Args, Debug, Serialize)]
struct GenerateArgs {
    #[command(flatten)]
    checkerboard: CheckerboardArgs,
    /// Drop all-zero rows and columns (and their labels) before writing.
    #[arg(long)]
    drop_empty: bool,
    #[arg(long)]
    #[serde(skip)]
    out: PathBuf,
}

#[derive(Args, Debug, Serialize)]
#[group(required = true, multiple = false, id = "binary_input")]
struct BinaryInput {
    /// Binary Matrix Market file.
    #[arg(long, group = "binary_input")]
    matrix: Option<PathBuf>,
    /// Document<TAB>tag pairs.
    #[arg(long, group = "binary_input")]
    doc_tag: Option<PathBuf>,
}

#[derive(Args, Debug, Serialize)]
struct SmoothArgs {
    #[command(flatten)]
    input: BinaryInput,
    /// Tags seen in fewer documents are dropped.
    #[arg(long, default_value_t = io::DEFAULT_MIN_TAG_COUNT)]
    min_tag_count: usize,
    #[arg(long, default_value_t = tagclust::smoothing::DEFAULT_SINKHORN_TOL)]
    sinkhorn_tol: f64,
    #[arg(long, default_value_t = tagclust::smoothing::DEFAULT_SINKHORN_MAX_ITERS)]
    sinkhorn_max_iters: usize,
    #[arg(long)]
    #[serde(skip)]
    out: PathBuf,
}

#[derive(Args, Debug, Clone, Serialize)]
struct EngineArgs {
    #[arg(long, value_enum, default_value_t = CostModeArg::Composite)]
    cost_mode: CostModeArg,
    #[arg(long, value_enum, default_value_t = CouplingArg::Cocluster)]
    coupling: CouplingArg,
    /// Weight of KL(B||A) in the symmetrized divergence.
    #[arg(long, default_value_t = 0.5)]
    alpha_balance: f64,
    /// Clusters of at most this size are ignored by the restricted entropy.
    #[arg(long, default_value_t = 1)]
    restricted_r: usize,
    /// Record trace metrics every this many merges.
    #[arg(long, default_value_t = 1)]
    trace_stride: usize,
}

impl EngineArgs {
    fn config(&self) -> CoclusterConfig {
        CoclusterConfig {
            cost_mode: self.cost_mode.into(),
            coupling: self.coupling.into(),
            alpha: self.alpha_balance,
            trace_metrics: true,
            trace_stride: self.trace_stride,
            restricted_r: self.restricted_r,
        }
    }
}

#[derive(Args, Debug, Serialize)]
struct CoclusterArgs {
    /// Real Matrix Market file written by `smooth`.
    #[arg(long)]
    smoothed: PathBuf,
    #[command(flatten)]
    engine: EngineArgs,
    #[arg(long)]
    #[serde(skip)]
    out: PathBuf,
}

#[derive(Args, Debug, Serialize)]
struct LabelArgs {
    #[arg(long, requires = "col_labels")]
    row_labels: Option<PathBuf>,
    #[arg(long, requires = "row_labels")]
    col_labels: Option<PathBuf>,
}

impl LabelArgs {
    fn read(&self) -> Result<Option<(Vec<usize>, Vec<usize>)>> {
        Ok(match (&self.row_labels, &self.col_labels) {
            (Some(r), Some(c)) => Some((io::read_labels(r)?, io::read_labels(c)?)),
            _ => None,
        })
    }
}

#[derive(Args, Debug, Serialize)]
struct SpectralArgs {
    /// Binary Matrix Market file.
    #[arg(long)]
    matrix: PathBuf,
    #[arg(long)]
    k: usize,
    #[arg(long)]
    seed: u64,
    #[arg(long, default_value_t = tagclust::spectral::DEFAULT_KMEANS_RESTARTS)]
    restarts: usize,
    #[arg(long, default_value_t = tagclust::spectral::DEFAULT_KMEANS_MAX_ITERS)]
    max_iters: usize,
    #[command(flatten)]
    labels: LabelArgs,
    #[arg(long)]
    #[serde(skip)]
    out: PathBuf,
}

#[derive(Args, Debug, Serialize)]
struct EvaluateArgs {
    #[arg(long)]
    dendrogram: PathBuf,
    #[command(flatten)]
    labels: LabelArgs,
    #[arg(long, default_value_t = 1)]
    restricted_r: usize,
    /// Write flat cuts at this many clusters per axis.
    #[arg(long)]
    cut: Option<usize>,
    /// Binary matrix used to rank cluster members by frequency.
    #[arg(long)]
    matrix: Option<PathBuf>,
    #[arg(long)]
    #[serde(skip)]
    out: PathBuf,
}

#[derive(Args, Debug, Serialize)]
#[group(required = true, multiple = false, id = "pipeline_input")]
struct PipelineInput {
    #[arg(long, group = "pipeline_input")]
    matrix: Option<PathBuf>,
    #[arg(long, group = "pipeline_input")]
    doc_tag: Option<PathBuf>,
    /// Generate a square checkerboard with this many items per axis.
    #[arg(long, group = "pipeline_input", requires_all = ["k", "seed"])]
    n: Option<usize>,
}

#[derive(Args, Debug, Serialize)]
struct PipelineArgs {
    #[command(flatten)]
    input: PipelineInput,
    #[command(flatten)]
    labels: LabelArgs,
    /// Checkerboard clusters per axis.
    #[arg(long)]
    k: Option<usize>,
    #[arg(long, default_value_t = 0.2)]
    alpha: f64,
    #[arg(long, default_value_t = 0.2)]
    beta: f64,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, default_value_t = io::DEFAULT_MIN_TAG_COUNT)]
    min_tag_count: usize,
    #[command(flatten)]
    engine: EngineArgs,
    #[arg(long)]
    cut: Option<usize>,
    #[arg(long)]
    #[serde(skip)]
    out: PathBuf,
}

fn header<A: Serialize>(command: &str, args: &A) -> String {
    serde_json::json!({ "command": command, "version": env!("CARGO_PKG_VERSION"), "args": args })
        .to_string()
}

fn ensure_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))
}

fn write_names(path: &Path, names: &[String], header: &str) -> Result<()> {
    let mut text = format!("# {header}\n");
    for (i, n) in names.iter().enumerate() {
        text.push_str(&format!("{i}\t{n}\n"));
    }
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

fn cmd_generate(args: &GenerateArgs) -> Result<()> {
    ensure_dir(&args.out)?;
    let h = header("generate", args);
    let ds = generate_checkerboard(&args.checkerboard.spec())?;
    let ds = if args.drop_empty {
        ds.without_empty()
    } else {
        if !ds.empty_rows.is_empty() || !ds.empty_cols.is_empty() {
            log::warn!(
                "{} empty row(s) and {} empty column(s); pass --drop-empty to remove them",
                ds.empty_rows.len(),
                ds.empty_cols.len()
            );
        }
        ds
    };
    log::info!("fill rate {:.4}", ds.fill_rate());
    io::write_matrix_market_pattern(&args.out.join(pipeline::MATRIX_FILE), &ds.matrix, &h)?;
    io::write_labels(&args.out.join(pipeline::ROW_LABELS_FILE), &ds.row_labels, &h)?;
    io::write_labels(&args.out.join(pipeline::COL_LABELS_FILE), &ds.col_labels, &h)?;
    Ok(())
}

fn cmd_smooth(args: &SmoothArgs) -> Result<()> {
    ensure_dir(&args.out)?;
    let h = header("smooth", args);
    let matrix = match (&args.input.matrix, &args.input.doc_tag) {
        (Some(p), _) => io::read_matrix_market_binary(p)?,
        (None, Some(p)) => {
            let d = io::ingest_doc_tag_pairs(p, args.min_tag_count)?;
            io::write_matrix_market_pattern(&args.out.join(pipeline::MATRIX_FILE), &d.matrix, &h)?;
            write_names(&args.out.join("row_names.tsv"), &d.doc_ids, &h)?;
            write_names(&args.out.join("col_names.tsv"), &d.tag_ids, &h)?;
            d.matrix
        }
        (None, None) => bail!("an input is required"),
    };
    let cfg = SmoothingConfig {
        tol: args.sinkhorn_tol,
        max_iters: args.sinkhorn_max_iters,
    };
    let s = smooth::<f64>(&matrix, &cfg).context("smoothing")?;
    io::write_matrix_market_real(&args.out.join(pipeline::SMOOTHED_FILE), &s.matrix, &h)?;
    Ok(())
}

fn cmd_cocluster(args: &CoclusterArgs) -> Result<()> {
    ensure_dir(&args.out)?;
    let h = header("cocluster", args);
    let m = io::read_matrix_market_real(&args.smoothed)?;
    let d = agglomerate(&m, &args.engine.config()).context("agglomeration")?;
    io::write_dendrogram_json(&args.out.join(pipeline::DENDROGRAM_FILE), &d, &h)?;
    io::write_trace_csv(&args.out.join(pipeline::TRACE_FILE), &d, &h)?;
    Ok(())
}

#[derive(Serialize)]
struct SpectralSummary {
    k: usize,
    dims: Vec<usize>,
    inertia: f64,
    k_rows: usize,
    k_cols: usize,
    v_rows: Option<tagclust::metrics::VMeasure>,
    v_cols: Option<tagclust::metrics::VMeasure>,
}

fn cmd_spectral(args: &SpectralArgs) -> Result<()> {
    ensure_dir(&args.out)?;
    let h = header("spectral", args);
    let m = io::read_matrix_market_binary(&args.matrix)?;
    let cfg = SpectralConfig {
        k: args.k,
        kmeans_restarts: args.restarts,
        kmeans_max_iters: args.max_iters,
        seed: args.seed,
    };
    let r = spectral_cocluster_detailed(&m, &cfg)?;
    let (rl, cl) = (r.rows.labels(), r.cols.labels());
    io::write_labels(&args.out.join("spectral_row_labels.tsv"), &rl, &h)?;
    io::write_labels(&args.out.join("spectral_col_labels.tsv"), &cl, &h)?;
    let truth = args.labels.read()?;
    let (v_rows, v_cols) = match &truth {
        Some((tr, tc)) => (Some(v_measure(tr, &rl)?), Some(v_measure(tc, &cl)?)),
        None => (None, None),
    };
    let summary = SpectralSummary {
        k: args.k,
        dims: r.dims.clone(),
        inertia: r.inertia,
        k_rows: r.rows.n_clusters(),
        k_cols: r.cols.n_clusters(),
        v_rows,
        v_cols,
    };
    io::write_metrics_json(&args.out.join("spectral_metrics.json"), &summary, &h)?;
    Ok(())
}

fn cmd_evaluate(args: &EvaluateArgs) -> Result<()> {
    ensure_dir(&args.out)?;
    let h = header("evaluate", args);
    let d = io::read_dendrogram_json(&args.dendrogram)?;
    let labels = args.labels.read()?;
    let l = labels.as_ref().map(|(r, c)| (r.as_slice(), c.as_slice()));
    let summary = evaluate(&d, l, args.restricted_r)?;
    io::write_metrics_json(&args.out.join(pipeline::METRICS_FILE), &summary, &h)?;
    for axis in [Axis::Row, Axis::Col] {
        let s = summary.axis(axis);
        log::info!("{}: k_hat {} (criterion {:.4})", axis.name(), s.k_hat, s.criterion);
    }
    if let Some(k) = args.cut {
        let matrix = match &args.matrix {
            Some(p) => io::read_matrix_market_binary(p)?,
            None => tagclust::SparseBinaryMatrix::from_entries(d.n_rows, d.n_cols, [])?,
        };
        if (matrix.n_rows(), matrix.n_cols()) != (d.n_rows, d.n_cols) {
            bail!("matrix shape does not match the dendrogram");
        }
        let data = LoadedData {
            matrix,
            labels,
            row_names: None,
            col_names: None,
        };
        pipeline::write_cuts(&args.out, &d, &data, k, &h)?;
    }
    Ok(())
}

fn cmd_pipeline(args: &PipelineArgs) -> Result<()> {
    let input = match (&args.input.matrix, &args.input.doc_tag, args.input.n) {
        (Some(p), _, _) => InputSource::MatrixMarket {
            path: p.clone(),
            row_labels: args.labels.row_labels.clone(),
            col_labels: args.labels.col_labels.clone(),
        },
        (None, Some(p), _) => InputSource::DocTag {
            path: p.clone(),
            min_tag_count: args.min_tag_count,
        },
        (None, None, Some(n)) => {
            let (Some(k), Some(seed)) = (args.k, args.seed) else {
                bail!("--n needs --k and --seed");
            };
            InputSource::Checkerboard(CheckerboardSpec::square(n, k, args.alpha, args.beta, seed))
        }
        _ => bail!("an input is required"),
    };
    let mut cfg = RunConfig::new(input, &args.out);
    cfg.cocluster = args.engine.config();
    cfg.cut = args.cut;
    let report = pipeline::run_pipeline(&cfg)?;
    let s = &report.summary;
    println!(
        "k_hat rows {} cols {}{}",
        s.rows.k_hat,
        s.cols.k_hat,
        s.max_v_mean.map_or(String::new(), |v| format!(", max V {v:.4}"))
    );
    Ok(())
}

fn init_threads() -> Result<()> {
    let Ok(raw) = std::env::var(THREADS_ENV) else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .with_context(|| format!("{THREADS_ENV} must be a positive integer, got {raw:?}"))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .context("configuring the thread pool")?;
    Ok(())
}

fn main() -> Result<()> {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let cli = Cli::parse();
    init_threads()?;
    match &cli.command {
        Command::Generate(a) => cmd_generate(a),
        Command::Smooth(a) => cmd_smooth(a),
        Command::Cocluster(a) => cmd_cocluster(a),
        Command::Spectral(a) => cmd_spectral(a),
        Command::Evaluate(a) => cmd_evaluate(a),
        Command::Pipeline(a) => cmd_pipeline(a),
    }
}
