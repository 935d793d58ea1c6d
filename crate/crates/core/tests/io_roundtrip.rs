use std::fs;
use std::path::Path;

use tagclust::io::{
    ingest_doc_tag_pairs, read_dendrogram_json, read_labels, read_matrix_market_binary,
    read_matrix_market_real, read_trace_csv,
};
use tagclust::metrics::v_measure;
use tagclust::pipeline::{
    load_input, run_pipeline, InputSource, RunConfig, COL_LABELS_FILE, DENDROGRAM_FILE, MATRIX_FILE,
    ROW_LABELS_FILE, SMOOTHED_FILE, TRACE_FILE,
};
use tagclust::synthgen::CheckerboardSpec;
use tagclust::{Axis, CostMode};

fn checkerboard(n: usize, k: usize, seed: u64) -> InputSource {
    InputSource::Checkerboard(CheckerboardSpec::square(n, k, 0.5, 0.5, seed))
}

fn header_line(path: &Path) -> String {
    let text = fs::read_to_string(path).unwrap();
    text.lines().find(|l| l.contains('{')).unwrap().to_string()
}

#[test]
fn exported_dataset_reloads_identically() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = RunConfig::new(checkerboard(60, 3, 5), dir.path());
    run_pipeline(&cfg).unwrap();
    let original = load_input(&cfg.input).unwrap();

    let reloaded = load_input(&InputSource::MatrixMarket {
        path: dir.path().join(MATRIX_FILE),
        row_labels: Some(dir.path().join(ROW_LABELS_FILE)),
        col_labels: Some(dir.path().join(COL_LABELS_FILE)),
    })
    .unwrap();
    assert_eq!(reloaded.matrix, original.matrix);
    assert_eq!(reloaded.labels, original.labels);
    assert_eq!(read_matrix_market_binary(&dir.path().join(MATRIX_FILE)).unwrap(), original.matrix);

    let (rows, _) = original.labels.unwrap();
    assert_eq!(read_labels(&dir.path().join(ROW_LABELS_FILE)).unwrap(), rows);

    let smoothed = read_matrix_market_real(&dir.path().join(SMOOTHED_FILE)).unwrap();
    let fresh = tagclust::smoothing::smooth::<f64>(&original.matrix, &Default::default()).unwrap().matrix;
    assert_eq!(smoothed, fresh);
}

#[test]
fn headers_record_the_configuration() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let ca = RunConfig::new(checkerboard(40, 2, 1), a.path());
    let mut cb = ca.clone();
    cb.output_dir = b.path().to_path_buf();
    cb.cocluster.cost_mode = CostMode::KlOnly;
    run_pipeline(&ca).unwrap();
    run_pipeline(&cb).unwrap();
    for file in [MATRIX_FILE, TRACE_FILE, ROW_LABELS_FILE] {
        let (ha, hb) = (header_line(&a.path().join(file)), header_line(&b.path().join(file)));
        assert!(ha.contains("\"composite\"") && hb.contains("\"kl-only\""), "{ha}");
        assert_ne!(ha, hb);
    }
    let doc: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(b.path().join(DENDROGRAM_FILE)).unwrap()).unwrap();
    assert_eq!(doc["config"]["cocluster"]["cost-mode"], "kl-only");
}

#[test]
fn four_documents_give_three_row_merges() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("pairs.tsv");
    let mut text = String::from("# doc\ttag\n");
    for (d, tags) in [("d1", "ab"), ("d2", "ab"), ("d3", "bc"), ("d4", "c")] {
        for t in tags.chars() {
            text.push_str(&format!("{d}\t{t}\n"));
        }
    }
    fs::write(&input, text).unwrap();
    let data = ingest_doc_tag_pairs(&input, 1).unwrap();
    assert_eq!(data.matrix.n_rows(), 4);
    let out = dir.path().join("run");
    let cfg = RunConfig::new(InputSource::DocTag { path: input, min_tag_count: 1 }, &out);
    run_pipeline(&cfg).unwrap();
    let doc: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(out.join(DENDROGRAM_FILE)).unwrap()).unwrap();
    assert_eq!(doc["rows"]["merges"].as_array().unwrap().len(), 3);
    assert_eq!(doc["cols"]["merges"].as_array().unwrap().len(), 2);
}

#[test]
fn trace_has_one_row_per_merge_and_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let report = run_pipeline(&RunConfig::new(checkerboard(50, 4, 2), dir.path())).unwrap();
    let d = &report.dendrogram;
    let trace = read_trace_csv(&dir.path().join(TRACE_FILE)).unwrap();
    assert_eq!(trace.len(), d.total_merges());
    assert_eq!(trace, d.trace);
    assert_eq!(&read_dendrogram_json(&dir.path().join(DENDROGRAM_FILE)).unwrap(), d);
}

#[test]
fn cut_at_estimate_reproduces_curve_value() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = RunConfig::new(checkerboard(80, 4, 9), dir.path());
    let report = run_pipeline(&cfg).unwrap();
    let (rl, cl) = load_input(&cfg.input).unwrap().labels.unwrap();
    for (axis, truth) in [(Axis::Row, &rl), (Axis::Col, &cl)] {
        let s = report.summary.axis(axis);
        let p = report.dendrogram.cut(axis, s.k_hat).unwrap();
        let v = v_measure(truth, &p.labels()).unwrap().v_measure;
        assert!((v - s.at_k_hat.unwrap().v_measure).abs() < 1e-12);
    }
}

#[test]
fn failed_run_leaves_marker() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = RunConfig::new(
        InputSource::MatrixMarket {
            path: dir.path().join("missing.mtx"),
            row_labels: None,
            col_labels: None,
        },
        dir.path().join("out"),
    );
    let err = run_pipeline(&cfg).unwrap_err();
    let marker = fs::read_to_string(dir.path().join("out").join("FAILED")).unwrap();
    assert!(marker.contains("load"), "{marker}");
    assert!(err.to_string().contains("load"));
    // a later successful run clears it
    let mut ok = RunConfig::new(checkerboard(30, 2, 3), dir.path().join("out"));
    ok.cut = Some(2);
    let report = run_pipeline(&ok).unwrap();
    assert!(!dir.path().join("out").join("FAILED").exists());
    assert!(report.files.iter().any(|f| f.ends_with("cut_row_clusters.tsv")));
}
