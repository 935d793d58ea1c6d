use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn tagclust(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tagclust"))
        .args(args)
        .env("TAGCLUST_THREADS", "2")
        .env("RUST_LOG", "warn")
        .output()
        .expect("binary runs")
}

fn ok(args: &[&str]) {
    let out = tagclust(args);
    assert!(
        out.status.success(),
        "{args:?} failed:\n{}",
        String::from_utf8_lossy(&out.stderr)
    );
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

fn pipeline(out: &Path, cost_mode: &str) {
    ok(&[
        "pipeline", "--n", "60", "--k", "3", "--alpha", "0.5", "--beta", "0.5", "--seed", "4",
        "--cost-mode", cost_mode, "--cut", "3", "--out", p(out),
    ]);
}

#[test]
fn pipeline_output_does_not_depend_on_the_directory() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a"), dir.path().join("nested").join("b"));
    pipeline(&a, "composite");
    pipeline(&b, "composite");
    for file in ["dendrogram.json", "trace.csv", "metrics.json", "cut_row.tsv"] {
        assert_eq!(fs::read(a.join(file)).unwrap(), fs::read(b.join(file)).unwrap(), "{file}");
    }
}

#[test]
fn cost_mode_reaches_the_engine() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("c"), dir.path().join("k"));
    pipeline(&a, "composite");
    pipeline(&b, "kl-only");
    let doc = |d: &Path| -> serde_json::Value {
        serde_json::from_str(&fs::read_to_string(d.join("dendrogram.json")).unwrap()).unwrap()
    };
    let (da, db) = (doc(&a), doc(&b));
    assert_eq!(da["config"]["cocluster"]["cost-mode"], "composite");
    assert_eq!(db["config"]["cocluster"]["cost-mode"], "kl-only");
    // kl-only records a unit size term on every merge
    for m in db["rows"]["merges"].as_array().unwrap() {
        assert_eq!(m["merge_cost"].as_f64().unwrap(), 1.0);
    }
    assert!(da["rows"]["merges"]
        .as_array()
        .unwrap()
        .iter()
        .any(|m| m["merge_cost"].as_f64().unwrap() != 1.0));
}

#[test]
fn stepwise_commands_chain() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    ok(&[
        "generate", "--n-x", "50", "--n-y", "40", "--k-x", "3", "--k-y", "2", "--alpha", "0.7", "--beta",
        "0.6", "--seed", "12", "--drop-empty", "--out", p(&d.join("gen")),
    ]);
    ok(&["smooth", "--matrix", p(&d.join("gen/matrix.mtx")), "--out", p(&d.join("sm"))]);
    ok(&[
        "cocluster", "--smoothed", p(&d.join("sm/smoothed.mtx")), "--coupling", "independent",
        "--alpha-balance", "0.3", "--out", p(&d.join("co")),
    ]);
    ok(&[
        "evaluate", "--dendrogram", p(&d.join("co/dendrogram.json")), "--row-labels",
        p(&d.join("gen/row_labels.tsv")), "--col-labels", p(&d.join("gen/col_labels.tsv")),
        "--restricted-r", "2", "--cut", "3", "--matrix", p(&d.join("gen/matrix.mtx")), "--out",
        p(&d.join("ev")),
    ]);
    ok(&[
        "spectral", "--matrix", p(&d.join("gen/matrix.mtx")), "--k", "3", "--seed", "1", "--row-labels",
        p(&d.join("gen/row_labels.tsv")), "--col-labels", p(&d.join("gen/col_labels.tsv")), "--out",
        p(&d.join("sp")),
    ]);
    let metrics: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(d.join("ev/metrics.json")).unwrap()).unwrap();
    assert_eq!(metrics["summary"]["restricted_r"], 2);
    assert!(metrics["summary"]["max_v_mean"].as_f64().unwrap() > 0.0);
    let cut = fs::read_to_string(d.join("ev/cut_row_clusters.tsv")).unwrap();
    assert_eq!(cut.lines().filter(|l| !l.starts_with('#')).count(), 1 + 3);
    assert!(d.join("sp/spectral_row_labels.tsv").exists());
}

#[test]
fn bad_input_fails_with_marker() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("run");
    let res = tagclust(&["pipeline", "--matrix", p(&dir.path().join("missing.mtx")), "--out", p(&out)]);
    assert!(!res.status.success());
    assert!(fs::read_to_string(out.join("FAILED")).unwrap().contains("load"));

    let res = tagclust(&["pipeline", "--n", "30", "--k", "2", "--seed", "1", "--alpha-balance", "1.5", "--out", p(&out)]);
    assert!(!res.status.success());
    assert!(String::from_utf8_lossy(&res.stderr).contains("alpha"));
}

#[test]
fn doc_tag_input_applies_the_tag_threshold() {
    let dir = tempfile::tempdir().unwrap();
    let pairs = dir.path().join("pairs.tsv");
    let mut text = String::new();
    for d in 0..12 {
        for t in ["common", if d % 2 == 0 { "even" } else { "odd" }] {
            text.push_str(&format!("doc{d}\t{t}\n"));
        }
        if d == 0 {
            text.push_str("doc0\trare\n");
        }
    }
    fs::write(&pairs, text).unwrap();
    let out = dir.path().join("run");
    ok(&["pipeline", "--doc-tag", p(&pairs), "--min-tag-count", "2", "--cut", "2", "--out", p(&out)]);
    let doc: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(out.join("dendrogram.json")).unwrap()).unwrap();
    assert_eq!(doc["cols"]["n_items"], 3);
    let names = fs::read_to_string(out.join("cut_col.tsv")).unwrap();
    assert!(names.contains("even") && !names.contains("rare"));
}
