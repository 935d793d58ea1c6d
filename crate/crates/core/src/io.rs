//! File formats: doc-tag TSV ingest, Matrix Market, label TSV, dendrogram
//! JSON, trace CSV, metrics summary JSON and flat-cut TSV.
//!
//! Every writer takes a one-line `header` (normally the run configuration as
//! JSON) and embeds it: as a `%` comment in Matrix Market, a `#` comment in
//! TSV and CSV, and a `config` field in JSON.

use std::collections::HashMap;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::dendrogram::{Axis, Dendrogram, MergeRecord, StepTrace};
use crate::error::{Error, Result};
use crate::matrix::{DenseMatrix, SparseBinaryMatrix};
use crate::partition::Partition;
use crate::scalar::Scalar;

pub const DEFAULT_MIN_TAG_COUNT: usize = 5;

fn create(path: &Path) -> Result<BufWriter<File>> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| Error::io(path, e))
}

fn open(path: &Path) -> Result<BufReader<File>> {
    File::open(path)
        .map(BufReader::new)
        .map_err(|e| Error::io(path, e))
}

fn finish(mut w: BufWriter<File>, path: &Path) -> Result<()> {
    w.flush().map_err(|e| Error::io(path, e))
}

fn check_header(header: &str) -> Result<()> {
    if header.contains('\n') || header.contains('\r') {
        return Err(Error::invalid("output header must be a single line"));
    }
    Ok(())
}

fn parse_err(path: &Path, line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        path: path.to_path_buf(),
        line,
        message: message.into(),
    }
}

/// Lines of a text source with 1-based numbers, I/O errors attached to `path`.
fn numbered_lines<'a, R: BufRead + 'a>(
    reader: R,
    path: &'a Path,
) -> impl Iterator<Item = Result<(usize, String)>> + 'a {
    reader
        .lines()
        .enumerate()
        .map(move |(i, l)| l.map(|l| (i + 1, l)).map_err(|e| Error::io(path, e)))
}

// ---------------------------------------------------------------------------
// doc-tag pairs

#[derive(Clone, Debug, PartialEq)]
pub struct DocTagData {
    pub matrix: SparseBinaryMatrix,
    pub doc_ids: Vec<String>,
    pub tag_ids: Vec<String>,
    pub dropped_tags: usize,
    pub dropped_docs: usize,
}

pub fn ingest_doc_tag_pairs(path: &Path, min_count: usize) -> Result<DocTagData> {
    ingest_doc_tag_reader(open(path)?, path, min_count)
}

/// `document<TAB>tag` per line; `#` lines and blank lines are skipped.
/// A tag's count is the number of distinct documents carrying it.
pub fn ingest_doc_tag_reader<R: BufRead>(
    reader: R,
    path: &Path,
    min_count: usize,
) -> Result<DocTagData> {
    let mut doc_index: HashMap<String, usize> = HashMap::new();
    let mut tag_index: HashMap<String, usize> = HashMap::new();
    let mut doc_ids = Vec::new();
    let mut tag_ids = Vec::new();
    let mut pairs = Vec::new();
    for line in numbered_lines(reader, path) {
        let (no, line) = line?;
        let line = line.trim_end_matches('\r');
        if line.trim().is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split('\t').collect();
        if fields.len() != 2 {
            return Err(parse_err(
                path,
                no,
                format!("expected 2 tab-separated fields, found {}", fields.len()),
            ));
        }
        let (doc, tag) = (fields[0].trim(), fields[1].trim());
        if doc.is_empty() || tag.is_empty() {
            return Err(parse_err(path, no, "empty document or tag"));
        }
        let d = *doc_index.entry(doc.to_string()).or_insert_with(|| {
            doc_ids.push(doc.to_string());
            doc_ids.len() - 1
        });
        let t = *tag_index.entry(tag.to_string()).or_insert_with(|| {
            tag_ids.push(tag.to_string());
            tag_ids.len() - 1
        });
        pairs.push((d, t));
    }
    pairs.sort_unstable();
    pairs.dedup();

    let mut tag_count = vec![0usize; tag_ids.len()];
    for &(_, t) in &pairs {
        tag_count[t] += 1;
    }
    let tag_map = compact(tag_count.iter().map(|&c| c >= min_count));
    let mut has_tag = vec![false; doc_ids.len()];
    for &(d, t) in &pairs {
        if tag_map[t].is_some() {
            has_tag[d] = true;
        }
    }
    let doc_map = compact(has_tag.iter().copied());
    let kept_docs: Vec<String> = select(&doc_ids, &doc_map);
    let kept_tags: Vec<String> = select(&tag_ids, &tag_map);
    let dropped_tags = tag_ids.len() - kept_tags.len();
    let dropped_docs = doc_ids.len() - kept_docs.len();
    if dropped_tags > 0 {
        log::info!("dropped {dropped_tags} tag(s) seen in fewer than {min_count} documents");
    }
    if dropped_docs > 0 {
        log::info!("dropped {dropped_docs} document(s) left without tags");
    }
    if kept_docs.is_empty() || kept_tags.is_empty() {
        return Err(Error::invalid(format!(
            "{}: no document-tag pairs left (min count {min_count})",
            path.display()
        )));
    }
    let entries = pairs
        .iter()
        .filter_map(|&(d, t)| Some((doc_map[d]?, tag_map[t]?)));
    let matrix = SparseBinaryMatrix::from_entries(kept_docs.len(), kept_tags.len(), entries)?;
    Ok(DocTagData {
        matrix,
        doc_ids: kept_docs,
        tag_ids: kept_tags,
        dropped_tags,
        dropped_docs,
    })
}

fn compact(keep: impl Iterator<Item = bool>) -> Vec<Option<usize>> {
    let mut next = 0;
    keep.map(|k| {
        k.then(|| {
            next += 1;
            next - 1
        })
    })
    .collect()
}

fn select(ids: &[String], map: &[Option<usize>]) -> Vec<String> {
    ids.iter()
        .zip(map)
        .filter(|(_, m)| m.is_some())
        .map(|(id, _)| id.clone())
        .collect()
}

// ---------------------------------------------------------------------------
// Matrix Market

pub fn write_matrix_market_pattern(
    path: &Path,
    m: &SparseBinaryMatrix,
    header: &str,
) -> Result<()> {
    check_header(header)?;
    let mut w = create(path)?;
    let io = |e| Error::io(path, e);
    writeln!(w, "%%MatrixMarket matrix coordinate pattern general").map_err(io)?;
    writeln!(w, "% {header}").map_err(io)?;
    writeln!(w, "{} {} {}", m.n_rows(), m.n_cols(), m.nnz()).map_err(io)?;
    for (i, j) in m.entries() {
        writeln!(w, "{} {}", i + 1, j + 1).map_err(io)?;
    }
    finish(w, path)
}

/// Nonzero entries only, values printed with round-trip precision.
pub fn write_matrix_market_real<T: Scalar>(
    path: &Path,
    m: &DenseMatrix<T>,
    header: &str,
) -> Result<()> {
    check_header(header)?;
    let mut w = create(path)?;
    let io = |e| Error::io(path, e);
    let nnz = m.values().iter().filter(|v| **v != T::zero()).count();
    writeln!(w, "%%MatrixMarket matrix coordinate real general").map_err(io)?;
    writeln!(w, "% {header}").map_err(io)?;
    writeln!(w, "{} {} {}", m.n_rows(), m.n_cols(), nnz).map_err(io)?;
    for i in 0..m.n_rows() {
        for (j, v) in m.row(i).iter().enumerate() {
            if *v != T::zero() {
                writeln!(w, "{} {} {}", i + 1, j + 1, v).map_err(io)?;
            }
        }
    }
    finish(w, path)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum MmField {
    Pattern,
    Real,
    Integer,
}

struct MmEntries {
    n_rows: usize,
    n_cols: usize,
    field: MmField,
    entries: Vec<(usize, usize, f64)>,
}

fn read_mm<R: BufRead>(reader: R, path: &Path) -> Result<MmEntries> {
    let mut lines = numbered_lines(reader, path);
    let (_, banner) = lines
        .next()
        .transpose()?
        .ok_or_else(|| parse_err(path, 1, "empty file"))?;
    let tokens: Vec<String> = banner.split_whitespace().map(str::to_lowercase).collect();
    if tokens.len() != 5 || tokens[0] != "%%matrixmarket" || tokens[1] != "matrix" {
        return Err(parse_err(path, 1, "missing %%MatrixMarket matrix banner"));
    }
    if tokens[2] != "coordinate" {
        return Err(parse_err(path, 1, "only coordinate format is supported"));
    }
    let field = match tokens[3].as_str() {
        "pattern" => MmField::Pattern,
        "real" | "double" => MmField::Real,
        "integer" => MmField::Integer,
        other => return Err(parse_err(path, 1, format!("unsupported field type {other}"))),
    };
    if tokens[4] != "general" {
        return Err(parse_err(path, 1, "only general symmetry is supported"));
    }

    let mut size: Option<(usize, usize, usize)> = None;
    let mut entries = Vec::new();
    for line in lines {
        let (no, line) = line?;
        let t = line.trim();
        if t.is_empty() || t.starts_with('%') {
            continue;
        }
        let fields: Vec<&str> = t.split_whitespace().collect();
        let num = |s: &str| {
            s.parse::<usize>()
                .map_err(|_| parse_err(path, no, format!("bad integer {s:?}")))
        };
        match size {
            None => {
                if fields.len() != 3 {
                    return Err(parse_err(path, no, "size line needs rows, columns, entries"));
                }
                size = Some((num(fields[0])?, num(fields[1])?, num(fields[2])?));
            }
            Some((nr, nc, _)) => {
                let want = if field == MmField::Pattern { 2 } else { 3 };
                if fields.len() != want {
                    return Err(parse_err(path, no, format!("expected {want} fields")));
                }
                let (i, j) = (num(fields[0])?, num(fields[1])?);
                if i == 0 || j == 0 || i > nr || j > nc {
                    return Err(parse_err(path, no, format!("index ({i}, {j}) out of range")));
                }
                let v = if field == MmField::Pattern {
                    1.0
                } else {
                    fields[2]
                        .parse::<f64>()
                        .map_err(|_| parse_err(path, no, format!("bad value {:?}", fields[2])))?
                };
                entries.push((i - 1, j - 1, v));
            }
        }
    }
    let (n_rows, n_cols, nnz) = size.ok_or_else(|| parse_err(path, 1, "missing size line"))?;
    if entries.len() != nnz {
        return Err(Error::invalid(format!(
            "{}: header announces {nnz} entries, found {}",
            path.display(),
            entries.len()
        )));
    }
    Ok(MmEntries {
        n_rows,
        n_cols,
        field,
        entries,
    })
}

/// Reads a binary matrix. Pattern files are taken as is; numeric files must
/// hold only zeros and ones.
pub fn read_matrix_market_binary(path: &Path) -> Result<SparseBinaryMatrix> {
    let mm = read_mm(open(path)?, path)?;
    let mut ones = Vec::with_capacity(mm.entries.len());
    for &(i, j, v) in &mm.entries {
        if v == 1.0 {
            ones.push((i, j));
        } else if v != 0.0 {
            return Err(Error::invalid(format!(
                "{}: entry ({}, {}) = {v} is not binary",
                path.display(),
                i + 1,
                j + 1
            )));
        }
    }
    SparseBinaryMatrix::from_entries(mm.n_rows, mm.n_cols, ones)
}

pub fn read_matrix_market_real(path: &Path) -> Result<DenseMatrix<f64>> {
    let mm = read_mm(open(path)?, path)?;
    let mut values = vec![0.0; mm.n_rows * mm.n_cols];
    let mut seen = vec![false; values.len()];
    for &(i, j, v) in &mm.entries {
        let k = i * mm.n_cols + j;
        if seen[k] {
            return Err(Error::invalid(format!(
                "{}: duplicate entry ({}, {})",
                path.display(),
                i + 1,
                j + 1
            )));
        }
        seen[k] = true;
        values[k] = v;
    }
    if mm.field == MmField::Pattern {
        log::debug!("{}: pattern matrix read as real ones", path.display());
    }
    DenseMatrix::from_vec(mm.n_rows, mm.n_cols, values)
}

// ---------------------------------------------------------------------------
// labels

pub fn write_labels(path: &Path, labels: &[usize], header: &str) -> Result<()> {
    check_header(header)?;
    let mut w = create(path)?;
    let io = |e| Error::io(path, e);
    writeln!(w, "# {header}").map_err(io)?;
    for (i, l) in labels.iter().enumerate() {
        writeln!(w, "{i}\t{l}").map_err(io)?;
    }
    finish(w, path)
}

/// Two columns, item index then cluster id; every index in `0..n` exactly once.
pub fn read_labels(path: &Path) -> Result<Vec<usize>> {
    let mut pairs = Vec::new();
    for line in numbered_lines(open(path)?, path) {
        let (no, line) = line?;
        let t = line.trim();
        if t.is_empty() || t.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = t.split('\t').collect();
        if fields.len() != 2 {
            return Err(parse_err(path, no, "expected item<TAB>label"));
        }
        let parse = |s: &str| {
            s.trim()
                .parse::<usize>()
                .map_err(|_| parse_err(path, no, format!("bad integer {s:?}")))
        };
        pairs.push((parse(fields[0])?, parse(fields[1])?, no));
    }
    let n = pairs.len();
    let mut labels = vec![None; n];
    for (item, label, no) in pairs {
        let slot = labels
            .get_mut(item)
            .ok_or_else(|| parse_err(path, no, format!("item {item} out of range 0..{n}")))?;
        if slot.replace(label).is_some() {
            return Err(parse_err(path, no, format!("item {item} labelled twice")));
        }
    }
    Ok(labels.into_iter().map(|l| l.expect("all items seen")).collect())
}

// ---------------------------------------------------------------------------
// dendrogram and trace

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AxisMerges<T> {
    pub axis: Axis,
    pub n_items: usize,
    pub merges: Vec<MergeRecord<T>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DendrogramDocument<T> {
    pub config: serde_json::Value,
    pub rows: AxisMerges<T>,
    pub cols: AxisMerges<T>,
    pub trace: Vec<StepTrace<T>>,
}

impl<T: Scalar> DendrogramDocument<T> {
    pub fn new(d: &Dendrogram<T>, config: serde_json::Value) -> Self {
        Self {
            config,
            rows: AxisMerges {
                axis: Axis::Row,
                n_items: d.n_rows,
                merges: d.row_merges.clone(),
            },
            cols: AxisMerges {
                axis: Axis::Col,
                n_items: d.n_cols,
                merges: d.col_merges.clone(),
            },
            trace: d.trace.clone(),
        }
    }

    pub fn into_dendrogram(self) -> Result<Dendrogram<T>> {
        if self.rows.axis != Axis::Row || self.cols.axis != Axis::Col {
            return Err(Error::invalid("dendrogram axes are swapped"));
        }
        let d = Dendrogram {
            n_rows: self.rows.n_items,
            n_cols: self.cols.n_items,
            row_merges: self.rows.merges,
            col_merges: self.cols.merges,
            trace: self.trace,
        };
        // replaying validates the linkage ids
        let mut replay = d.replay()?;
        while replay.advance()?.is_some() {}
        Ok(d)
    }
}

fn header_value(header: &str) -> serde_json::Value {
    serde_json::from_str(header).unwrap_or_else(|_| serde_json::Value::String(header.to_string()))
}

pub fn write_dendrogram_json<T: Scalar + Serialize>(
    path: &Path,
    d: &Dendrogram<T>,
    header: &str,
) -> Result<()> {
    check_header(header)?;
    let doc = DendrogramDocument::new(d, header_value(header));
    write_json(path, &doc)
}

pub fn read_dendrogram_json(path: &Path) -> Result<Dendrogram<f64>> {
    let mut text = String::new();
    open(path)?
        .read_to_string(&mut text)
        .map_err(|e| Error::io(path, e))?;
    let doc: DendrogramDocument<f64> = serde_json::from_str(&text)?;
    doc.into_dendrogram()
}

pub fn write_json<S: Serialize>(path: &Path, value: &S) -> Result<()> {
    let mut w = create(path)?;
    serde_json::to_writer_pretty(&mut w, value)?;
    writeln!(w).map_err(|e| Error::io(path, e))?;
    finish(w, path)
}

/// One CSV row per trace entry, columns in `StepTrace` field order.
pub fn write_trace_csv<T: Scalar + Serialize>(
    path: &Path,
    d: &Dendrogram<T>,
    header: &str,
) -> Result<()> {
    check_header(header)?;
    let mut w = create(path)?;
    writeln!(w, "# {header}").map_err(|e| Error::io(path, e))?;
    let mut csv = csv::Writer::from_writer(w);
    for entry in &d.trace {
        csv.serialize(entry)?;
    }
    let w = csv
        .into_inner()
        .map_err(|e| Error::io(path, e.into_error()))?;
    finish(w, path)
}

pub fn read_trace_csv(path: &Path) -> Result<Vec<StepTrace<f64>>> {
    let mut csv = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .from_reader(open(path)?);
    let rows: std::result::Result<Vec<StepTrace<f64>>, _> = csv.deserialize().collect();
    Ok(rows?)
}

/// Summary document: the header plus any serializable payload.
#[derive(Clone, Debug, Serialize)]
pub struct MetricsDocument<'a, S: Serialize> {
    pub config: serde_json::Value,
    pub summary: &'a S,
}

pub fn write_metrics_json<S: Serialize>(path: &Path, summary: &S, header: &str) -> Result<()> {
    check_header(header)?;
    write_json(
        path,
        &MetricsDocument {
            config: header_value(header),
            summary,
        },
    )
}

// ---------------------------------------------------------------------------
// flat cuts

/// One cluster of a flat cut with its most frequent members.
#[derive(Clone, Debug, PartialEq)]
pub struct CutCluster {
    pub id: usize,
    pub size: usize,
    /// Up to three members by decreasing frequency, then increasing index.
    pub top: Vec<usize>,
}

pub fn cut_clusters(p: &Partition, frequency: &[usize]) -> Result<Vec<CutCluster>> {
    if frequency.len() != p.n_items() {
        return Err(Error::invalid("one frequency per item is required"));
    }
    Ok(p.cluster_ids()
        .map(|id| {
            let mut members = p.members(id).expect("live cluster").to_vec();
            members.sort_by(|&a, &b| frequency[b].cmp(&frequency[a]).then(a.cmp(&b)));
            members.truncate(3);
            CutCluster {
                id: id.index(),
                size: p.size(id).expect("live cluster"),
                top: members,
            }
        })
        .collect())
}

/// Writes `<stem>_<axis>.tsv` (item, name, cluster) and
/// `<stem>_<axis>_clusters.tsv` (cluster, size, top members) for one axis.
pub fn write_flat_cut(
    dir: &Path,
    stem: &str,
    axis: Axis,
    p: &Partition,
    names: Option<&[String]>,
    frequency: &[usize],
    header: &str,
) -> Result<(PathBuf, PathBuf)> {
    check_header(header)?;
    if names.is_some_and(|n| n.len() != p.n_items()) {
        return Err(Error::invalid("one name per item is required"));
    }
    let name = |i: usize| names.map_or_else(|| i.to_string(), |n| n[i].clone());

    let items_path = dir.join(format!("{stem}_{}.tsv", axis.name()));
    let mut w = create(&items_path)?;
    let io = |e| Error::io(&items_path, e);
    writeln!(w, "# {header}").map_err(io)?;
    writeln!(w, "item\tname\tcluster").map_err(io)?;
    for (i, id) in p.assignment().iter().enumerate() {
        writeln!(w, "{i}\t{}\t{id}", name(i)).map_err(io)?;
    }
    finish(w, &items_path)?;

    let clusters_path = dir.join(format!("{stem}_{}_clusters.tsv", axis.name()));
    let mut w = create(&clusters_path)?;
    let io = |e| Error::io(&clusters_path, e);
    writeln!(w, "# {header}").map_err(io)?;
    writeln!(w, "cluster\tsize\ttop_members").map_err(io)?;
    for c in cut_clusters(p, frequency)? {
        let top: Vec<String> = c.top.iter().map(|&i| name(i)).collect();
        writeln!(w, "{}\t{}\t{}", c.id, c.size, top.join(",")).map_err(io)?;
    }
    finish(w, &clusters_path)?;
    Ok((items_path, clusters_path))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Cursor;

    fn ingest(text: &str, min: usize) -> Result<DocTagData> {
        ingest_doc_tag_reader(Cursor::new(text), Path::new("mem.tsv"), min)
    }

    #[test]
    fn small_file_with_duplicates() {
        let d = ingest("# c\nd1\ta\nd1\tb\nd2\ta\nd1\ta\nd2\tc\n", 1).unwrap();
        assert_eq!(d.doc_ids, vec!["d1", "d2"]);
        assert_eq!(d.tag_ids, vec!["a", "b", "c"]);
        assert_eq!((d.matrix.n_rows(), d.matrix.n_cols(), d.matrix.nnz()), (2, 3, 4));
    }

    #[test]
    fn rare_tags_and_tagless_docs_are_dropped() {
        let mut text = String::new();
        for d in 0..5 {
            text.push_str(&format!("doc{d}\tcommon\n"));
        }
        for d in 0..4 {
            text.push_str(&format!("doc{d}\trare\n"));
        }
        text.push_str("lonely\trare\n");
        text.push_str("lonely2\tonce\n");
        let d = ingest(&text, 5).unwrap();
        // "rare" reaches 5 documents, "once" does not
        assert_eq!(d.tag_ids, vec!["common", "rare"]);
        assert_eq!(d.dropped_docs, 1);
        let d = ingest(&text.replace("lonely\trare\n", ""), 5).unwrap();
        assert_eq!(d.tag_ids, vec!["common"]);
        assert_eq!(d.dropped_tags, 2);
    }

    #[test]
    fn empty_and_malformed_inputs() {
        assert!(matches!(ingest("", 1), Err(Error::InvalidInput(_))));
        assert!(matches!(ingest("# only comments\n", 1), Err(Error::InvalidInput(_))));
        match ingest("a\tb\nbroken line\n", 1) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 2),
            other => panic!("expected parse error, got {other:?}"),
        }
        assert!(matches!(ingest("a\tb\tc\n", 1), Err(Error::Parse { line: 1, .. })));
    }

    #[test]
    fn matrix_market_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let m = SparseBinaryMatrix::from_entries(3, 4, vec![(0, 0), (2, 3), (1, 1)]).unwrap();
        let p = dir.path().join("m.mtx");
        write_matrix_market_pattern(&p, &m, "{\"k\":1}").unwrap();
        assert_eq!(read_matrix_market_binary(&p).unwrap(), m);

        let dense = DenseMatrix::from_rows(&[vec![0.1, 0.0], vec![1.0 / 3.0, 2e-17]]).unwrap();
        let p = dir.path().join("d.mtx");
        write_matrix_market_real(&p, &dense, "h").unwrap();
        assert_eq!(read_matrix_market_real(&p).unwrap(), dense);
        assert!(read_matrix_market_binary(&p).is_err());
    }

    #[test]
    fn matrix_market_errors_carry_lines() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("bad.mtx");
        std::fs::write(&p, "%%MatrixMarket matrix coordinate pattern general\n2 2 1\n3 1\n").unwrap();
        assert!(matches!(read_matrix_market_binary(&p), Err(Error::Parse { line: 3, .. })));
        std::fs::write(&p, "%%MatrixMarket matrix array real general\n").unwrap();
        assert!(matches!(read_matrix_market_binary(&p), Err(Error::Parse { line: 1, .. })));
        assert!(matches!(
            read_matrix_market_binary(&dir.path().join("missing.mtx")),
            Err(Error::Io { .. })
        ));
    }

    #[test]
    fn labels_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("l.tsv");
        write_labels(&p, &[3, 1, 1, 0], "x").unwrap();
        assert_eq!(read_labels(&p).unwrap(), vec![3, 1, 1, 0]);
        std::fs::write(&p, "0\t1\n0\t2\n").unwrap();
        assert!(read_labels(&p).is_err());
        assert!(write_labels(&p, &[1], "two\nlines").is_err());
    }

    #[test]
    fn top_members_by_frequency() {
        let p = Partition::from_labels(&[0, 0, 0, 0, 1]).unwrap();
        let c = cut_clusters(&p, &[1, 5, 3, 5, 2]).unwrap();
        assert_eq!(c[0].top, vec![1, 3, 2]);
        assert_eq!(c[0].size, 4);
        assert_eq!(c[1].top, vec![4]);
    }
}
