//! Two-table result store: one record per document, one per code cell, plus
//! the lint findings.
//!
//! Each table is a newline-delimited JSON file in the store directory. The
//! whole store is held in memory, keyed by document id, and written back by
//! [`Store::commit`], which replaces each file atomically so concurrent readers
//! see either the old or the new snapshot.

mod export;

use std::collections::BTreeMap;
use std::fs;
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use export::{CELL_COLUMNS, DOCUMENT_COLUMNS, FINDING_COLUMNS};

use crate::ingest::{CellDocument, CellType, DocumentKind};
use crate::lint::{Category, ErrorRates, LintFinding};
use crate::metrics::{CellMetricVector, DocumentMetrics, UnknownMetric, METRIC_NAMES};
use crate::stats::RuleOccurrence;
use crate::Real;

pub const DOCUMENTS_FILE: &str = "documents.jsonl";
pub const CELLS_FILE: &str = "cells.jsonl";
pub const FINDINGS_FILE: &str = "findings.jsonl";

#[derive(Debug, Error)]
pub enum StoreError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}:{line}: malformed record: {message}")]
    Corrupt {
        path: PathBuf,
        line: usize,
        message: String,
    },
    #[error("no document `{doc_id}` in the store")]
    ForeignDocMissing { doc_id: String },
    #[error("record for `{found}` passed with rows of `{expected}`")]
    DocMismatch { expected: String, found: String },
    #[error(transparent)]
    UnknownMetric(#[from] UnknownMetric),
}

fn io_error(path: &Path) -> impl FnOnce(std::io::Error) -> StoreError + '_ {
    move |source| StoreError::Io {
        path: path.to_path_buf(),
        source,
    }
}

/// Metrics that only exist on the stored record.
pub const RECORD_METRICS: [&str; 2] = ["error_total", "error_per_line"];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DocumentRecord {
    pub doc_id: String,
    pub origin_path: String,
    pub kind: DocumentKind,
    pub language_tag: String,
    pub byte_size: u64,
    #[serde(flatten)]
    pub metrics: DocumentMetrics,
    /// Unsuppressed lint findings.
    pub error_total: u64,
    /// Absent when the document has no source lines.
    pub error_per_line: Option<Real>,
}

impl DocumentRecord {
    pub fn new(doc: &CellDocument, metrics: DocumentMetrics, errors: ErrorCount) -> Self {
        DocumentRecord {
            doc_id: doc.doc_id.clone(),
            origin_path: doc.origin_path.clone(),
            kind: doc.kind,
            language_tag: doc.language_tag.clone(),
            byte_size: doc.byte_size,
            metrics,
            error_total: errors.total,
            error_per_line: errors.per_line,
        }
    }

    /// Every name accepted by [`DocumentRecord::value`], in column order.
    pub fn metric_names() -> impl Iterator<Item = &'static str> {
        METRIC_NAMES.iter().chain(RECORD_METRICS.iter()).copied()
    }

    pub fn value(&self, name: &str) -> Result<Option<Real>, UnknownMetric> {
        match name {
            "error_total" => Ok(Some(self.error_total as Real)),
            "error_per_line" => Ok(self.error_per_line),
            other => self.metrics.value(other),
        }
    }
}

/// Error totals as stored; `per_line` is absent for documents without SLOC.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ErrorCount {
    pub total: u64,
    pub per_line: Option<Real>,
}

impl From<ErrorRates> for ErrorCount {
    fn from(r: ErrorRates) -> Self {
        ErrorCount {
            total: r.total,
            per_line: Some(r.per_line),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CellRecord {
    pub doc_id: String,
    pub cell_index: usize,
    pub cell_type: CellType,
    pub line_count: usize,
    pub sloc: u32,
    pub comment_loc: u32,
    pub blank_loc: u32,
    pub extended_comment_loc: u32,
    pub builtin_unique: u32,
    pub builtin_count: u32,
    pub user_unique: u32,
    pub user_count: u32,
    pub api_unique: u32,
    pub api_count: u32,
    pub other_count: u32,
    pub cyclomatic: Option<u32>,
    pub npavg_numerator: u32,
    pub npavg_denominator: u32,
    pub variables_used: Vec<String>,
    pub parse_ok: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub source: Option<String>,
}

impl CellRecord {
    pub fn new(doc: &CellDocument, v: &CellMetricVector, store_source: bool) -> Self {
        let cell = doc.cells.get(v.cell_index);
        CellRecord {
            doc_id: doc.doc_id.clone(),
            cell_index: v.cell_index,
            cell_type: cell.map_or(CellType::Code, |c| c.cell_type),
            line_count: cell.map_or(0, |c| c.line_count),
            sloc: v.line_counts.sloc,
            comment_loc: v.line_counts.comment,
            blank_loc: v.line_counts.blank,
            extended_comment_loc: v.extended_comment_loc,
            builtin_unique: v.builtin_unique,
            builtin_count: v.builtin_count,
            user_unique: v.user_unique,
            user_count: v.user_count,
            api_unique: v.api_unique,
            api_count: v.api_count,
            other_count: v.other_count,
            cyclomatic: v.cyclomatic,
            npavg_numerator: v.npavg_numerator,
            npavg_denominator: v.npavg_denominator,
            variables_used: v.variables_used.iter().cloned().collect(),
            parse_ok: v.parse_ok,
            source: store_source.then(|| cell.map(|c| c.source.clone()).unwrap_or_default()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FindingRecord {
    pub doc_id: String,
    pub rule_id: String,
    pub category: Category,
    pub cell_index: usize,
    pub local_line: usize,
    pub suppressed: bool,
    pub suppression_reason: Option<String>,
}

impl FindingRecord {
    pub fn new(doc_id: &str, f: &LintFinding) -> Self {
        FindingRecord {
            doc_id: doc_id.to_string(),
            rule_id: f.rule_id.clone(),
            category: f.category().unwrap_or(Category::BestPractices),
            cell_index: f.cell_index,
            local_line: f.local_line,
            suppressed: f.suppressed,
            suppression_reason: f.suppression_reason.clone(),
        }
    }
}

impl RuleOccurrence for FindingRecord {
    fn rule_id(&self) -> &str {
        &self.rule_id
    }

    fn is_suppressed(&self) -> bool {
        self.suppressed
    }
}

/// The store for one directory. Single writer; open a second instance to read
/// the last committed snapshot.
#[derive(Debug)]
pub struct Store {
    dir: PathBuf,
    documents: BTreeMap<String, DocumentRecord>,
    cells: BTreeMap<String, Vec<CellRecord>>,
    findings: BTreeMap<String, Vec<FindingRecord>>,
}

impl Store {
    /// Opens the store in `dir`, creating the directory if needed and loading
    /// any committed tables.
    pub fn open(dir: impl AsRef<Path>) -> Result<Self, StoreError> {
        let dir = dir.as_ref().to_path_buf();
        fs::create_dir_all(&dir).map_err(io_error(&dir))?;
        let mut store = Store {
            documents: BTreeMap::new(),
            cells: BTreeMap::new(),
            findings: BTreeMap::new(),
            dir,
        };
        for doc in read_table::<DocumentRecord>(&store.dir.join(DOCUMENTS_FILE))? {
            store.documents.insert(doc.doc_id.clone(), doc);
        }
        for cell in read_table::<CellRecord>(&store.dir.join(CELLS_FILE))? {
            store
                .cells
                .entry(cell.doc_id.clone())
                .or_default()
                .push(cell);
        }
        for f in read_table::<FindingRecord>(&store.dir.join(FINDINGS_FILE))? {
            store.findings.entry(f.doc_id.clone()).or_default().push(f);
        }
        Ok(store)
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    /// Inserts or replaces the document row.
    pub fn put_document(&mut self, record: DocumentRecord) {
        self.documents.insert(record.doc_id.clone(), record);
    }

    /// Replaces all cell rows of `doc_id`.
    pub fn put_cells(
        &mut self,
        doc_id: &str,
        mut records: Vec<CellRecord>,
    ) -> Result<(), StoreError> {
        self.check_rows(doc_id, records.iter().map(|r| r.doc_id.as_str()))?;
        records.sort_by_key(|r| r.cell_index);
        records.dedup_by_key(|r| r.cell_index);
        self.cells.insert(doc_id.to_string(), records);
        Ok(())
    }

    /// Replaces all findings of `doc_id`.
    pub fn put_findings(
        &mut self,
        doc_id: &str,
        records: Vec<FindingRecord>,
    ) -> Result<(), StoreError> {
        self.check_rows(doc_id, records.iter().map(|r| r.doc_id.as_str()))?;
        self.findings.insert(doc_id.to_string(), records);
        Ok(())
    }

    fn check_rows<'a>(
        &self,
        doc_id: &str,
        mut ids: impl Iterator<Item = &'a str>,
    ) -> Result<(), StoreError> {
        if !self.documents.contains_key(doc_id) {
            return Err(StoreError::ForeignDocMissing {
                doc_id: doc_id.to_string(),
            });
        }
        match ids.find(|id| *id != doc_id) {
            Some(found) => Err(StoreError::DocMismatch {
                expected: doc_id.to_string(),
                found: found.to_string(),
            }),
            None => Ok(()),
        }
    }

    pub fn len(&self) -> usize {
        self.documents.len()
    }

    pub fn is_empty(&self) -> bool {
        self.documents.is_empty()
    }

    pub fn document(&self, doc_id: &str) -> Option<&DocumentRecord> {
        self.documents.get(doc_id)
    }

    /// Documents in `doc_id` order, optionally of one kind.
    pub fn documents(
        &self,
        kind: Option<DocumentKind>,
    ) -> impl Iterator<Item = &DocumentRecord> + '_ {
        self.documents
            .values()
            .filter(move |d| kind.is_none_or(|k| d.kind == k))
    }

    pub fn cells(&self, doc_id: &str) -> &[CellRecord] {
        self.cells.get(doc_id).map_or(&[], Vec::as_slice)
    }

    pub fn findings(&self, doc_id: &str) -> &[FindingRecord] {
        self.findings.get(doc_id).map_or(&[], Vec::as_slice)
    }

    /// `(doc_id, value)` for every document of `kind` where the metric is
    /// present, in `doc_id` order.
    pub fn query_metric<'s>(
        &'s self,
        metric: &str,
        kind: Option<DocumentKind>,
    ) -> Result<impl Iterator<Item = (&'s str, Real)> + 's, StoreError> {
        if !DocumentRecord::metric_names().any(|m| m == metric) {
            return Err(UnknownMetric(metric.to_string()).into());
        }
        let metric = metric.to_string();
        Ok(self.documents(kind).filter_map(move |d| {
            let value = d.value(&metric).expect("name checked above")?;
            Some((d.doc_id.as_str(), value))
        }))
    }

    /// Writes every table. Each file is written to a temporary sibling and
    /// renamed into place.
    pub fn commit(&self) -> Result<(), StoreError> {
        write_table(&self.dir.join(DOCUMENTS_FILE), self.documents.values())?;
        write_table(&self.dir.join(CELLS_FILE), self.cells.values().flatten())?;
        write_table(
            &self.dir.join(FINDINGS_FILE),
            self.findings.values().flatten(),
        )?;
        Ok(())
    }
}

fn read_table<T: DeserializeOwned>(path: &Path) -> Result<Vec<T>, StoreError> {
    let file = match fs::File::open(path) {
        Ok(f) => f,
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(Vec::new()),
        Err(e) => return Err(io_error(path)(e)),
    };
    let mut rows = Vec::new();
    for (n, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(io_error(path))?;
        if line.trim().is_empty() {
            continue;
        }
        let row = serde_json::from_str(&line).map_err(|e| StoreError::Corrupt {
            path: path.to_path_buf(),
            line: n + 1,
            message: e.to_string(),
        })?;
        rows.push(row);
    }
    Ok(rows)
}

fn write_table<'a, T: Serialize + 'a>(
    path: &Path,
    rows: impl Iterator<Item = &'a T>,
) -> Result<(), StoreError> {
    let tmp = path.with_extension("jsonl.tmp");
    let mut out = std::io::BufWriter::new(fs::File::create(&tmp).map_err(io_error(&tmp))?);
    for row in rows {
        serde_json::to_writer(&mut out, row).map_err(|e| io_error(&tmp)(e.into()))?;
        out.write_all(b"\n").map_err(io_error(&tmp))?;
    }
    let file = out
        .into_inner()
        .map_err(|e| io_error(&tmp)(e.into_error()))?;
    file.sync_all().map_err(io_error(&tmp))?;
    fs::rename(&tmp, path).map_err(io_error(path))
}
