//! CSV export: one file per table, header row, LF line endings, reals with
//! six significant digits.

use std::fs;
use std::path::{Path, PathBuf};

use super::{io_error, DocumentRecord, Store, StoreError};
use crate::fmt::sig6;

pub const DOCUMENT_COLUMNS: [&str; 5] =
    ["doc_id", "origin_path", "kind", "language_tag", "byte_size"];

pub const CELL_COLUMNS: [&str; 20] = [
    "doc_id",
    "cell_index",
    "cell_type",
    "line_count",
    "sloc",
    "comment_loc",
    "blank_loc",
    "extended_comment_loc",
    "builtin_unique",
    "builtin_count",
    "user_unique",
    "user_count",
    "api_unique",
    "api_count",
    "other_count",
    "cyclomatic",
    "npavg_numerator",
    "npavg_denominator",
    "variables_used",
    "parse_ok",
];

pub const FINDING_COLUMNS: [&str; 7] = [
    "doc_id",
    "rule_id",
    "category",
    "cell_index",
    "local_line",
    "suppressed",
    "suppression_reason",
];

/// Metrics that are counts and print as integers.
fn is_integer_metric(name: &str) -> bool {
    !(name.ends_with("_per_line")
        || matches!(name, "function_coupling" | "cell_coupling" | "npavg"))
}

fn metric_field(name: &str, value: Option<f64>) -> String {
    match value {
        None => String::new(),
        Some(v) if is_integer_metric(name) => format!("{}", v as u64),
        Some(v) => sig6(v),
    }
}

fn opt<T: ToString>(v: Option<T>) -> String {
    v.map(|v| v.to_string()).unwrap_or_default()
}

fn writer() -> csv::Writer<Vec<u8>> {
    csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new())
}

fn finish(w: csv::Writer<Vec<u8>>) -> String {
    let bytes = w.into_inner().expect("writing to memory cannot fail");
    String::from_utf8(bytes).expect("all fields are UTF-8")
}

impl Store {
    /// The documents table as CSV. Columns: [`DOCUMENT_COLUMNS`], then every
    /// metric name, then `error_total` and `error_per_line`.
    pub fn documents_csv(&self) -> String {
        let mut w = writer();
        let header: Vec<&str> = DOCUMENT_COLUMNS
            .iter()
            .copied()
            .chain(DocumentRecord::metric_names())
            .collect();
        w.write_record(&header).expect("in-memory write");
        for d in self.documents(None) {
            let mut row = vec![
                d.doc_id.clone(),
                d.origin_path.clone(),
                d.kind.as_str().to_string(),
                d.language_tag.clone(),
                d.byte_size.to_string(),
            ];
            row.extend(
                DocumentRecord::metric_names()
                    .map(|m| metric_field(m, d.value(m).expect("known metric"))),
            );
            w.write_record(&row).expect("in-memory write");
        }
        finish(w)
    }

    pub fn cells_csv(&self) -> String {
        let mut w = writer();
        w.write_record(CELL_COLUMNS).expect("in-memory write");
        for c in self.cells.values().flatten() {
            let row = [
                c.doc_id.clone(),
                c.cell_index.to_string(),
                c.cell_type.as_str().to_string(),
                c.line_count.to_string(),
                c.sloc.to_string(),
                c.comment_loc.to_string(),
                c.blank_loc.to_string(),
                c.extended_comment_loc.to_string(),
                c.builtin_unique.to_string(),
                c.builtin_count.to_string(),
                c.user_unique.to_string(),
                c.user_count.to_string(),
                c.api_unique.to_string(),
                c.api_count.to_string(),
                c.other_count.to_string(),
                opt(c.cyclomatic),
                c.npavg_numerator.to_string(),
                c.npavg_denominator.to_string(),
                c.variables_used.join(" "),
                c.parse_ok.to_string(),
            ];
            w.write_record(&row).expect("in-memory write");
        }
        finish(w)
    }

    pub fn findings_csv(&self) -> String {
        let mut w = writer();
        w.write_record(FINDING_COLUMNS).expect("in-memory write");
        for f in self.findings.values().flatten() {
            let row = [
                f.doc_id.clone(),
                f.rule_id.clone(),
                f.category.as_str().to_string(),
                f.cell_index.to_string(),
                f.local_line.to_string(),
                f.suppressed.to_string(),
                f.suppression_reason.clone().unwrap_or_default(),
            ];
            w.write_record(&row).expect("in-memory write");
        }
        finish(w)
    }

    /// Writes `documents.csv`, `cells.csv` and `findings.csv` into `dir`.
    pub fn export_csv(&self, dir: &Path) -> Result<Vec<PathBuf>, StoreError> {
        fs::create_dir_all(dir).map_err(io_error(dir))?;
        let tables = [
            ("documents.csv", self.documents_csv()),
            ("cells.csv", self.cells_csv()),
            ("findings.csv", self.findings_csv()),
        ];
        let mut written = Vec::new();
        for (name, body) in tables {
            let path = dir.join(name);
            fs::write(&path, body).map_err(io_error(&path))?;
            written.push(path);
        }
        Ok(written)
    }
}
