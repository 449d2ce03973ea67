//! Reading notebooks and scripts into a uniform cell model.
//!
//! A script is treated as a notebook with a single code cell, so everything
//! downstream works on [`CellDocument`] regardless of where the code came from.

use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::Value;
use sha2::{Digest, Sha256};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum IngestError {
    #[error("{path}: invalid UTF-8 at byte {offset}")]
    Encoding { path: String, offset: usize },
    #[error("{path}: malformed JSON: {message}")]
    MalformedJson { path: String, message: String },
    #[error("{path}: unsupported notebook format: {reason}")]
    UnsupportedFormat { path: String, reason: String },
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DocumentKind {
    Notebook,
    Script,
}

impl DocumentKind {
    pub fn as_str(self) -> &'static str {
        match self {
            DocumentKind::Notebook => "notebook",
            DocumentKind::Script => "script",
        }
    }
}

impl std::str::FromStr for DocumentKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "notebook" => Ok(DocumentKind::Notebook),
            "script" => Ok(DocumentKind::Script),
            other => Err(format!("unknown document kind `{other}`")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CellType {
    Code,
    Markdown,
    Raw,
}

impl CellType {
    pub fn as_str(self) -> &'static str {
        match self {
            CellType::Code => "code",
            CellType::Markdown => "markdown",
            CellType::Raw => "raw",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Cell {
    pub index: usize,
    pub cell_type: CellType,
    /// Verbatim cell content with CRLF/CR normalized to LF.
    pub source: String,
    pub line_count: usize,
}

impl Cell {
    pub fn new(index: usize, cell_type: CellType, source: &str) -> Self {
        let source = normalize_newlines(source);
        let line_count = count_lines(&source);
        Cell {
            index,
            cell_type,
            source,
            line_count,
        }
    }

    pub fn is_code(&self) -> bool {
        self.cell_type == CellType::Code
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CellDocument {
    /// Hex SHA-256 of the raw file bytes.
    pub doc_id: String,
    pub origin_path: String,
    pub kind: DocumentKind,
    pub language_tag: String,
    pub cells: Vec<Cell>,
    pub byte_size: u64,
}

impl CellDocument {
    pub fn code_cells(&self) -> impl Iterator<Item = &Cell> {
        self.cells.iter().filter(|c| c.is_code())
    }

    /// Builds an in-memory notebook from `(type, source)` pairs. The id is
    /// derived from the cell contents, so equal inputs give equal ids.
    pub fn notebook_from_cells<'a, I>(origin_path: &str, cells: I) -> Self
    where
        I: IntoIterator<Item = (CellType, &'a str)>,
    {
        let mut hasher = Sha256::new();
        let mut byte_size = 0u64;
        let cells: Vec<Cell> = cells
            .into_iter()
            .enumerate()
            .map(|(i, (ty, src))| {
                hasher.update(ty.as_str().as_bytes());
                hasher.update([0u8]);
                hasher.update(src.as_bytes());
                hasher.update([0u8]);
                byte_size += src.len() as u64;
                Cell::new(i, ty, src)
            })
            .collect();
        CellDocument {
            doc_id: hex::encode(hasher.finalize()),
            origin_path: origin_path.to_string(),
            kind: DocumentKind::Notebook,
            language_tag: "python".to_string(),
            cells,
            byte_size,
        }
    }
}

/// Number of lines under the "split on LF, drop one trailing empty segment" rule.
pub fn count_lines(source: &str) -> usize {
    if source.is_empty() {
        return 0;
    }
    let segments = source.split('\n').count();
    if source.ends_with('\n') {
        segments - 1
    } else {
        segments
    }
}

/// Splits text into lines using the same rule as [`count_lines`].
pub fn split_lines(source: &str) -> Vec<&str> {
    if source.is_empty() {
        return Vec::new();
    }
    let mut lines: Vec<&str> = source.split('\n').collect();
    if source.ends_with('\n') {
        lines.pop();
    }
    lines
}

pub fn normalize_newlines(text: &str) -> String {
    if !text.contains('\r') {
        return text.to_string();
    }
    text.replace("\r\n", "\n").replace('\r', "\n")
}

pub fn document_id(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

fn decode_utf8<'a>(bytes: &'a [u8], path: &str) -> Result<&'a str, IngestError> {
    let bytes = bytes.strip_prefix(b"\xEF\xBB\xBF").unwrap_or(bytes);
    std::str::from_utf8(bytes).map_err(|e| IngestError::Encoding {
        path: path.to_string(),
        offset: e.valid_up_to(),
    })
}

fn json_text(value: Option<&Value>) -> String {
    match value {
        Some(Value::String(s)) => s.clone(),
        Some(Value::Array(parts)) => parts
            .iter()
            .filter_map(|p| p.as_str())
            .collect::<Vec<_>>()
            .concat(),
        _ => String::new(),
    }
}

pub fn parse_notebook(bytes: &[u8], path: &str) -> Result<CellDocument, IngestError> {
    let text = decode_utf8(bytes, path)?;
    let root: Value = serde_json::from_str(text).map_err(|e| IngestError::MalformedJson {
        path: path.to_string(),
        message: e.to_string(),
    })?;
    let unsupported = |reason: &str| IngestError::UnsupportedFormat {
        path: path.to_string(),
        reason: reason.to_string(),
    };

    let obj = root
        .as_object()
        .ok_or_else(|| unsupported("top level is not an object"))?;
    match obj.get("nbformat").and_then(Value::as_u64) {
        Some(4) => {}
        Some(v) => return Err(unsupported(&format!("nbformat {v}, only 4 is supported"))),
        None => return Err(unsupported("missing nbformat version")),
    }
    let raw_cells = obj
        .get("cells")
        .and_then(Value::as_array)
        .ok_or_else(|| unsupported("no top-level cells array"))?;

    let metadata = obj.get("metadata");
    let language_tag = metadata
        .and_then(|m| m.pointer("/kernelspec/language"))
        .and_then(Value::as_str)
        .or_else(|| {
            metadata
                .and_then(|m| m.pointer("/language_info/name"))
                .and_then(Value::as_str)
        })
        .unwrap_or("")
        .to_lowercase();

    let cells = raw_cells
        .iter()
        .enumerate()
        .map(|(index, cell)| {
            let cell_type = match cell.get("cell_type").and_then(Value::as_str) {
                Some("code") => CellType::Code,
                Some("markdown") => CellType::Markdown,
                _ => CellType::Raw,
            };
            Cell::new(index, cell_type, &json_text(cell.get("source")))
        })
        .collect();

    Ok(CellDocument {
        doc_id: document_id(bytes),
        origin_path: path.to_string(),
        kind: DocumentKind::Notebook,
        language_tag,
        cells,
        byte_size: bytes.len() as u64,
    })
}

pub fn parse_script(bytes: &[u8], path: &str) -> Result<CellDocument, IngestError> {
    let text = decode_utf8(bytes, path)?;
    Ok(CellDocument {
        doc_id: document_id(bytes),
        origin_path: path.to_string(),
        kind: DocumentKind::Script,
        language_tag: "python".to_string(),
        cells: vec![Cell::new(0, CellType::Code, text)],
        byte_size: bytes.len() as u64,
    })
}

pub fn is_analyzable(doc: &CellDocument) -> bool {
    doc.kind == DocumentKind::Script || doc.language_tag.eq_ignore_ascii_case("python")
}

/// Kind implied by a file extension, if the file is one we ingest.
pub fn kind_for_path(path: &Path) -> Option<DocumentKind> {
    match path.extension().and_then(|e| e.to_str()) {
        Some("ipynb") => Some(DocumentKind::Notebook),
        Some("py") => Some(DocumentKind::Script),
        _ => None,
    }
}

pub fn read_document(path: &Path) -> Result<CellDocument, IngestError> {
    let display = path.to_string_lossy().into_owned();
    let bytes = std::fs::read(path).map_err(|source| IngestError::Io {
        path: display.clone(),
        source,
    })?;
    match kind_for_path(path) {
        Some(DocumentKind::Notebook) => parse_notebook(&bytes, &display),
        _ => parse_script(&bytes, &display),
    }
}
