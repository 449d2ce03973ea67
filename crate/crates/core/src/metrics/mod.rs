//! Structural metrics: computed per cell, then aggregated to the document.
//!
//! | metric                      | aggregation | per-line variant |
//! |-----------------------------|-------------|------------------|
//! | SLOC                        | sum         | no               |
//! | comment / blank lines       | sum         | yes              |
//! | extended comment lines      | sum         | yes              |
//! | built-in / user / API calls | sum         | yes              |
//! | other calls                 | sum         | yes              |
//! | cyclomatic complexity       | max         | no               |
//! | function coupling           | mean        | no               |
//! | cell coupling (notebooks)   | mean        | no               |
//! | parameters per function     | mean        | no               |

pub mod builtins;
mod classify;
pub mod coupling;

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use builtins::BuiltinRegistry;
pub use classify::{classify_call, FunctionCategory};
pub use coupling::{cell_coupling, function_coupling, mean_pairwise_intersection};

use crate::ingest::{Cell, CellDocument, CellType, DocumentKind};
use crate::pyast::{
    self, classify_lines, CellFacts, FunctionDef, ImportBinding, LineCounts, ParseFailure,
};
use crate::Real;

#[derive(Debug, Error, PartialEq, Eq)]
#[error("unknown metric `{0}`")]
pub struct UnknownMetric(pub String);

/// Imports and function names from every cell of a document.
#[derive(Debug, Clone)]
pub struct DocumentContext<'r> {
    pub imports: Vec<ImportBinding>,
    pub user_defined: BTreeSet<String>,
    pub registry: &'r BuiltinRegistry,
}

impl<'r> DocumentContext<'r> {
    pub fn from_parsed(parsed: &[ParsedCell], registry: &'r BuiltinRegistry) -> Self {
        let mut imports = Vec::new();
        let mut user_defined = BTreeSet::new();
        for facts in parsed.iter().filter_map(|p| p.facts.as_ref()) {
            imports.extend(facts.imports.iter().cloned());
            user_defined.extend(facts.defs.iter().map(|d| d.name.clone()));
        }
        DocumentContext {
            imports,
            user_defined,
            registry,
        }
    }

    pub fn classify(&self, call: &pyast::CallSite) -> FunctionCategory {
        classify_call(call, &self.imports, &self.user_defined, self.registry)
    }
}

/// A code cell after lexical classification and an attempted parse.
#[derive(Debug, Clone)]
pub struct ParsedCell {
    pub cell_index: usize,
    pub line_counts: LineCounts,
    pub facts: Option<CellFacts>,
    pub failure: Option<ParseFailure>,
}

impl ParsedCell {
    pub fn new(cell: &Cell) -> Self {
        let line_counts = classify_lines(&cell.source);
        match pyast::parse_cell(&cell.source) {
            Ok(tree) => ParsedCell {
                cell_index: cell.index,
                line_counts,
                facts: Some(pyast::extract_facts(&tree)),
                failure: None,
            },
            Err(failure) => ParsedCell {
                cell_index: cell.index,
                line_counts,
                facts: None,
                failure: Some(failure),
            },
        }
    }

    /// Names this cell binds, imports included.
    pub fn names_bound(&self) -> BTreeSet<String> {
        let Some(facts) = &self.facts else {
            return BTreeSet::new();
        };
        let mut names = facts.names_bound.clone();
        names.extend(
            facts
                .imports
                .iter()
                .filter(|b| !b.bound_name.is_empty())
                .map(|b| b.bound_name.clone()),
        );
        names
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CellMetricVector {
    pub cell_index: usize,
    pub line_counts: LineCounts,
    pub extended_comment_loc: u32,
    pub builtin_unique: u32,
    pub builtin_count: u32,
    pub user_unique: u32,
    pub user_count: u32,
    pub api_unique: u32,
    pub api_count: u32,
    pub other_count: u32,
    /// Absent when the cell does not parse.
    pub cyclomatic: Option<u32>,
    pub npavg_numerator: u32,
    pub npavg_denominator: u32,
    pub variables_used: BTreeSet<String>,
    pub parse_ok: bool,
}

pub fn cell_metrics(
    cell: &Cell,
    context: &DocumentContext<'_>,
    preceding_markdown_lines: u32,
) -> CellMetricVector {
    metrics_for_parsed(&ParsedCell::new(cell), context, preceding_markdown_lines)
}

pub fn metrics_for_parsed(
    parsed: &ParsedCell,
    context: &DocumentContext<'_>,
    preceding_markdown_lines: u32,
) -> CellMetricVector {
    let mut v = CellMetricVector {
        cell_index: parsed.cell_index,
        line_counts: parsed.line_counts,
        extended_comment_loc: parsed.line_counts.comment + preceding_markdown_lines,
        ..Default::default()
    };
    let Some(facts) = &parsed.facts else {
        return v;
    };
    v.parse_ok = true;

    let mut unique: BTreeMap<FunctionCategory, BTreeSet<&str>> = BTreeMap::new();
    for call in &facts.calls {
        let category = context.classify(call);
        match category {
            FunctionCategory::BuiltIn => v.builtin_count += 1,
            FunctionCategory::UserDefined => v.user_count += 1,
            FunctionCategory::Api => v.api_count += 1,
            FunctionCategory::Other => v.other_count += 1,
        }
        unique.entry(category).or_default().insert(&call.full_name);
    }
    let distinct = |c| unique.get(&c).map_or(0, |s| s.len() as u32);
    v.builtin_unique = distinct(FunctionCategory::BuiltIn);
    v.user_unique = distinct(FunctionCategory::UserDefined);
    v.api_unique = distinct(FunctionCategory::Api);

    v.cyclomatic = Some(1 + facts.decision_count);
    v.npavg_numerator = facts.defs.iter().map(|d| d.param_count).sum();
    v.npavg_denominator = facts.defs.len() as u32;
    v.variables_used = facts.variables_used();
    v
}

/// Lines of the contiguous Markdown run directly above each code cell.
pub fn preceding_markdown_lines(doc: &CellDocument) -> BTreeMap<usize, u32> {
    let mut out = BTreeMap::new();
    let mut run = 0u32;
    for cell in &doc.cells {
        match cell.cell_type {
            CellType::Markdown => run += cell.line_count as u32,
            CellType::Code => {
                out.insert(cell.index, run);
                run = 0;
            }
            CellType::Raw => run = 0,
        }
    }
    out
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct DocumentMetrics {
    pub sloc: u64,
    pub comment_loc: u64,
    pub extended_comment_loc: u64,
    pub blank_loc: u64,
    pub builtin_unique: u64,
    pub builtin_count: u64,
    pub user_unique: u64,
    pub user_count: u64,
    pub api_unique: u64,
    pub api_count: u64,
    pub other_count: u64,
    pub cyclomatic: Option<u32>,
    pub function_coupling: Real,
    pub cell_coupling: Option<Real>,
    pub npavg: Option<Real>,
    pub comment_loc_per_line: Option<Real>,
    pub extended_comment_loc_per_line: Option<Real>,
    pub blank_loc_per_line: Option<Real>,
    pub builtin_unique_per_line: Option<Real>,
    pub builtin_count_per_line: Option<Real>,
    pub user_unique_per_line: Option<Real>,
    pub user_count_per_line: Option<Real>,
    pub api_unique_per_line: Option<Real>,
    pub api_count_per_line: Option<Real>,
    pub other_count_per_line: Option<Real>,
    pub analyzed_cells: u32,
    pub failed_cells: u32,
}

/// Metrics summed over cells that also get a per-line variant.
pub const NORMALIZED_METRICS: [&str; 10] = [
    "comment_loc",
    "extended_comment_loc",
    "blank_loc",
    "builtin_unique",
    "builtin_count",
    "user_unique",
    "user_count",
    "api_unique",
    "api_count",
    "other_count",
];

/// Every metric name [`DocumentMetrics::value`] understands, in report order.
pub const METRIC_NAMES: [&str; 27] = [
    "sloc",
    "comment_loc",
    "extended_comment_loc",
    "blank_loc",
    "builtin_unique",
    "builtin_count",
    "user_unique",
    "user_count",
    "api_unique",
    "api_count",
    "other_count",
    "cyclomatic",
    "function_coupling",
    "cell_coupling",
    "npavg",
    "comment_loc_per_line",
    "extended_comment_loc_per_line",
    "blank_loc_per_line",
    "builtin_unique_per_line",
    "builtin_count_per_line",
    "user_unique_per_line",
    "user_count_per_line",
    "api_unique_per_line",
    "api_count_per_line",
    "other_count_per_line",
    "analyzed_cells",
    "failed_cells",
];

impl DocumentMetrics {
    /// Looks a metric up by name. `Ok(None)` means the metric is known but
    /// absent for this document.
    pub fn value(&self, name: &str) -> Result<Option<Real>, UnknownMetric> {
        let count = |v: u64| Ok(Some(v as Real));
        match name {
            "sloc" => count(self.sloc),
            "comment_loc" => count(self.comment_loc),
            "extended_comment_loc" => count(self.extended_comment_loc),
            "blank_loc" => count(self.blank_loc),
            "builtin_unique" => count(self.builtin_unique),
            "builtin_count" => count(self.builtin_count),
            "user_unique" => count(self.user_unique),
            "user_count" => count(self.user_count),
            "api_unique" => count(self.api_unique),
            "api_count" => count(self.api_count),
            "other_count" => count(self.other_count),
            "cyclomatic" => Ok(self.cyclomatic.map(Real::from)),
            "function_coupling" => Ok(Some(self.function_coupling)),
            "cell_coupling" => Ok(self.cell_coupling),
            "npavg" => Ok(self.npavg),
            "comment_loc_per_line" => Ok(self.comment_loc_per_line),
            "extended_comment_loc_per_line" => Ok(self.extended_comment_loc_per_line),
            "blank_loc_per_line" => Ok(self.blank_loc_per_line),
            "builtin_unique_per_line" => Ok(self.builtin_unique_per_line),
            "builtin_count_per_line" => Ok(self.builtin_count_per_line),
            "user_unique_per_line" => Ok(self.user_unique_per_line),
            "user_count_per_line" => Ok(self.user_count_per_line),
            "api_unique_per_line" => Ok(self.api_unique_per_line),
            "api_count_per_line" => Ok(self.api_count_per_line),
            "other_count_per_line" => Ok(self.other_count_per_line),
            "analyzed_cells" => count(self.analyzed_cells.into()),
            "failed_cells" => count(self.failed_cells.into()),
            other => Err(UnknownMetric(other.to_string())),
        }
    }
}

/// Rolls per-cell vectors up to the document. Line metrics cover every code
/// cell; call tallies, complexity and parameter counts only cells that parsed.
/// `defs` are the function definitions of all parsed cells.
pub fn aggregate(
    per_cell: &[CellMetricVector],
    doc: &CellDocument,
    defs: &[FunctionDef],
) -> DocumentMetrics {
    let mut m = DocumentMetrics {
        analyzed_cells: per_cell.len() as u32,
        ..Default::default()
    };
    let mut npavg_num = 0u64;
    let mut npavg_den = 0u64;
    for c in per_cell {
        m.sloc += u64::from(c.line_counts.sloc);
        m.comment_loc += u64::from(c.line_counts.comment);
        m.blank_loc += u64::from(c.line_counts.blank);
        m.extended_comment_loc += u64::from(c.extended_comment_loc);
        if !c.parse_ok {
            m.failed_cells += 1;
            continue;
        }
        m.builtin_unique += u64::from(c.builtin_unique);
        m.builtin_count += u64::from(c.builtin_count);
        m.user_unique += u64::from(c.user_unique);
        m.user_count += u64::from(c.user_count);
        m.api_unique += u64::from(c.api_unique);
        m.api_count += u64::from(c.api_count);
        m.other_count += u64::from(c.other_count);
        m.cyclomatic = m.cyclomatic.max(c.cyclomatic);
        npavg_num += u64::from(c.npavg_numerator);
        npavg_den += u64::from(c.npavg_denominator);
    }
    m.npavg = (npavg_den > 0).then(|| npavg_num as Real / npavg_den as Real);
    m.function_coupling = function_coupling(defs);
    if doc.kind == DocumentKind::Notebook {
        m.cell_coupling = Some(cell_coupling(per_cell));
    }

    if m.sloc > 0 {
        let sloc = m.sloc as Real;
        let per_line = |v: u64| Some(v as Real / sloc);
        m.comment_loc_per_line = per_line(m.comment_loc);
        m.extended_comment_loc_per_line = per_line(m.extended_comment_loc);
        m.blank_loc_per_line = per_line(m.blank_loc);
        m.builtin_unique_per_line = per_line(m.builtin_unique);
        m.builtin_count_per_line = per_line(m.builtin_count);
        m.user_unique_per_line = per_line(m.user_unique);
        m.user_count_per_line = per_line(m.user_count);
        m.api_unique_per_line = per_line(m.api_unique);
        m.api_count_per_line = per_line(m.api_count);
        m.other_count_per_line = per_line(m.other_count);
    }
    m
}

/// Everything the metric pass produces for one document.
#[derive(Debug, Clone)]
pub struct DocumentAnalysis {
    pub parsed: Vec<ParsedCell>,
    pub cells: Vec<CellMetricVector>,
    pub metrics: DocumentMetrics,
}

impl DocumentAnalysis {
    /// Bound names per cell index, for the notebook-aware lint pass.
    pub fn names_bound_by_cell(&self) -> BTreeMap<usize, BTreeSet<String>> {
        self.parsed
            .iter()
            .map(|p| (p.cell_index, p.names_bound()))
            .collect()
    }
}

pub fn analyze_document(doc: &CellDocument, registry: &BuiltinRegistry) -> DocumentAnalysis {
    let parsed: Vec<ParsedCell> = doc.code_cells().map(ParsedCell::new).collect();
    let context = DocumentContext::from_parsed(&parsed, registry);
    let markdown = preceding_markdown_lines(doc);
    let cells: Vec<CellMetricVector> = parsed
        .iter()
        .map(|p| {
            let md = markdown.get(&p.cell_index).copied().unwrap_or(0);
            metrics_for_parsed(p, &context, md)
        })
        .collect();
    let defs: Vec<FunctionDef> = parsed
        .iter()
        .filter_map(|p| p.facts.as_ref())
        .flat_map(|f| f.defs.iter().cloned())
        .collect();
    let metrics = aggregate(&cells, doc, &defs);
    DocumentAnalysis {
        parsed,
        cells,
        metrics,
    }
}
