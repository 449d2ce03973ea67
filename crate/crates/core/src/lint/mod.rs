//! A small style checker run over the concatenated code cells of a document.
//!
//! Fourteen rules in three categories. `NOEFFECT` stands for both of the
//! "statement has no effect" checks (WPS428 and W0104), which report the same
//! statements. Findings are only ever marked as suppressed, never removed, so
//! reports can be produced with and without the notebook-aware pass.

mod flat;
mod lexical;
mod notebook;
mod scope;
mod structure;

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use flat::{flatten, FlatSource};
pub use notebook::{apply_notebook_context, REASON_CELL_TAIL, REASON_OUT_OF_ORDER};

use crate::metrics::{BuiltinRegistry, DocumentMetrics};
use crate::pyast;
use crate::Real;

#[derive(Debug, Error, PartialEq)]
pub enum LintError {
    #[error("document has no source lines; {total} findings cannot be normalized")]
    DegenerateDocument { total: u64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Category {
    ErrorProneness,
    CodeStyle,
    BestPractices,
}

impl Category {
    pub const ALL: [Category; 3] = [
        Category::ErrorProneness,
        Category::CodeStyle,
        Category::BestPractices,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Category::ErrorProneness => "error-proneness",
            Category::CodeStyle => "code-style",
            Category::BestPractices => "best-practices",
        }
    }

    pub fn title(self) -> &'static str {
        match self {
            Category::ErrorProneness => "Error-proneness",
            Category::CodeStyle => "Code style",
            Category::BestPractices => "Best practices",
        }
    }
}

impl fmt::Display for Category {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for Category {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Category::ALL
            .into_iter()
            .find(|c| c.as_str() == s)
            .ok_or_else(|| format!("unknown category `{s}`"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LintRule {
    pub rule_id: &'static str,
    pub category: Category,
    pub description: &'static str,
}

pub const WPS440: &str = "WPS440";
pub const NOEFFECT: &str = "NOEFFECT";
pub const WPS442: &str = "WPS442";
pub const E0602: &str = "E0602";
pub const I201: &str = "I201";
pub const E231: &str = "E231";
pub const WPS301: &str = "WPS301";
pub const E226: &str = "E226";
pub const C812: &str = "C812";
pub const F401: &str = "F401";
pub const W0611: &str = "W0611";
pub const W0621: &str = "W0621";
pub const WPS336: &str = "WPS336";
pub const R504: &str = "R504";

pub const RULES: [LintRule; 14] = [
    LintRule {
        rule_id: WPS440,
        category: Category::ErrorProneness,
        description: "Found block variables overlap",
    },
    LintRule {
        rule_id: NOEFFECT,
        category: Category::ErrorProneness,
        description: "Found statement that has no effect (WPS428, W0104)",
    },
    LintRule {
        rule_id: WPS442,
        category: Category::ErrorProneness,
        description: "Found outer scope names shadowing",
    },
    LintRule {
        rule_id: E0602,
        category: Category::ErrorProneness,
        description: "Undefined variable",
    },
    LintRule {
        rule_id: I201,
        category: Category::CodeStyle,
        description: "Missing newline between sections or imports",
    },
    LintRule {
        rule_id: E231,
        category: Category::CodeStyle,
        description: "Missing whitespace after ',', ';', or ':'",
    },
    LintRule {
        rule_id: WPS301,
        category: Category::CodeStyle,
        description: "Found dotted raw import",
    },
    LintRule {
        rule_id: E226,
        category: Category::CodeStyle,
        description: "Missing whitespace around arithmetic operator",
    },
    LintRule {
        rule_id: C812,
        category: Category::CodeStyle,
        description: "Missing trailing comma",
    },
    LintRule {
        rule_id: F401,
        category: Category::BestPractices,
        description: "Module imported but unused",
    },
    LintRule {
        rule_id: W0611,
        category: Category::BestPractices,
        description: "Unused import when preceded by import as",
    },
    LintRule {
        rule_id: W0621,
        category: Category::BestPractices,
        description: "Redefining name from outer scope",
    },
    LintRule {
        rule_id: WPS336,
        category: Category::BestPractices,
        description: "Found explicit string concatenation",
    },
    LintRule {
        rule_id: R504,
        category: Category::BestPractices,
        description: "Unnecessary variable assignment before return statement",
    },
];

/// Rules that only need tokens and still run on code that does not parse.
pub const LEXICAL_RULES: [&str; 2] = [E231, E226];

pub fn rule(rule_id: &str) -> Option<&'static LintRule> {
    RULES.iter().find(|r| r.rule_id == rule_id)
}

/// The set of enabled rule ids.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RuleSet {
    enabled: BTreeSet<&'static str>,
}

impl RuleSet {
    pub fn all() -> Self {
        RuleSet {
            enabled: RULES.iter().map(|r| r.rule_id).collect(),
        }
    }

    /// Restricts to the given ids; unknown ids are ignored.
    pub fn only<'a>(ids: impl IntoIterator<Item = &'a str>) -> Self {
        let wanted: BTreeSet<&str> = ids.into_iter().collect();
        RuleSet {
            enabled: RULES
                .iter()
                .map(|r| r.rule_id)
                .filter(|id| wanted.contains(id))
                .collect(),
        }
    }

    pub fn contains(&self, rule_id: &str) -> bool {
        self.enabled.contains(rule_id)
    }

    pub fn ids(&self) -> impl Iterator<Item = &'static str> + '_ {
        self.enabled.iter().copied()
    }
}

impl Default for RuleSet {
    fn default() -> Self {
        RuleSet::all()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LintFinding {
    pub rule_id: String,
    pub flat_line: usize,
    pub column: usize,
    pub cell_index: usize,
    pub local_line: usize,
    pub message: String,
    /// The identifier the finding is about, when there is one.
    pub symbol: Option<String>,
    pub suppressed: bool,
    pub suppression_reason: Option<String>,
}

impl LintFinding {
    pub fn category(&self) -> Option<Category> {
        rule(&self.rule_id).map(|r| r.category)
    }

    pub fn suppress(&mut self, reason: &str) {
        self.suppressed = true;
        self.suppression_reason = Some(reason.to_string());
    }

    /// `path:cell:line rule_id message [suppressed:reason]`
    pub fn report_line(&self, path: &str) -> String {
        let mut line = format!(
            "{path}:{}:{} {} {}",
            self.cell_index, self.local_line, self.rule_id, self.message
        );
        if let Some(reason) = self
            .suppression_reason
            .as_deref()
            .filter(|_| self.suppressed)
        {
            line.push_str(&format!(" [suppressed:{reason}]"));
        }
        line
    }
}

/// A finding in flat-source coordinates, before cell mapping.
#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) struct RawFinding {
    pub rule_id: &'static str,
    pub line: usize,
    pub column: usize,
    pub message: String,
    pub symbol: Option<String>,
}

impl RawFinding {
    pub fn new(rule_id: &'static str, loc: pyast::Location, message: impl Into<String>) -> Self {
        RawFinding {
            rule_id,
            line: loc.line,
            column: loc.column,
            message: message.into(),
            symbol: None,
        }
    }

    pub fn with_symbol(mut self, symbol: &str) -> Self {
        self.symbol = Some(symbol.to_string());
        self
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LintOutcome {
    pub findings: Vec<LintFinding>,
    /// Enabled rules that did not run because the flat source does not parse.
    pub skipped_rules: usize,
}

/// Runs every enabled rule over the flat source. Findings come back sorted by
/// line, then rule id, then column.
pub fn run_checks(flat: &FlatSource, rules: &RuleSet, registry: &BuiltinRegistry) -> LintOutcome {
    let mut raw = Vec::new();
    lexical::check(&flat.text, rules, &mut raw);

    let mut skipped_rules = 0;
    match pyast::parse_cell(&flat.text) {
        Ok(tree) => {
            lexical::check_trailing_commas(&flat.text, rules, &mut raw);
            structure::check(&tree, rules, &mut raw);
            scope::check(&tree, rules, registry, &mut raw);
        }
        Err(_) => {
            skipped_rules = rules.ids().filter(|id| !LEXICAL_RULES.contains(id)).count();
        }
    }

    let mut findings: Vec<LintFinding> = raw
        .into_iter()
        .filter(|f| rules.contains(f.rule_id))
        .map(|f| {
            let (cell_index, local_line) = flat.locate(f.line).unwrap_or((0, f.line));
            LintFinding {
                rule_id: f.rule_id.to_string(),
                flat_line: f.line,
                column: f.column,
                cell_index,
                local_line,
                message: f.message,
                symbol: f.symbol,
                suppressed: false,
                suppression_reason: None,
            }
        })
        .collect();
    findings.sort_by(|a, b| {
        (a.flat_line, &a.rule_id, a.column, &a.message).cmp(&(
            b.flat_line,
            &b.rule_id,
            b.column,
            &b.message,
        ))
    });
    findings.dedup();
    LintOutcome {
        findings,
        skipped_rules,
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ErrorRates {
    pub total: u64,
    pub per_line: Real,
}

/// Counts unsuppressed findings and normalizes them by the document's SLOC.
pub fn error_rates(
    findings: &[LintFinding],
    metrics: &DocumentMetrics,
) -> Result<ErrorRates, LintError> {
    let total = findings.iter().filter(|f| !f.suppressed).count() as u64;
    if metrics.sloc == 0 {
        return Err(LintError::DegenerateDocument { total });
    }
    Ok(ErrorRates {
        total,
        per_line: total as Real / metrics.sloc as Real,
    })
}
