use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use super::StatsError;
use crate::lint::{Category, LintFinding, RULES};
use crate::Real;

/// Anything that records one occurrence of a lint rule.
pub trait RuleOccurrence {
    fn rule_id(&self) -> &str;
    fn is_suppressed(&self) -> bool;
}

impl RuleOccurrence for LintFinding {
    fn rule_id(&self) -> &str {
        &self.rule_id
    }

    fn is_suppressed(&self) -> bool {
        self.suppressed
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IssueFrequencyRow {
    pub rule_id: String,
    pub category: Category,
    pub description: String,
    /// Percentage of notebooks with at least one finding.
    pub pct_notebooks: Real,
    pub pct_scripts: Real,
    pub mean_pct: Real,
}

fn document_rules<F: RuleOccurrence>(
    docs: &[Vec<F>],
    include_suppressed: bool,
) -> Vec<BTreeSet<&str>> {
    docs.iter()
        .map(|findings| {
            findings
                .iter()
                .filter(|f| include_suppressed || !f.is_suppressed())
                .map(|f| f.rule_id())
                .collect()
        })
        .collect()
}

fn percentage(rule_id: &str, docs: &[BTreeSet<&str>]) -> Real {
    let hits = docs.iter().filter(|rules| rules.contains(rule_id)).count();
    100.0 * hits as Real / docs.len() as Real
}

/// One row per catalog rule: the share of documents in each corpus with at
/// least one finding of that rule. Each element of `notebooks` and `scripts`
/// holds the findings of one document.
pub fn issue_frequency<F: RuleOccurrence>(
    notebooks: &[Vec<F>],
    scripts: &[Vec<F>],
    include_suppressed: bool,
) -> Result<Vec<IssueFrequencyRow>, StatsError> {
    if notebooks.is_empty() || scripts.is_empty() {
        return Err(StatsError::EmptyCorpus);
    }
    let nb = document_rules(notebooks, include_suppressed);
    let sc = document_rules(scripts, include_suppressed);
    Ok(RULES
        .iter()
        .map(|rule| {
            let pct_notebooks = percentage(rule.rule_id, &nb);
            let pct_scripts = percentage(rule.rule_id, &sc);
            IssueFrequencyRow {
                rule_id: rule.rule_id.to_string(),
                category: rule.category,
                description: rule.description.to_string(),
                pct_notebooks,
                pct_scripts,
                mean_pct: (pct_notebooks + pct_scripts) / 2.0,
            }
        })
        .collect())
}

/// The `k` most frequent rules of each category by mean percentage, ties
/// broken by rule id.
pub fn top_k(rows: &[IssueFrequencyRow], k: usize) -> BTreeMap<Category, Vec<IssueFrequencyRow>> {
    let mut by_category: BTreeMap<Category, Vec<IssueFrequencyRow>> = BTreeMap::new();
    for row in rows {
        by_category
            .entry(row.category)
            .or_default()
            .push(row.clone());
    }
    for group in by_category.values_mut() {
        group.sort_by(|a, b| {
            b.mean_pct
                .total_cmp(&a.mean_pct)
                .then_with(|| a.rule_id.cmp(&b.rule_id))
        });
        group.truncate(k);
    }
    by_category
}
