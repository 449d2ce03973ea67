//! Suppression of findings that only exist because a notebook was read as a
//! plain script.

use std::collections::{BTreeMap, BTreeSet};

use rustpython_parser::ast::Stmt;

use super::{LintFinding, E0602, NOEFFECT};
use crate::ingest::{CellDocument, DocumentKind};
use crate::pyast::parse_cell;

/// A bare expression at the end of a cell, which the notebook displays.
pub const REASON_CELL_TAIL: &str = "cell-tail-display";
/// A name defined in a later cell, valid if the cells were run out of order.
pub const REASON_OUT_OF_ORDER: &str = "out-of-order-definition";

/// Marks notebook-specific false positives as suppressed. Scripts are left
/// untouched. `names_bound_by_cell` maps cell indices to the names each cell
/// binds.
pub fn apply_notebook_context(
    findings: &mut [LintFinding],
    doc: &CellDocument,
    names_bound_by_cell: &BTreeMap<usize, BTreeSet<String>>,
) {
    if doc.kind != DocumentKind::Notebook {
        return;
    }
    let tails: BTreeSet<(usize, usize)> = doc
        .code_cells()
        .filter_map(|cell| {
            let tree = parse_cell(&cell.source).ok()?;
            match tree.body().last()? {
                stmt @ Stmt::Expr(_) => Some((cell.index, tree.line_of(stmt))),
                _ => None,
            }
        })
        .collect();

    for f in findings.iter_mut().filter(|f| !f.suppressed) {
        if f.rule_id == NOEFFECT && tails.contains(&(f.cell_index, f.local_line)) {
            f.suppress(REASON_CELL_TAIL);
        } else if f.rule_id == E0602 {
            let Some(symbol) = f.symbol.as_deref() else {
                continue;
            };
            let later = names_bound_by_cell
                .range(f.cell_index + 1..)
                .any(|(_, names)| names.contains(symbol));
            if later {
                f.suppress(REASON_OUT_OF_ORDER);
            }
        }
    }
}
