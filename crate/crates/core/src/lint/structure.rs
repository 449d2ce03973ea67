//! Rules that look at the shape of statements: NOEFFECT, I201, WPS301,
//! WPS336 and R504.

use rustpython_parser::ast::{self, Expr, Operator, Stmt};

use super::{RawFinding, RuleSet, I201, NOEFFECT, R504, WPS301, WPS336};
use crate::pyast::visit::{self, Visitor};
use crate::pyast::{is_docstring, SyntaxTree};

pub(super) fn check(tree: &SyntaxTree, rules: &RuleSet, out: &mut Vec<RawFinding>) {
    if rules.contains(I201) {
        import_sections(tree, out);
    }
    let mut walker = Walker {
        tree,
        rules,
        out,
        docstring_body: true,
    };
    walker.visit_body(tree.body());
}

fn is_import(stmt: &Stmt) -> bool {
    matches!(stmt, Stmt::Import(_) | Stmt::ImportFrom(_))
}

/// I201: every switch from imports back to other code needs a blank line.
fn import_sections(tree: &SyntaxTree, out: &mut Vec<RawFinding>) {
    let lines: Vec<&str> = tree.source().split('\n').collect();
    for pair in tree.body().windows(2) {
        let (prev, next) = (&pair[0], &pair[1]);
        if !is_import(prev) || is_import(next) {
            continue;
        }
        let from = tree.end_line_of(prev);
        let to = tree.line_of(next);
        let separated =
            (from + 1..to).any(|l| lines.get(l - 1).is_some_and(|t| t.trim().is_empty()));
        if !separated {
            out.push(RawFinding::new(
                I201,
                tree.location_of(next),
                "missing newline between import section and code",
            ));
        }
    }
}

/// Expression statements that do something even though their value is unused.
fn has_effect(value: &Expr) -> bool {
    match value {
        Expr::Call(_)
        | Expr::Await(_)
        | Expr::Yield(_)
        | Expr::YieldFrom(_)
        | Expr::NamedExpr(_) => true,
        Expr::Constant(c) => matches!(c.value, ast::Constant::Ellipsis),
        _ => false,
    }
}

fn is_text(expr: &Expr) -> bool {
    match expr {
        Expr::Constant(c) => matches!(c.value, ast::Constant::Str(_) | ast::Constant::Bytes(_)),
        Expr::JoinedStr(_) => true,
        _ => false,
    }
}

struct Walker<'t, 'o> {
    tree: &'t SyntaxTree,
    rules: &'t RuleSet,
    out: &'o mut Vec<RawFinding>,
    /// Whether the next body visited may open with a docstring.
    docstring_body: bool,
}

impl<'a> Visitor<'a> for Walker<'a, '_> {
    fn visit_body(&mut self, body: &'a [Stmt]) {
        let docstring_body = std::mem::replace(&mut self.docstring_body, false);
        for (i, stmt) in body.iter().enumerate() {
            if let Stmt::Expr(ast::StmtExpr { value, .. }) = stmt {
                let docstring = docstring_body && is_docstring(body, i);
                if self.rules.contains(NOEFFECT) && !docstring && !has_effect(value) {
                    let mut finding = RawFinding::new(
                        NOEFFECT,
                        self.tree.location_of(stmt),
                        "statement seems to have no effect",
                    );
                    if let Expr::Name(n) = value.as_ref() {
                        finding = finding.with_symbol(n.id.as_str());
                    }
                    self.out.push(finding);
                }
            }
            if self.rules.contains(R504) {
                if let Some(next) = body.get(i + 1) {
                    self.assign_then_return(stmt, next);
                }
            }
            self.visit_stmt(stmt);
        }
    }

    fn visit_stmt(&mut self, stmt: &'a Stmt) {
        match stmt {
            Stmt::FunctionDef(_) | Stmt::AsyncFunctionDef(_) | Stmt::ClassDef(_) => {
                self.docstring_body = true;
            }
            Stmt::Import(ast::StmtImport { names, .. }) if self.rules.contains(WPS301) => {
                for alias in names {
                    if alias.asname.is_none() && alias.name.contains('.') {
                        self.out.push(
                            RawFinding::new(
                                WPS301,
                                self.tree.location_of(alias),
                                format!("found dotted raw import: {}", alias.name),
                            )
                            .with_symbol(alias.name.as_str()),
                        );
                    }
                }
            }
            _ => {}
        }
        visit::walk_stmt(self, stmt);
        self.docstring_body = false;
    }

    fn visit_expr(&mut self, expr: &'a Expr) {
        if let Expr::BinOp(ast::ExprBinOp {
            left,
            op: Operator::Add,
            right,
            ..
        }) = expr
        {
            if self.rules.contains(WPS336) && (is_text(left) || is_text(right)) {
                self.out.push(RawFinding::new(
                    WPS336,
                    self.tree.location_of(expr),
                    "found explicit string concatenation",
                ));
            }
        }
        visit::walk_expr(self, expr);
    }
}

impl Walker<'_, '_> {
    /// R504: `x = ...` immediately followed by `return x`.
    fn assign_then_return(&mut self, stmt: &Stmt, next: &Stmt) {
        let Stmt::Assign(ast::StmtAssign { targets, .. }) = stmt else {
            return;
        };
        let [Expr::Name(target)] = targets.as_slice() else {
            return;
        };
        let Stmt::Return(ast::StmtReturn {
            value: Some(value), ..
        }) = next
        else {
            return;
        };
        if matches!(value.as_ref(), Expr::Name(n) if n.id == target.id) {
            self.out.push(
                RawFinding::new(
                    R504,
                    self.tree.location_of(next),
                    format!(
                        "unnecessary variable assignment before return statement: {}",
                        target.id
                    ),
                )
                .with_symbol(target.id.as_str()),
            );
        }
    }
}
