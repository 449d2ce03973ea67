use std::collections::BTreeSet;

use rustpython_parser::ast::{self, ExceptHandler, Expr, ExprContext, Stmt};
use serde::{Deserialize, Serialize};

use super::visit::{self, Visitor};
use super::{Location, SyntaxTree};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum CallShape {
    PlainName,
    DottedPath,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CallSite {
    pub shape: CallShape,
    /// Leftmost identifier of the callee, empty when the callee does not start
    /// with a name (e.g. `f()()` or `x[0].y()`).
    pub head: String,
    pub full_name: String,
    pub location: Location,
}

/// Placeholder for a callee base that is not a plain name.
pub const EXPR_PLACEHOLDER: &str = "<expr>";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ImportKind {
    ModuleImport,
    FromImport,
    StarImport,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ImportBinding {
    pub kind: ImportKind,
    pub bound_name: String,
    pub source_module: String,
    /// `import a.b` without an alias.
    pub is_dotted: bool,
    pub has_alias: bool,
    pub location: Location,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FunctionDef {
    pub name: String,
    pub param_count: u32,
    pub calls_inside: BTreeSet<String>,
    pub location: Location,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct CellFacts {
    pub calls: Vec<CallSite>,
    pub imports: Vec<ImportBinding>,
    pub defs: Vec<FunctionDef>,
    pub names_read: BTreeSet<String>,
    pub names_bound: BTreeSet<String>,
    /// Names introduced by `def` and `class` statements.
    pub definition_names: BTreeSet<String>,
    pub decision_count: u32,
}

impl CellFacts {
    /// Identifiers read or bound, minus function and class names.
    pub fn variables_used(&self) -> BTreeSet<String> {
        self.names_read
            .union(&self.names_bound)
            .filter(|n| !self.definition_names.contains(*n))
            .cloned()
            .collect()
    }
}

pub fn extract_facts(tree: &SyntaxTree) -> CellFacts {
    let mut collector = Collector {
        tree,
        facts: CellFacts::default(),
        open_defs: Vec::new(),
    };
    collector.visit_body(tree.body());
    collector.facts
}

/// Splits a callee into `(head, full_name)`.
pub fn callee_path(func: &Expr) -> (String, String) {
    let mut attrs = Vec::new();
    let mut node = func;
    loop {
        match node {
            Expr::Attribute(a) => {
                attrs.push(a.attr.as_str());
                node = &a.value;
            }
            Expr::Name(n) => {
                let head = n.id.to_string();
                let mut full = head.clone();
                for attr in attrs.iter().rev() {
                    full.push('.');
                    full.push_str(attr);
                }
                return (head, full);
            }
            _ => {
                let mut full = EXPR_PLACEHOLDER.to_string();
                for attr in attrs.iter().rev() {
                    full.push('.');
                    full.push_str(attr);
                }
                return (String::new(), full);
            }
        }
    }
}

struct Collector<'t> {
    tree: &'t SyntaxTree,
    facts: CellFacts,
    /// Indices into `facts.defs` of the functions whose body we are inside.
    open_defs: Vec<usize>,
}

impl Collector<'_> {
    fn bind(&mut self, name: &str) {
        self.facts.names_bound.insert(name.to_string());
    }

    fn bind_parameters(&mut self, args: &ast::Arguments) {
        for arg in visit::parameter_names(args) {
            self.bind(arg.arg.as_str());
        }
    }

    fn record_call(&mut self, call: &ast::ExprCall) {
        let (head, full_name) = callee_path(&call.func);
        let shape = if full_name.contains('.') {
            CallShape::DottedPath
        } else {
            CallShape::PlainName
        };
        for &i in &self.open_defs {
            self.facts.defs[i].calls_inside.insert(full_name.clone());
        }
        self.facts.calls.push(CallSite {
            shape,
            head,
            full_name,
            location: self.tree.location_of(call),
        });
    }

    /// Walks a callee, skipping the head identifier of a name/attribute chain.
    fn visit_callee(&mut self, func: &Expr) {
        match func {
            Expr::Name(_) => {}
            Expr::Attribute(a) => self.visit_callee(&a.value),
            other => self.visit_expr(other),
        }
    }

    fn function_def(
        &mut self,
        stmt: &Stmt,
        name: &str,
        args: &ast::Arguments,
        body: &[Stmt],
        decorators: &[Expr],
        returns: Option<&Expr>,
    ) {
        for d in decorators {
            self.visit_expr(d);
        }
        self.visit_arguments(args);
        if let Some(r) = returns {
            self.visit_expr(r);
        }
        self.bind(name);
        self.facts.definition_names.insert(name.to_string());
        self.bind_parameters(args);
        self.facts.defs.push(FunctionDef {
            name: name.to_string(),
            param_count: visit::parameter_names(args).len() as u32,
            calls_inside: BTreeSet::new(),
            location: self.tree.location_of(stmt),
        });
        self.open_defs.push(self.facts.defs.len() - 1);
        self.visit_body(body);
        self.open_defs.pop();
    }
}

impl<'a> Visitor<'a> for Collector<'_> {
    fn visit_stmt(&mut self, stmt: &'a Stmt) {
        match stmt {
            Stmt::FunctionDef(f) => {
                return self.function_def(
                    stmt,
                    f.name.as_str(),
                    &f.args,
                    &f.body,
                    &f.decorator_list,
                    f.returns.as_deref(),
                )
            }
            Stmt::AsyncFunctionDef(f) => {
                return self.function_def(
                    stmt,
                    f.name.as_str(),
                    &f.args,
                    &f.body,
                    &f.decorator_list,
                    f.returns.as_deref(),
                )
            }
            Stmt::ClassDef(c) => {
                self.bind(c.name.as_str());
                self.facts.definition_names.insert(c.name.to_string());
            }
            Stmt::If(_) | Stmt::For(_) | Stmt::AsyncFor(_) | Stmt::While(_) | Stmt::Assert(_) => {
                self.facts.decision_count += 1;
            }
            Stmt::Match(m) => self.facts.decision_count += m.cases.len() as u32,
            Stmt::Import(imp) => {
                for alias in &imp.names {
                    let module = alias.name.to_string();
                    let (bound_name, is_dotted) = match &alias.asname {
                        Some(asname) => (asname.to_string(), false),
                        None => (
                            module.split('.').next().unwrap_or_default().to_string(),
                            module.contains('.'),
                        ),
                    };
                    self.facts.imports.push(ImportBinding {
                        kind: ImportKind::ModuleImport,
                        bound_name,
                        source_module: module,
                        is_dotted,
                        has_alias: alias.asname.is_some(),
                        location: self.tree.location_of(alias),
                    });
                }
            }
            Stmt::ImportFrom(imp) => {
                let level = imp.level.map_or(0, |l| l.to_u32()) as usize;
                let mut source_module = ".".repeat(level);
                if let Some(m) = &imp.module {
                    source_module.push_str(m.as_str());
                }
                for alias in &imp.names {
                    let (kind, bound_name) = if alias.name.as_str() == "*" {
                        (ImportKind::StarImport, String::new())
                    } else {
                        let bound = alias.asname.as_ref().unwrap_or(&alias.name);
                        (ImportKind::FromImport, bound.to_string())
                    };
                    self.facts.imports.push(ImportBinding {
                        kind,
                        bound_name,
                        source_module: source_module.clone(),
                        is_dotted: false,
                        has_alias: alias.asname.is_some(),
                        location: self.tree.location_of(alias),
                    });
                }
            }
            _ => {}
        }
        visit::walk_stmt(self, stmt);
    }

    fn visit_expr(&mut self, expr: &'a Expr) {
        match expr {
            Expr::Call(call) => {
                self.record_call(call);
                self.visit_callee(&call.func);
                for a in &call.args {
                    self.visit_expr(a);
                }
                for kw in &call.keywords {
                    self.visit_expr(&kw.value);
                }
                return;
            }
            Expr::Name(n) => {
                match n.ctx {
                    ExprContext::Store => self.bind(n.id.as_str()),
                    ExprContext::Load | ExprContext::Del => {
                        self.facts.names_read.insert(n.id.to_string());
                    }
                }
                return;
            }
            Expr::BoolOp(b) => {
                self.facts.decision_count += b.values.len().saturating_sub(1) as u32;
            }
            Expr::IfExp(_) => self.facts.decision_count += 1,
            Expr::Lambda(l) => self.bind_parameters(&l.args),
            _ => {}
        }
        visit::walk_expr(self, expr);
    }

    fn visit_comprehension(&mut self, comp: &'a ast::Comprehension) {
        self.facts.decision_count += comp.ifs.len() as u32;
        visit::walk_comprehension(self, comp);
    }

    fn visit_except_handler(&mut self, handler: &'a ExceptHandler) {
        let ExceptHandler::ExceptHandler(h) = handler;
        self.facts.decision_count += 1;
        if let Some(name) = &h.name {
            self.bind(name.as_str());
        }
        visit::walk_except_handler(self, handler);
    }

    fn visit_match_case(&mut self, case: &'a ast::MatchCase) {
        for name in visit::pattern_captures(&case.pattern) {
            self.bind(name);
        }
        visit::walk_match_case(self, case);
    }
}
