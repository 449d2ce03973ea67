//! Name-resolution rules: E0602, WPS440, WPS442, W0621, F401 and W0611.
//!
//! Statements are processed in evaluation order with a stack of scopes.
//! Undefined names are only reported where code runs immediately (module and
//! class bodies); function bodies run later and may see names bound after the
//! definition.

use std::collections::{BTreeSet, HashSet};

use rustpython_parser::ast::{self, ExceptHandler, Expr, ExprContext, MatchCase, Stmt};

use super::{RawFinding, RuleSet, E0602, F401, W0611, W0621, WPS440, WPS442};
use crate::metrics::BuiltinRegistry;
use crate::pyast::visit::{self, parameter_names, pattern_captures, Visitor};
use crate::pyast::{Location, SyntaxTree};

pub(super) fn check(
    tree: &SyntaxTree,
    rules: &RuleSet,
    registry: &BuiltinRegistry,
    out: &mut Vec<RawFinding>,
) {
    let mut pre = Prepass::default();
    pre.visit_body(tree.body());

    let mut analyzer = Analyzer {
        tree,
        rules,
        registry,
        out,
        pre,
        scopes: vec![Scope::new(ScopeKind::Module)],
        loaded: HashSet::new(),
        imports: Vec::new(),
        module_ever_bound: HashSet::new(),
        functions: Vec::new(),
        block_binding: false,
    };
    analyzer.visit_body(tree.body());
    analyzer.finish();
}

/// Facts about the whole tree that are needed before the ordered walk.
#[derive(Default)]
struct Prepass {
    imported: HashSet<String>,
    declared_global: HashSet<String>,
    star_import: bool,
}

impl<'a> Visitor<'a> for Prepass {
    fn visit_stmt(&mut self, stmt: &'a Stmt) {
        match stmt {
            Stmt::Import(ast::StmtImport { names, .. }) => {
                self.imported.extend(names.iter().map(import_bound_name));
            }
            Stmt::ImportFrom(ast::StmtImportFrom { names, .. }) => {
                for alias in names {
                    if alias.name.as_str() == "*" {
                        self.star_import = true;
                    } else {
                        self.imported.insert(from_import_bound_name(alias));
                    }
                }
            }
            Stmt::Global(ast::StmtGlobal { names, .. }) => {
                self.declared_global
                    .extend(names.iter().map(|n| n.to_string()));
            }
            _ => {}
        }
        visit::walk_stmt(self, stmt);
    }
}

fn import_bound_name(alias: &ast::Alias) -> String {
    match &alias.asname {
        Some(asname) => asname.to_string(),
        None => alias.name.split('.').next().unwrap_or_default().to_string(),
    }
}

fn from_import_bound_name(alias: &ast::Alias) -> String {
    alias.asname.as_ref().unwrap_or(&alias.name).to_string()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum ScopeKind {
    Module,
    Class,
    Function,
    Lambda,
    Comprehension,
}

struct Scope {
    kind: ScopeKind,
    bound: HashSet<String>,
    /// Names declared `global` or `nonlocal` here.
    outer: HashSet<String>,
    shadow_reported: HashSet<String>,
    /// Index into `Analyzer::functions` for `def` scopes.
    record: Option<usize>,
}

impl Scope {
    fn new(kind: ScopeKind) -> Self {
        Scope {
            kind,
            bound: HashSet::new(),
            outer: HashSet::new(),
            shadow_reported: HashSet::new(),
            record: None,
        }
    }
}

struct FunctionRecord {
    location: Location,
    names: BTreeSet<String>,
}

struct ImportRecord {
    name: String,
    display: String,
    aliased: bool,
    location: Location,
}

struct Analyzer<'t, 'o> {
    tree: &'t SyntaxTree,
    rules: &'t RuleSet,
    registry: &'t BuiltinRegistry,
    out: &'o mut Vec<RawFinding>,
    pre: Prepass,
    scopes: Vec<Scope>,
    loaded: HashSet<String>,
    imports: Vec<ImportRecord>,
    module_ever_bound: HashSet<String>,
    functions: Vec<FunctionRecord>,
    /// Set while visiting a `for`, `with ... as` or `except ... as` target.
    block_binding: bool,
}

impl Analyzer<'_, '_> {
    fn current(&mut self) -> &mut Scope {
        self.scopes
            .last_mut()
            .expect("module scope is never popped")
    }

    fn read(&mut self, name: &str, loc: Location) {
        if !self.rules.contains(E0602) || self.pre.star_import {
            return;
        }
        if self
            .scopes
            .iter()
            .any(|s| matches!(s.kind, ScopeKind::Function | ScopeKind::Lambda))
        {
            return;
        }
        let resolved = self.scopes.iter().any(|s| s.bound.contains(name))
            || self.registry.is_builtin_name(name)
            || self.pre.imported.contains(name)
            || self.pre.declared_global.contains(name);
        if !resolved {
            self.out.push(
                RawFinding::new(E0602, loc, format!("undefined variable '{name}'"))
                    .with_symbol(name),
            );
        }
    }

    fn bind(&mut self, name: &str, loc: Location) {
        let block = self.block_binding;
        let rules = self.rules;
        let module_has = self.scopes[0].bound.contains(name);
        let scope_index = self.scopes.len() - 1;
        let scope = &mut self.scopes[scope_index];

        if scope.outer.contains(name) {
            if scope.kind == ScopeKind::Function && self.pre.declared_global.contains(name) {
                self.scopes[0].bound.insert(name.to_string());
                self.module_ever_bound.insert(name.to_string());
            }
            return;
        }
        if block && rules.contains(WPS440) && scope.bound.contains(name) {
            self.out.push(
                RawFinding::new(
                    WPS440,
                    loc,
                    format!("found block variables overlap: {name}"),
                )
                .with_symbol(name),
            );
        }
        if scope.kind == ScopeKind::Function {
            if module_has
                && rules.contains(WPS442)
                && scope.shadow_reported.insert(name.to_string())
            {
                self.out.push(
                    RawFinding::new(
                        WPS442,
                        loc,
                        format!("found outer scope names shadowing: {name}"),
                    )
                    .with_symbol(name),
                );
            }
            if let Some(record) = scope.record {
                self.functions[record].names.insert(name.to_string());
            }
        }
        if scope.kind == ScopeKind::Module {
            self.module_ever_bound.insert(name.to_string());
        }
        scope.bound.insert(name.to_string());
    }

    fn bind_in_enclosing_non_comprehension(&mut self, name: &str, loc: Location) {
        let depth = self
            .scopes
            .iter()
            .rposition(|s| s.kind != ScopeKind::Comprehension)
            .unwrap_or(0);
        let hidden = self.scopes.split_off(depth + 1);
        self.bind(name, loc);
        self.scopes.extend(hidden);
    }

    fn with_block<F: FnOnce(&mut Self)>(&mut self, f: F) {
        let saved = std::mem::replace(&mut self.block_binding, true);
        f(self);
        self.block_binding = saved;
    }

    fn function<'a>(
        &mut self,
        stmt: &'a Stmt,
        args: &'a ast::Arguments,
        body: &'a [Stmt],
        name: &str,
        decorators: &'a [Expr],
        returns: Option<&'a Expr>,
    ) {
        for d in decorators {
            self.visit_expr(d);
        }
        self.visit_arguments(args);
        if let Some(r) = returns {
            self.visit_expr(r);
        }
        let record = self.functions.len();
        self.functions.push(FunctionRecord {
            location: self.tree.location_of(stmt),
            names: BTreeSet::new(),
        });
        let mut scope = Scope::new(ScopeKind::Function);
        scope.record = Some(record);
        self.scopes.push(scope);
        for arg in parameter_names(args) {
            let loc = self.tree.location_of(arg);
            self.bind(arg.arg.as_str(), loc);
        }
        self.visit_body(body);
        self.scopes.pop();
        let loc = self.tree.location_of(stmt);
        self.bind(name, loc);
    }

    fn finish(&mut self) {
        if self.rules.contains(W0621) {
            for f in &self.functions {
                for name in &f.names {
                    if self.module_ever_bound.contains(name) {
                        self.out.push(
                            RawFinding::new(
                                W0621,
                                f.location,
                                format!("redefining name '{name}' from outer scope"),
                            )
                            .with_symbol(name),
                        );
                    }
                }
            }
        }
        for import in &self.imports {
            if self.loaded.contains(&import.name) {
                continue;
            }
            let (rule, message) = if import.aliased {
                (
                    W0611,
                    format!("unused import {} as {}", import.display, import.name),
                )
            } else {
                (F401, format!("'{}' imported but unused", import.display))
            };
            if self.rules.contains(rule) {
                self.out.push(
                    RawFinding::new(rule, import.location, message).with_symbol(&import.name),
                );
            }
        }
    }
}

impl<'a> Visitor<'a> for Analyzer<'_, '_> {
    fn visit_stmt(&mut self, stmt: &'a Stmt) {
        match stmt {
            Stmt::FunctionDef(ast::StmtFunctionDef {
                name,
                args,
                body,
                decorator_list,
                returns,
                ..
            })
            | Stmt::AsyncFunctionDef(ast::StmtAsyncFunctionDef {
                name,
                args,
                body,
                decorator_list,
                returns,
                ..
            }) => self.function(
                stmt,
                args,
                body,
                name.as_str(),
                decorator_list,
                returns.as_deref(),
            ),
            Stmt::ClassDef(ast::StmtClassDef {
                name,
                bases,
                keywords,
                body,
                decorator_list,
                ..
            }) => {
                for e in decorator_list.iter().chain(bases) {
                    self.visit_expr(e);
                }
                for kw in keywords {
                    self.visit_expr(&kw.value);
                }
                self.scopes.push(Scope::new(ScopeKind::Class));
                self.visit_body(body);
                self.scopes.pop();
                let loc = self.tree.location_of(stmt);
                self.bind(name.as_str(), loc);
            }
            Stmt::For(ast::StmtFor {
                target,
                iter,
                body,
                orelse,
                ..
            })
            | Stmt::AsyncFor(ast::StmtAsyncFor {
                target,
                iter,
                body,
                orelse,
                ..
            }) => {
                self.visit_expr(iter);
                self.with_block(|a| a.visit_expr(target));
                self.visit_body(body);
                self.visit_body(orelse);
            }
            Stmt::With(ast::StmtWith { items, body, .. })
            | Stmt::AsyncWith(ast::StmtAsyncWith { items, body, .. }) => {
                for item in items {
                    self.visit_expr(&item.context_expr);
                    if let Some(vars) = &item.optional_vars {
                        self.with_block(|a| a.visit_expr(vars));
                    }
                }
                self.visit_body(body);
            }
            Stmt::Import(ast::StmtImport { names, .. }) => {
                for alias in names {
                    let name = import_bound_name(alias);
                    let loc = self.tree.location_of(alias);
                    self.imports.push(ImportRecord {
                        name: name.clone(),
                        display: alias.name.to_string(),
                        aliased: alias.asname.is_some(),
                        location: loc,
                    });
                    self.bind(&name, loc);
                }
            }
            Stmt::ImportFrom(ast::StmtImportFrom { module, names, .. }) => {
                let module = module.as_ref().map(|m| m.as_str()).unwrap_or("");
                for alias in names.iter().filter(|a| a.name.as_str() != "*") {
                    let name = from_import_bound_name(alias);
                    let loc = self.tree.location_of(alias);
                    if module != "__future__" {
                        self.imports.push(ImportRecord {
                            name: name.clone(),
                            display: format!("{module}.{}", alias.name),
                            aliased: alias.asname.is_some(),
                            location: loc,
                        });
                    }
                    self.bind(&name, loc);
                }
            }
            Stmt::Global(ast::StmtGlobal { names, .. })
            | Stmt::Nonlocal(ast::StmtNonlocal { names, .. }) => {
                let scope = self.current();
                scope.outer.extend(names.iter().map(|n| n.to_string()));
            }
            Stmt::AugAssign(ast::StmtAugAssign { target, value, .. }) => {
                self.visit_expr(value);
                if let Expr::Name(n) = target.as_ref() {
                    let loc = self.tree.location_of(target.as_ref());
                    self.loaded.insert(n.id.to_string());
                    self.read(n.id.as_str(), loc);
                    self.bind(n.id.as_str(), loc);
                } else {
                    self.visit_expr(target);
                }
            }
            Stmt::AnnAssign(ast::StmtAnnAssign {
                target,
                annotation,
                value,
                ..
            }) => {
                self.visit_expr(annotation);
                if let Some(value) = value {
                    self.visit_expr(value);
                    self.visit_expr(target);
                } else if !matches!(target.as_ref(), Expr::Name(_)) {
                    self.visit_expr(target);
                }
            }
            _ => visit::walk_stmt(self, stmt),
        }
    }

    fn visit_except_handler(&mut self, handler: &'a ExceptHandler) {
        let ExceptHandler::ExceptHandler(h) = handler;
        if let Some(t) = &h.type_ {
            self.visit_expr(t);
        }
        if let Some(name) = &h.name {
            let loc = self.tree.location_of(handler);
            self.with_block(|a| a.bind(name.as_str(), loc));
        }
        self.visit_body(&h.body);
        if let Some(name) = &h.name {
            // the interpreter deletes the name when the handler ends
            self.current().bound.remove(name.as_str());
        }
    }

    fn visit_match_case(&mut self, case: &'a MatchCase) {
        self.visit_pattern(&case.pattern);
        let loc = self.tree.location_of(&case.pattern);
        for name in pattern_captures(&case.pattern) {
            self.bind(name, loc);
        }
        if let Some(guard) = &case.guard {
            self.visit_expr(guard);
        }
        self.visit_body(&case.body);
    }

    fn visit_expr(&mut self, expr: &'a Expr) {
        match expr {
            Expr::Name(ast::ExprName { id, ctx, .. }) => {
                let loc = self.tree.location_of(expr);
                match ctx {
                    ExprContext::Load => {
                        self.loaded.insert(id.to_string());
                        self.read(id.as_str(), loc);
                    }
                    ExprContext::Del => self.read(id.as_str(), loc),
                    ExprContext::Store => self.bind(id.as_str(), loc),
                }
            }
            Expr::Lambda(ast::ExprLambda { args, body, .. }) => {
                self.visit_arguments(args);
                let mut scope = Scope::new(ScopeKind::Lambda);
                scope
                    .bound
                    .extend(parameter_names(args).iter().map(|a| a.arg.to_string()));
                self.scopes.push(scope);
                self.visit_expr(body);
                self.scopes.pop();
            }
            Expr::ListComp(_) | Expr::SetComp(_) | Expr::GeneratorExp(_) | Expr::DictComp(_) => {
                let saved = std::mem::replace(&mut self.block_binding, false);
                self.scopes.push(Scope::new(ScopeKind::Comprehension));
                visit::walk_expr(self, expr);
                self.scopes.pop();
                self.block_binding = saved;
            }
            Expr::NamedExpr(ast::ExprNamedExpr { target, value, .. }) => {
                self.visit_expr(value);
                match target.as_ref() {
                    Expr::Name(n) => {
                        let loc = self.tree.location_of(target.as_ref());
                        self.bind_in_enclosing_non_comprehension(n.id.as_str(), loc);
                    }
                    other => self.visit_expr(other),
                }
            }
            _ => visit::walk_expr(self, expr),
        }
    }
}
