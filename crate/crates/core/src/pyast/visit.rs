//! Borrowing depth-first traversal over the parsed tree.
//!
//! Children are visited roughly in evaluation order (values before assignment
//! targets, iterables before loop targets) so visitors that track bindings see
//! reads and writes in the order the interpreter performs them.

use rustpython_parser::ast::{
    self, Arguments, Comprehension, ExceptHandler, Expr, Keyword, MatchCase, Pattern, Stmt,
};

pub trait Visitor<'a> {
    fn visit_stmt(&mut self, stmt: &'a Stmt) {
        walk_stmt(self, stmt);
    }

    fn visit_expr(&mut self, expr: &'a Expr) {
        walk_expr(self, expr);
    }

    fn visit_body(&mut self, body: &'a [Stmt]) {
        for stmt in body {
            self.visit_stmt(stmt);
        }
    }

    fn visit_arguments(&mut self, args: &'a Arguments) {
        walk_arguments(self, args);
    }

    fn visit_comprehension(&mut self, comp: &'a Comprehension) {
        walk_comprehension(self, comp);
    }

    fn visit_except_handler(&mut self, handler: &'a ExceptHandler) {
        walk_except_handler(self, handler);
    }

    fn visit_match_case(&mut self, case: &'a MatchCase) {
        walk_match_case(self, case);
    }

    fn visit_pattern(&mut self, pattern: &'a Pattern) {
        walk_pattern(self, pattern);
    }
}

fn visit_opt<'a, V: Visitor<'a> + ?Sized>(v: &mut V, expr: &'a Option<Box<Expr>>) {
    if let Some(e) = expr {
        v.visit_expr(e);
    }
}

fn visit_keywords<'a, V: Visitor<'a> + ?Sized>(v: &mut V, keywords: &'a [Keyword]) {
    for kw in keywords {
        v.visit_expr(&kw.value);
    }
}

pub fn walk_stmt<'a, V: Visitor<'a> + ?Sized>(v: &mut V, stmt: &'a Stmt) {
    match stmt {
        Stmt::FunctionDef(ast::StmtFunctionDef {
            args,
            body,
            decorator_list,
            returns,
            ..
        })
        | Stmt::AsyncFunctionDef(ast::StmtAsyncFunctionDef {
            args,
            body,
            decorator_list,
            returns,
            ..
        }) => {
            for d in decorator_list {
                v.visit_expr(d);
            }
            v.visit_arguments(args);
            visit_opt(v, returns);
            v.visit_body(body);
        }
        Stmt::ClassDef(ast::StmtClassDef {
            bases,
            keywords,
            body,
            decorator_list,
            ..
        }) => {
            for d in decorator_list {
                v.visit_expr(d);
            }
            for b in bases {
                v.visit_expr(b);
            }
            visit_keywords(v, keywords);
            v.visit_body(body);
        }
        Stmt::Return(ast::StmtReturn { value, .. }) => visit_opt(v, value),
        Stmt::Delete(ast::StmtDelete { targets, .. }) => {
            for t in targets {
                v.visit_expr(t);
            }
        }
        Stmt::Assign(ast::StmtAssign { targets, value, .. }) => {
            v.visit_expr(value);
            for t in targets {
                v.visit_expr(t);
            }
        }
        Stmt::TypeAlias(ast::StmtTypeAlias { name, value, .. }) => {
            v.visit_expr(value);
            v.visit_expr(name);
        }
        Stmt::AugAssign(ast::StmtAugAssign { target, value, .. }) => {
            v.visit_expr(value);
            v.visit_expr(target);
        }
        Stmt::AnnAssign(ast::StmtAnnAssign {
            target,
            annotation,
            value,
            ..
        }) => {
            v.visit_expr(annotation);
            visit_opt(v, value);
            v.visit_expr(target);
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
            v.visit_expr(iter);
            v.visit_expr(target);
            v.visit_body(body);
            v.visit_body(orelse);
        }
        Stmt::While(ast::StmtWhile {
            test, body, orelse, ..
        })
        | Stmt::If(ast::StmtIf {
            test, body, orelse, ..
        }) => {
            v.visit_expr(test);
            v.visit_body(body);
            v.visit_body(orelse);
        }
        Stmt::With(ast::StmtWith { items, body, .. })
        | Stmt::AsyncWith(ast::StmtAsyncWith { items, body, .. }) => {
            for item in items {
                v.visit_expr(&item.context_expr);
                visit_opt(v, &item.optional_vars);
            }
            v.visit_body(body);
        }
        Stmt::Match(ast::StmtMatch { subject, cases, .. }) => {
            v.visit_expr(subject);
            for case in cases {
                v.visit_match_case(case);
            }
        }
        Stmt::Raise(ast::StmtRaise { exc, cause, .. }) => {
            visit_opt(v, exc);
            visit_opt(v, cause);
        }
        Stmt::Try(ast::StmtTry {
            body,
            handlers,
            orelse,
            finalbody,
            ..
        })
        | Stmt::TryStar(ast::StmtTryStar {
            body,
            handlers,
            orelse,
            finalbody,
            ..
        }) => {
            v.visit_body(body);
            for h in handlers {
                v.visit_except_handler(h);
            }
            v.visit_body(orelse);
            v.visit_body(finalbody);
        }
        Stmt::Assert(ast::StmtAssert { test, msg, .. }) => {
            v.visit_expr(test);
            visit_opt(v, msg);
        }
        Stmt::Expr(ast::StmtExpr { value, .. }) => v.visit_expr(value),
        Stmt::Import(_)
        | Stmt::ImportFrom(_)
        | Stmt::Global(_)
        | Stmt::Nonlocal(_)
        | Stmt::Pass(_)
        | Stmt::Break(_)
        | Stmt::Continue(_) => {}
    }
}

pub fn walk_expr<'a, V: Visitor<'a> + ?Sized>(v: &mut V, expr: &'a Expr) {
    match expr {
        Expr::BoolOp(ast::ExprBoolOp { values, .. }) => {
            for e in values {
                v.visit_expr(e);
            }
        }
        Expr::NamedExpr(ast::ExprNamedExpr { target, value, .. }) => {
            v.visit_expr(value);
            v.visit_expr(target);
        }
        Expr::BinOp(ast::ExprBinOp { left, right, .. }) => {
            v.visit_expr(left);
            v.visit_expr(right);
        }
        Expr::UnaryOp(ast::ExprUnaryOp { operand, .. }) => v.visit_expr(operand),
        Expr::Lambda(ast::ExprLambda { args, body, .. }) => {
            v.visit_arguments(args);
            v.visit_expr(body);
        }
        Expr::IfExp(ast::ExprIfExp {
            test, body, orelse, ..
        }) => {
            v.visit_expr(test);
            v.visit_expr(body);
            v.visit_expr(orelse);
        }
        Expr::Dict(ast::ExprDict { keys, values, .. }) => {
            for (k, val) in keys.iter().zip(values) {
                if let Some(k) = k {
                    v.visit_expr(k);
                }
                v.visit_expr(val);
            }
        }
        Expr::Set(ast::ExprSet { elts, .. })
        | Expr::List(ast::ExprList { elts, .. })
        | Expr::Tuple(ast::ExprTuple { elts, .. }) => {
            for e in elts {
                v.visit_expr(e);
            }
        }
        Expr::ListComp(ast::ExprListComp {
            elt, generators, ..
        })
        | Expr::SetComp(ast::ExprSetComp {
            elt, generators, ..
        })
        | Expr::GeneratorExp(ast::ExprGeneratorExp {
            elt, generators, ..
        }) => {
            for g in generators {
                v.visit_comprehension(g);
            }
            v.visit_expr(elt);
        }
        Expr::DictComp(ast::ExprDictComp {
            key,
            value,
            generators,
            ..
        }) => {
            for g in generators {
                v.visit_comprehension(g);
            }
            v.visit_expr(key);
            v.visit_expr(value);
        }
        Expr::Await(ast::ExprAwait { value, .. })
        | Expr::YieldFrom(ast::ExprYieldFrom { value, .. })
        | Expr::Attribute(ast::ExprAttribute { value, .. })
        | Expr::Starred(ast::ExprStarred { value, .. }) => v.visit_expr(value),
        Expr::Yield(ast::ExprYield { value, .. }) => visit_opt(v, value),
        Expr::Compare(ast::ExprCompare {
            left, comparators, ..
        }) => {
            v.visit_expr(left);
            for c in comparators {
                v.visit_expr(c);
            }
        }
        Expr::Call(ast::ExprCall {
            func,
            args,
            keywords,
            ..
        }) => {
            v.visit_expr(func);
            for a in args {
                v.visit_expr(a);
            }
            visit_keywords(v, keywords);
        }
        Expr::FormattedValue(ast::ExprFormattedValue {
            value, format_spec, ..
        }) => {
            v.visit_expr(value);
            visit_opt(v, format_spec);
        }
        Expr::JoinedStr(ast::ExprJoinedStr { values, .. }) => {
            for e in values {
                v.visit_expr(e);
            }
        }
        Expr::Subscript(ast::ExprSubscript { value, slice, .. }) => {
            v.visit_expr(value);
            v.visit_expr(slice);
        }
        Expr::Slice(ast::ExprSlice {
            lower, upper, step, ..
        }) => {
            visit_opt(v, lower);
            visit_opt(v, upper);
            visit_opt(v, step);
        }
        Expr::Constant(_) | Expr::Name(_) => {}
    }
}

/// Visits annotations and defaults only; parameter names are not expressions.
pub fn walk_arguments<'a, V: Visitor<'a> + ?Sized>(v: &mut V, args: &'a Arguments) {
    for arg in args
        .posonlyargs
        .iter()
        .chain(&args.args)
        .chain(&args.kwonlyargs)
    {
        visit_opt(v, &arg.def.annotation);
        visit_opt(v, &arg.default);
    }
    for arg in args.vararg.iter().chain(args.kwarg.iter()) {
        visit_opt(v, &arg.annotation);
    }
}

pub fn walk_comprehension<'a, V: Visitor<'a> + ?Sized>(v: &mut V, comp: &'a Comprehension) {
    v.visit_expr(&comp.iter);
    v.visit_expr(&comp.target);
    for cond in &comp.ifs {
        v.visit_expr(cond);
    }
}

pub fn walk_except_handler<'a, V: Visitor<'a> + ?Sized>(v: &mut V, handler: &'a ExceptHandler) {
    let ExceptHandler::ExceptHandler(h) = handler;
    visit_opt(v, &h.type_);
    v.visit_body(&h.body);
}

pub fn walk_match_case<'a, V: Visitor<'a> + ?Sized>(v: &mut V, case: &'a MatchCase) {
    v.visit_pattern(&case.pattern);
    visit_opt(v, &case.guard);
    v.visit_body(&case.body);
}

pub fn walk_pattern<'a, V: Visitor<'a> + ?Sized>(v: &mut V, pattern: &'a Pattern) {
    match pattern {
        Pattern::MatchValue(p) => v.visit_expr(&p.value),
        Pattern::MatchSingleton(_) | Pattern::MatchStar(_) => {}
        Pattern::MatchSequence(p) => {
            for sub in &p.patterns {
                v.visit_pattern(sub);
            }
        }
        Pattern::MatchMapping(p) => {
            for k in &p.keys {
                v.visit_expr(k);
            }
            for sub in &p.patterns {
                v.visit_pattern(sub);
            }
        }
        Pattern::MatchClass(p) => {
            v.visit_expr(&p.cls);
            for sub in p.patterns.iter().chain(&p.kwd_patterns) {
                v.visit_pattern(sub);
            }
        }
        Pattern::MatchAs(p) => {
            if let Some(sub) = &p.pattern {
                v.visit_pattern(sub);
            }
        }
        Pattern::MatchOr(p) => {
            for sub in &p.patterns {
                v.visit_pattern(sub);
            }
        }
    }
}

/// Names a pattern captures, in source order.
pub fn pattern_captures(pattern: &Pattern) -> Vec<&str> {
    let mut out = Vec::new();
    collect_captures(pattern, &mut out);
    out
}

fn collect_captures<'a>(pattern: &'a Pattern, out: &mut Vec<&'a str>) {
    match pattern {
        Pattern::MatchValue(_) | Pattern::MatchSingleton(_) => {}
        Pattern::MatchSequence(p) => p.patterns.iter().for_each(|s| collect_captures(s, out)),
        Pattern::MatchMapping(p) => {
            p.patterns.iter().for_each(|s| collect_captures(s, out));
            if let Some(rest) = &p.rest {
                out.push(rest.as_str());
            }
        }
        Pattern::MatchClass(p) => p
            .patterns
            .iter()
            .chain(&p.kwd_patterns)
            .for_each(|s| collect_captures(s, out)),
        Pattern::MatchStar(p) => {
            if let Some(name) = &p.name {
                out.push(name.as_str());
            }
        }
        Pattern::MatchAs(p) => {
            if let Some(sub) = &p.pattern {
                collect_captures(sub, out);
            }
            if let Some(name) = &p.name {
                out.push(name.as_str());
            }
        }
        Pattern::MatchOr(p) => p.patterns.iter().for_each(|s| collect_captures(s, out)),
    }
}

/// All parameter names of a signature, in declaration order.
pub fn parameter_names(args: &Arguments) -> Vec<&ast::Arg> {
    args.posonlyargs
        .iter()
        .chain(&args.args)
        .map(|a| &a.def)
        .chain(args.vararg.as_deref())
        .chain(args.kwonlyargs.iter().map(|a| &a.def))
        .chain(args.kwarg.as_deref())
        .collect()
}
