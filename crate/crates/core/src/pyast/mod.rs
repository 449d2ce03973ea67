//! Lexical line classification and syntax-tree fact extraction for Python cells.

mod facts;
pub mod lexer;
pub mod visit;

use std::fmt;

use rustpython_parser::{ast, Mode};
use serde::{Deserialize, Serialize};

pub use facts::{
    extract_facts, CallShape, CallSite, CellFacts, FunctionDef, ImportBinding, ImportKind,
};

use crate::ingest::count_lines;
use lexer::TokenKind;

pub use rustpython_parser::ast::{Expr, Stmt};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct LineCounts {
    pub sloc: u32,
    pub blank: u32,
    pub comment: u32,
}

impl LineCounts {
    pub fn total(&self) -> u32 {
        self.sloc + self.blank + self.comment
    }
}

/// 1-based line, 0-based byte column.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Location {
    pub line: usize,
    pub column: usize,
}

impl fmt::Display for Location {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.column)
    }
}

/// Byte offset to line/column translation for one source text.
#[derive(Debug, Clone)]
pub struct LineIndex {
    starts: Vec<usize>,
}

impl LineIndex {
    pub fn new(source: &str) -> Self {
        let mut starts = vec![0];
        starts.extend(source.match_indices('\n').map(|(i, _)| i + 1));
        LineIndex { starts }
    }

    pub fn location(&self, offset: usize) -> Location {
        let line = match self.starts.binary_search(&offset) {
            Ok(i) => i,
            Err(i) => i - 1,
        };
        Location {
            line: line + 1,
            column: offset - self.starts[line],
        }
    }

    pub fn line(&self, offset: usize) -> usize {
        self.location(offset).line
    }
}

/// Splits a cell into source, blank and comment lines.
///
/// Lines that belong to a multi-line string literal count as source even when
/// they look blank or start with `#`, since they are part of a statement.
pub fn classify_lines(source: &str) -> LineCounts {
    let total = count_lines(source);
    if total == 0 {
        return LineCounts::default();
    }
    #[derive(Clone, Copy, PartialEq)]
    enum Class {
        Blank,
        Comment,
        Code,
    }
    let mut classes = vec![Class::Blank; total];
    for tok in lexer::tokenize(source) {
        let (first, last) = (tok.line, tok.end_line.min(total));
        if first > total {
            continue;
        }
        match tok.kind {
            TokenKind::Newline | TokenKind::Nl => {}
            TokenKind::Comment => {
                if classes[first - 1] == Class::Blank {
                    classes[first - 1] = Class::Comment;
                }
            }
            _ => {
                for class in &mut classes[first - 1..last] {
                    *class = Class::Code;
                }
            }
        }
    }
    let mut counts = LineCounts::default();
    for class in classes {
        match class {
            Class::Blank => counts.blank += 1,
            Class::Comment => counts.comment += 1,
            Class::Code => counts.sloc += 1,
        }
    }
    counts
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ParseFailure {
    pub location: Location,
    pub message: String,
}

impl fmt::Display for ParseFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "syntax error at {}: {}", self.location, self.message)
    }
}

/// A successfully parsed cell together with its text, for location lookups.
#[derive(Debug, Clone)]
pub struct SyntaxTree {
    body: Vec<Stmt>,
    source: String,
    index: LineIndex,
}

impl SyntaxTree {
    pub fn body(&self) -> &[Stmt] {
        &self.body
    }

    pub fn source(&self) -> &str {
        &self.source
    }

    pub fn line_index(&self) -> &LineIndex {
        &self.index
    }

    pub fn location_of(&self, node: &impl ast::Ranged) -> Location {
        self.index.location(node.start().to_usize())
    }

    pub fn line_of(&self, node: &impl ast::Ranged) -> usize {
        self.location_of(node).line
    }

    /// Line of the last character covered by `node`.
    pub fn end_line_of(&self, node: &impl ast::Ranged) -> usize {
        let end = node.end().to_usize();
        self.index
            .line(end.saturating_sub(1).max(node.start().to_usize()))
    }
}

/// Parses one cell. Failures are values: callers keep the lexical metrics and
/// skip the tree-based ones.
pub fn parse_cell(source: &str) -> Result<SyntaxTree, ParseFailure> {
    let index = LineIndex::new(source);
    match rustpython_parser::parse(source, Mode::Module, "<cell>") {
        Ok(ast::Mod::Module(module)) => Ok(SyntaxTree {
            body: module.body,
            source: source.to_string(),
            index,
        }),
        Ok(_) => unreachable!("module mode always yields a module"),
        Err(err) => Err(ParseFailure {
            location: index.location(err.offset.to_usize().min(source.len())),
            message: err.error.to_string(),
        }),
    }
}

/// True when the string literal statement sits where Python would treat it as
/// a docstring: the first statement of a module, class, or function body.
pub fn is_docstring(body: &[Stmt], position: usize) -> bool {
    position == 0
        && matches!(
            body.first(),
            Some(Stmt::Expr(ast::StmtExpr { value, .. }))
                if matches!(value.as_ref(), Expr::Constant(c) if c.value.is_str())
        )
}
