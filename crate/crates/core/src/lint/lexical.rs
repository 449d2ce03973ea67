//! Token-level rules: E231, E226 and C812.

use super::{RawFinding, RuleSet, C812, E226, E231};
use crate::pyast::lexer::{is_keyword, tokenize, Token, TokenKind};
use crate::pyast::Location;

const ARITHMETIC: [&str; 6] = ["+", "-", "*", "/", "**", "//"];

fn loc(tok: &Token) -> Location {
    Location {
        line: tok.line,
        column: tok.col,
    }
}

fn is_space(c: Option<char>) -> bool {
    c.is_none_or(|c| c.is_whitespace())
}

fn is_closer(text: &str) -> bool {
    matches!(text, ")" | "]" | "}")
}

/// E231 and E226. Both only look at tokens, so they also run on cells that
/// do not parse.
pub(super) fn check(src: &str, rules: &RuleSet, out: &mut Vec<RawFinding>) {
    let tokens = tokenize(src);
    let want_e231 = rules.contains(E231);
    let want_e226 = rules.contains(E226);
    let mut brackets: Vec<&str> = Vec::new();

    for (i, tok) in tokens.iter().enumerate() {
        if tok.kind != TokenKind::Op {
            continue;
        }
        let text = tok.text(src);
        match text {
            "(" | "[" | "{" => brackets.push(text),
            ")" | "]" | "}" => {
                brackets.pop();
            }
            _ => {}
        }
        let next = src[tok.end..].chars().next();

        if want_e231 && matches!(text, "," | ";" | ":") && !is_space(next) {
            let allowed = match text {
                "," => matches!(next, Some(')' | ']')),
                ":" => brackets.last() == Some(&"[") || next == Some('#'),
                _ => false,
            };
            if !allowed {
                out.push(RawFinding::new(
                    E231,
                    loc(tok),
                    format!("missing whitespace after '{text}'"),
                ));
            }
        }

        if want_e226 && ARITHMETIC.contains(&text) {
            let before = src[..tok.start].chars().next_back();
            if is_space(before) || is_space(next) || is_unary(src, &tokens[..i]) {
                continue;
            }
            out.push(RawFinding::new(
                E226,
                loc(tok),
                "missing whitespace around arithmetic operator",
            ));
        }
    }
}

/// True when the operator follows something that cannot end an operand.
fn is_unary(src: &str, before: &[Token]) -> bool {
    let Some(prev) = before.iter().rev().find(|t| t.kind != TokenKind::Comment) else {
        return true;
    };
    match prev.kind {
        TokenKind::Op => !is_closer(prev.text(src)),
        TokenKind::Name => {
            is_keyword(prev.text(src)) && !matches!(prev.text(src), "True" | "False" | "None")
        }
        TokenKind::Number | TokenKind::String => false,
        TokenKind::Newline | TokenKind::Nl | TokenKind::Unknown | TokenKind::Comment => true,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum BracketRole {
    Call,
    Subscript,
    Parens,
    List,
    Braces,
}

struct Open {
    role: BracketRole,
    top_comma: bool,
    top_for: bool,
    /// Index of the first token of the current top-level element.
    element_start: Option<usize>,
}

/// C812: a multi-line bracket whose last element is not followed by a comma.
/// Calls, definitions and braces always want one; subscripts and parenthesized
/// expressions only when they already hold a tuple. Comprehensions never do,
/// and neither do trailing `*args` / `**kwargs`, which belong to other codes.
pub(super) fn check_trailing_commas(src: &str, rules: &RuleSet, out: &mut Vec<RawFinding>) {
    if !rules.contains(C812) {
        return;
    }
    let tokens = tokenize(src);
    let mut stack: Vec<Open> = Vec::new();
    let mut last_significant: Option<usize> = None;

    for (i, tok) in tokens.iter().enumerate() {
        if tok.is_trivia() {
            continue;
        }
        let text = tok.text(src);
        let is_op = tok.kind == TokenKind::Op;

        if is_op && matches!(text, "(" | "[" | "{") {
            let prev = last_significant.map(|p| &tokens[p]);
            let after_operand = prev.is_some_and(|p| match p.kind {
                TokenKind::Name => !is_keyword(p.text(src)),
                TokenKind::Op => is_closer(p.text(src)),
                TokenKind::String => text == "(",
                _ => false,
            });
            let role = match (text, after_operand) {
                ("(", true) => BracketRole::Call,
                ("(", false) => BracketRole::Parens,
                ("[", true) => BracketRole::Subscript,
                ("[", false) => BracketRole::List,
                _ => BracketRole::Braces,
            };
            if let Some(parent) = stack.last_mut() {
                parent.element_start.get_or_insert(i);
            }
            stack.push(Open {
                role,
                top_comma: false,
                top_for: false,
                element_start: None,
            });
            last_significant = Some(i);
            continue;
        }

        if is_op && is_closer(text) {
            if let Some(open) = stack.pop() {
                if let Some(last) = last_significant {
                    let last_tok = &tokens[last];
                    let empty = last_tok.kind == TokenKind::Op
                        && matches!(last_tok.text(src), "(" | "[" | "{")
                        && open.element_start.is_none();
                    if !empty
                        && last_tok.end_line < tok.line
                        && !last_tok.is_op(src, ",")
                        && wants_comma(&open)
                        && !starts_with_unpack(src, &tokens, open.element_start)
                    {
                        out.push(RawFinding::new(
                            C812,
                            Location {
                                line: last_tok.end_line,
                                column: 0,
                            },
                            "missing trailing comma",
                        ));
                    }
                }
            }
            last_significant = Some(i);
            continue;
        }

        if let Some(open) = stack.last_mut() {
            if is_op && text == "," {
                open.top_comma = true;
                open.element_start = None;
            } else {
                if tok.kind == TokenKind::Name && text == "for" {
                    open.top_for = true;
                }
                open.element_start.get_or_insert(i);
            }
        }
        last_significant = Some(i);
    }
}

fn wants_comma(open: &Open) -> bool {
    if open.top_for {
        return false;
    }
    match open.role {
        BracketRole::Call | BracketRole::List | BracketRole::Braces => true,
        BracketRole::Subscript | BracketRole::Parens => open.top_comma,
    }
}

fn starts_with_unpack(src: &str, tokens: &[Token], start: Option<usize>) -> bool {
    start.is_some_and(|i| tokens[i].is_op(src, "*") || tokens[i].is_op(src, "**"))
}
