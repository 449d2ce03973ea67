//! Error-tolerant Python tokenizer.
//!
//! Only as much of the language as the lexical checks need: strings and
//! comments are recognised so their content is never mistaken for code,
//! operators are split by longest match, and brackets are tracked so logical
//! newlines can be told apart from line breaks inside parentheses. Anything it
//! does not recognise becomes an [`TokenKind::Unknown`] token instead of an
//! error, which keeps notebook magics like `%timeit` or `!pip` harmless.

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TokenKind {
    Name,
    Number,
    String,
    Comment,
    Op,
    /// End of a logical line (outside brackets).
    Newline,
    /// Line break inside brackets.
    Nl,
    Unknown,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Token {
    pub kind: TokenKind,
    pub start: usize,
    pub end: usize,
    /// 1-based line of the first character.
    pub line: usize,
    /// 0-based byte column of the first character.
    pub col: usize,
    /// 1-based line of the last character.
    pub end_line: usize,
}

impl Token {
    pub fn text<'a>(&self, source: &'a str) -> &'a str {
        &source[self.start..self.end]
    }

    pub fn is_op(&self, source: &str, op: &str) -> bool {
        self.kind == TokenKind::Op && self.text(source) == op
    }

    pub fn is_trivia(&self) -> bool {
        matches!(
            self.kind,
            TokenKind::Comment | TokenKind::Nl | TokenKind::Newline
        )
    }
}

const OPS3: [&str; 5] = ["**=", "//=", ">>=", "<<=", "..."];
const OPS2: [&str; 19] = [
    "**", "//", "<<", ">>", "<=", ">=", "==", "!=", "->", "+=", "-=", "*=", "/=", "%=", "&=", "|=",
    "^=", "@=", ":=",
];
const OPS1: &str = "+-*/%@&|^~<>()[]{},:;.=!";

const PYTHON_KEYWORDS: [&str; 35] = [
    "False", "None", "True", "and", "as", "assert", "async", "await", "break", "class", "continue",
    "def", "del", "elif", "else", "except", "finally", "for", "from", "global", "if", "import",
    "in", "is", "lambda", "nonlocal", "not", "or", "pass", "raise", "return", "try", "while",
    "with", "yield",
];

pub fn is_keyword(word: &str) -> bool {
    PYTHON_KEYWORDS.contains(&word)
}

fn is_string_prefix(word: &str) -> bool {
    word.len() <= 2
        && !word.is_empty()
        && word
            .chars()
            .all(|c| matches!(c.to_ascii_lowercase(), 'r' | 'b' | 'u' | 'f'))
}

fn is_ident_start(c: char) -> bool {
    c == '_' || c.is_alphabetic()
}

fn is_ident_continue(c: char) -> bool {
    c == '_' || c.is_alphanumeric()
}

struct Cursor<'a> {
    src: &'a str,
    pos: usize,
    line: usize,
    line_start: usize,
}

impl<'a> Cursor<'a> {
    fn peek(&self) -> Option<char> {
        self.src[self.pos..].chars().next()
    }

    fn peek_at(&self, n: usize) -> Option<char> {
        self.src[self.pos..].chars().nth(n)
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.peek()?;
        self.pos += c.len_utf8();
        if c == '\n' {
            self.line += 1;
            self.line_start = self.pos;
        }
        Some(c)
    }

    fn rest(&self) -> &'a str {
        &self.src[self.pos..]
    }
}

pub fn tokenize(source: &str) -> Vec<Token> {
    let mut cur = Cursor {
        src: source,
        pos: 0,
        line: 1,
        line_start: 0,
    };
    let mut tokens = Vec::new();
    let mut depth: usize = 0;

    while let Some(c) = cur.peek() {
        let start = cur.pos;
        let line = cur.line;
        let col = start - cur.line_start;
        let kind = match c {
            ' ' | '\t' | '\x0c' => {
                cur.bump();
                continue;
            }
            '\\' if cur.peek_at(1) == Some('\n') => {
                cur.bump();
                cur.bump();
                continue;
            }
            '\n' => {
                cur.bump();
                if depth == 0 {
                    TokenKind::Newline
                } else {
                    TokenKind::Nl
                }
            }
            '#' => {
                while let Some(c) = cur.peek() {
                    if c == '\n' {
                        break;
                    }
                    cur.bump();
                }
                TokenKind::Comment
            }
            '\'' | '"' => {
                lex_string(&mut cur);
                TokenKind::String
            }
            c if is_ident_start(c) => {
                while cur.peek().is_some_and(is_ident_continue) {
                    cur.bump();
                }
                let word = &source[start..cur.pos];
                if is_string_prefix(word) && matches!(cur.peek(), Some('\'' | '"')) {
                    lex_string(&mut cur);
                    TokenKind::String
                } else {
                    TokenKind::Name
                }
            }
            c if c.is_ascii_digit()
                || (c == '.' && cur.peek_at(1).is_some_and(|d| d.is_ascii_digit())) =>
            {
                lex_number(&mut cur);
                TokenKind::Number
            }
            _ => {
                let rest = cur.rest();
                let len = OPS3
                    .iter()
                    .chain(OPS2.iter())
                    .find(|op| rest.starts_with(*op))
                    .map(|op| op.len())
                    .or_else(|| OPS1.contains(c).then_some(1));
                match len {
                    Some(len) => {
                        for _ in 0..len {
                            cur.bump();
                        }
                        match c {
                            '(' | '[' | '{' if len == 1 => depth += 1,
                            ')' | ']' | '}' if len == 1 => depth = depth.saturating_sub(1),
                            _ => {}
                        }
                        TokenKind::Op
                    }
                    None => {
                        cur.bump();
                        TokenKind::Unknown
                    }
                }
            }
        };
        let end_line = if kind == TokenKind::Newline || kind == TokenKind::Nl {
            line
        } else {
            cur.line
        };
        tokens.push(Token {
            kind,
            start,
            end: cur.pos,
            line,
            col,
            end_line,
        });
    }
    tokens
}

fn lex_string(cur: &mut Cursor<'_>) {
    let quote = cur.bump().expect("caller checked for a quote");
    let triple = cur.peek() == Some(quote) && cur.peek_at(1) == Some(quote);
    if triple {
        cur.bump();
        cur.bump();
    } else if cur.peek() == Some(quote) {
        // empty string literal
        cur.bump();
        return;
    }
    while let Some(c) = cur.peek() {
        match c {
            '\\' => {
                cur.bump();
                cur.bump();
            }
            '\n' if !triple => return,
            c if c == quote => {
                if !triple {
                    cur.bump();
                    return;
                }
                if cur.peek_at(1) == Some(quote) && cur.peek_at(2) == Some(quote) {
                    cur.bump();
                    cur.bump();
                    cur.bump();
                    return;
                }
                cur.bump();
            }
            _ => {
                cur.bump();
            }
        }
    }
}

fn lex_number(cur: &mut Cursor<'_>) {
    let radix_prefixed = cur.rest().len() > 1
        && cur.peek() == Some('0')
        && matches!(cur.peek_at(1), Some('x' | 'X' | 'o' | 'O' | 'b' | 'B'));
    while let Some(c) = cur.peek() {
        if c.is_ascii_alphanumeric() || c == '_' || c == '.' {
            cur.bump();
            if !radix_prefixed
                && matches!(c, 'e' | 'E')
                && matches!(cur.peek(), Some('+' | '-'))
                && cur.peek_at(1).is_some_and(|d| d.is_ascii_digit())
            {
                cur.bump();
            }
        } else {
            break;
        }
    }
}
