//! Hand-written lexer for Java method source.
//!
//! Lexing is comment-stripping and maximal-munch token scanning only; no
//! parsing. String and char literals are kept verbatim (including quotes)
//! as single tokens so that `//` inside a literal is never treated as a
//! comment.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TokenKind {
    Keyword,
    Identifier,
    StringLiteral,
    CharLiteral,
    NumberLiteral,
    Operator,
    Separator,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Token {
    pub kind: TokenKind,
    pub text: String,
}

impl Token {
    pub fn new(kind: TokenKind, text: impl Into<String>) -> Self {
        Token {
            kind,
            text: text.into(),
        }
    }

    pub fn is(&self, text: &str) -> bool {
        self.text == text
    }

    /// True for identifier, string, char, and number literal tokens: the
    /// token classes that enter the dedup key set.
    pub fn is_key(&self) -> bool {
        matches!(
            self.kind,
            TokenKind::Identifier
                | TokenKind::StringLiteral
                | TokenKind::CharLiteral
                | TokenKind::NumberLiteral
        )
    }
}

const KEYWORDS: &[&str] = &[
    "abstract",
    "assert",
    "boolean",
    "break",
    "byte",
    "case",
    "catch",
    "char",
    "class",
    "const",
    "continue",
    "default",
    "do",
    "double",
    "else",
    "enum",
    "extends",
    "false",
    "final",
    "finally",
    "float",
    "for",
    "goto",
    "if",
    "implements",
    "import",
    "instanceof",
    "int",
    "interface",
    "long",
    "native",
    "new",
    "null",
    "package",
    "private",
    "protected",
    "public",
    "return",
    "short",
    "static",
    "strictfp",
    "super",
    "switch",
    "synchronized",
    "this",
    "throw",
    "throws",
    "transient",
    "true",
    "try",
    "void",
    "volatile",
    "while",
];

/// Multi-character operators, longest first so maximal munch can try them
/// in order.
const OPERATORS: &[&str] = &[
    ">>>=", "<<=", ">>=", ">>>", "...", "->", "::", "==", "!=", "<=", ">=", "&&", "||", "++", "--",
    "+=", "-=", "*=", "/=", "&=", "|=", "^=", "%=", "<<", ">>", "=", ">", "<", "!", "~", "?", ":",
    "+", "-", "*", "/", "&", "|", "^", "%",
];

fn is_separator(c: char) -> bool {
    matches!(c, '(' | ')' | '{' | '}' | '[' | ']' | ';' | ',' | '.' | '@')
}

fn is_ident_start(c: char) -> bool {
    c == '_' || c == '$' || c.is_alphabetic()
}

fn is_ident_part(c: char) -> bool {
    c == '_' || c == '$' || c.is_alphanumeric()
}

struct Scanner<'a> {
    src: &'a str,
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Scanner<'a> {
    fn new(src: &'a str) -> Self {
        Scanner {
            src,
            bytes: src.as_bytes(),
            pos: 0,
        }
    }

    fn peek(&self) -> Option<char> {
        self.src[self.pos..].chars().next()
    }

    fn peek_at(&self, offset: usize) -> Option<u8> {
        self.bytes.get(self.pos + offset).copied()
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.peek()?;
        self.pos += c.len_utf8();
        Some(c)
    }

    fn starts_with(&self, s: &str) -> bool {
        self.src[self.pos..].starts_with(s)
    }

    /// Skip one comment if the cursor sits on one. Returns the newlines the
    /// comment spanned (for layout-preserving stripping) or None if no
    /// comment was found.
    fn skip_comment(&mut self) -> Result<Option<usize>> {
        if self.starts_with("//") {
            while let Some(c) = self.peek() {
                if c == '\n' {
                    break;
                }
                self.bump();
            }
            return Ok(Some(0));
        }
        if self.starts_with("/*") {
            let start = self.pos;
            self.pos += 2;
            let mut newlines = 0;
            loop {
                if self.starts_with("*/") {
                    self.pos += 2;
                    return Ok(Some(newlines));
                }
                match self.bump() {
                    Some('\n') => newlines += 1,
                    Some(_) => {}
                    None => {
                        return Err(Error::Lex {
                            offset: start,
                            message: "unterminated block comment".into(),
                        })
                    }
                }
            }
        }
        Ok(None)
    }

    /// Consume a quoted literal starting at the cursor. The opening quote
    /// char is `quote`; returns the verbatim text including both quotes.
    fn quoted(&mut self, quote: char) -> Result<String> {
        let start = self.pos;
        self.bump(); // opening quote
        loop {
            match self.peek() {
                None | Some('\n') => {
                    return Err(Error::Lex {
                        offset: start,
                        message: format!(
                            "unterminated {} literal",
                            if quote == '"' { "string" } else { "char" }
                        ),
                    });
                }
                Some('\\') => {
                    self.bump();
                    if self.bump().is_none() {
                        return Err(Error::Lex {
                            offset: start,
                            message: "unterminated escape sequence".into(),
                        });
                    }
                }
                Some(c) if c == quote => {
                    self.bump();
                    return Ok(self.src[start..self.pos].to_string());
                }
                Some(_) => {
                    self.bump();
                }
            }
        }
    }

    fn number(&mut self) -> String {
        let start = self.pos;
        if self.starts_with("0x") || self.starts_with("0X") {
            self.pos += 2;
            while let Some(c) = self.peek() {
                if c.is_ascii_hexdigit() || c == '_' {
                    self.bump();
                } else {
                    break;
                }
            }
            if matches!(self.peek(), Some('l') | Some('L')) {
                self.bump();
            }
            return self.src[start..self.pos].to_string();
        }
        // integer part (may be empty for `.5`)
        while matches!(self.peek(), Some(c) if c.is_ascii_digit() || c == '_') {
            self.bump();
        }
        if self.peek() == Some('.') {
            // a trailing `.` is a valid double literal; digits after it optional
            let after = self.peek_at(1);
            let integer_part = self.pos > start;
            if integer_part || after.is_some_and(|b| b.is_ascii_digit()) {
                self.bump();
                while matches!(self.peek(), Some(c) if c.is_ascii_digit() || c == '_') {
                    self.bump();
                }
            }
        }
        if matches!(self.peek(), Some('e') | Some('E')) {
            let mark = self.pos;
            self.bump();
            if matches!(self.peek(), Some('+') | Some('-')) {
                self.bump();
            }
            if matches!(self.peek(), Some(c) if c.is_ascii_digit()) {
                while matches!(self.peek(), Some(c) if c.is_ascii_digit() || c == '_') {
                    self.bump();
                }
            } else {
                self.pos = mark; // not an exponent after all
            }
        }
        if matches!(self.peek(), Some('f' | 'F' | 'd' | 'D' | 'l' | 'L')) {
            self.bump();
        }
        self.src[start..self.pos].to_string()
    }
}

/// Lex Java method source into tokens, dropping comments and whitespace.
///
/// Deterministic maximal munch; string/char literals are single verbatim
/// tokens. Unterminated literals and block comments are reported with
/// their byte offset.
pub fn tokenize(source: &str) -> Result<Vec<Token>> {
    let mut s = Scanner::new(source);
    let mut tokens = Vec::new();
    'outer: while let Some(c) = s.peek() {
        if c.is_whitespace() {
            s.bump();
            continue;
        }
        if c == '/' && s.skip_comment()?.is_some() {
            continue;
        }
        if c == '"' || c == '\'' {
            let text = s.quoted(c)?;
            let kind = if c == '"' {
                TokenKind::StringLiteral
            } else {
                TokenKind::CharLiteral
            };
            tokens.push(Token::new(kind, text));
            continue;
        }
        if c.is_ascii_digit() || (c == '.' && s.peek_at(1).is_some_and(|b| b.is_ascii_digit())) {
            let text = s.number();
            tokens.push(Token::new(TokenKind::NumberLiteral, text));
            continue;
        }
        if is_ident_start(c) {
            let start = s.pos;
            while matches!(s.peek(), Some(c) if is_ident_part(c)) {
                s.bump();
            }
            let text = &s.src[start..s.pos];
            let kind = if KEYWORDS.contains(&text) {
                TokenKind::Keyword
            } else {
                TokenKind::Identifier
            };
            tokens.push(Token::new(kind, text));
            continue;
        }
        for op in OPERATORS {
            if s.starts_with(op) {
                s.pos += op.len();
                tokens.push(Token::new(TokenKind::Operator, *op));
                continue 'outer;
            }
        }
        if is_separator(c) {
            s.bump();
            tokens.push(Token::new(TokenKind::Separator, c));
            continue;
        }
        // Unknown codepoint outside literals (stray unicode, backslash...).
        // Lexing stays total: emit it as a one-char separator.
        s.bump();
        tokens.push(Token::new(TokenKind::Separator, c));
    }
    Ok(tokens)
}

/// Remove comments while preserving line structure: line comments are cut
/// to the end of line, and each newline inside a block comment is kept so
/// line counts and character sequences stay aligned with the source.
pub fn strip_comments(source: &str) -> Result<String> {
    let mut s = Scanner::new(source);
    let mut out = String::with_capacity(source.len());
    while let Some(c) = s.peek() {
        if c == '/' {
            if let Some(newlines) = s.skip_comment()? {
                for _ in 0..newlines {
                    out.push('\n');
                }
                continue;
            }
        }
        if c == '"' || c == '\'' {
            out.push_str(&s.quoted(c)?);
            continue;
        }
        s.bump();
        out.push(c);
    }
    Ok(out)
}

/// Count non-blank lines (lines with at least one non-whitespace char).
pub fn nonblank_lines(text: &str) -> usize {
    text.lines().filter(|l| !l.trim().is_empty()).count()
}
