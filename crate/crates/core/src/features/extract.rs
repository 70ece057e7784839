//! Occurrence counting for the handcrafted features over a masked token
//! sequence. All rules are token-level approximations; the exact rule for
//! each slot is the `Predicate` recorded in the schema.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use super::schema::{FeatureSchema, Predicate};
use crate::corpus::{nonblank_lines, MethodRecord, Token, TokenKind, MASK_PLACEHOLDER};
use crate::error::{Error, Result};

/// Raw occurrence counts aligned to a [`FeatureSchema`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RawCounts {
    pub counts: Vec<u32>,
}

impl RawCounts {
    pub fn get(&self, index: usize) -> u32 {
        self.counts[index]
    }
}

const PRIMITIVES: &[&str] = &[
    "boolean", "byte", "char", "double", "float", "int", "long", "short",
];

/// Single-pass derived views of one token sequence, shared by all
/// predicates.
struct TokenFacts<'a> {
    tokens: &'a [Token],
    /// Invocation names: identifier (not the mask placeholder, not an
    /// annotation name) immediately followed by `(`.
    invocations: Vec<&'a str>,
    parameter_count: u32,
    parameter_names: BTreeSet<&'a str>,
    local_statement_count: u32,
    local_names: BTreeSet<&'a str>,
    /// Body range (inside the outermost braces), empty for abstract methods.
    body: std::ops::Range<usize>,
}

impl<'a> TokenFacts<'a> {
    fn gather(record: &'a MethodRecord) -> Self {
        let tokens = record.tokens.as_slice();
        let mut facts = TokenFacts {
            tokens,
            invocations: Vec::new(),
            parameter_count: 0,
            parameter_names: BTreeSet::new(),
            local_statement_count: 0,
            local_names: BTreeSet::new(),
            body: 0..0,
        };

        for (i, tok) in tokens.iter().enumerate() {
            if tok.kind == TokenKind::Identifier
                && tok.text != MASK_PLACEHOLDER
                && tokens.get(i + 1).is_some_and(|t| t.is("("))
                && !(i > 0 && tokens[i - 1].is("@"))
            {
                facts.invocations.push(&tok.text);
            }
        }

        if let Some(decl) = declaration_index(tokens, &record.declared_name) {
            let open = decl + 1; // the `(` after the name
            if let Some(close) = matching_paren(tokens, open) {
                facts.scan_parameters(open, close);
                // body = inside the first brace group after the signature
                // (skips a throws clause)
                if let Some(brace) = (close + 1..tokens.len()).find(|&i| tokens[i].is("{")) {
                    if let Some(end) = matching_brace(tokens, brace) {
                        facts.body = brace + 1..end;
                    }
                }
            }
        }
        let body = facts.body.clone();
        facts.scan_locals(body);
        facts
    }

    /// Count top-level parameter segments between `open` and `close` and
    /// record each segment's name (its last identifier). Commas inside
    /// generics or nested parens do not separate parameters.
    fn scan_parameters(&mut self, open: usize, close: usize) {
        if close == open + 1 {
            return; // `()`
        }
        let tokens = self.tokens;
        let mut paren_depth = 0i32;
        let mut angle_depth = 0i32;
        let mut segments = Vec::new();
        let mut segment_start = open + 1;
        for (i, tok) in tokens.iter().enumerate().take(close).skip(open + 1) {
            let text = tok.text.as_str();
            match text {
                "(" => paren_depth += 1,
                ")" => paren_depth -= 1,
                "<" => angle_depth += 1,
                ">" | ">>" | ">>>" => {
                    angle_depth = (angle_depth - text.len() as i32).max(0);
                }
                "," if paren_depth == 0 && angle_depth == 0 => {
                    segments.push((segment_start, i));
                    segment_start = i + 1;
                }
                _ => {}
            }
        }
        segments.push((segment_start, close));
        for (from, to) in segments {
            let name = (from..to)
                .rev()
                .map(|i| &tokens[i])
                .find(|t| t.kind == TokenKind::Identifier)
                .map(|t| t.text.as_str());
            if let Some(name) = name {
                self.parameter_names.insert(name);
            }
            self.parameter_count += 1;
        }
    }

    /// Detect local declaration statements in the body: an identifier whose
    /// previous token is a type-ish token (identifier, primitive keyword,
    /// `>` or `]`) and whose next token is `=`, `;` or `,`. Subsequent
    /// declarators of the same statement contribute names but not count.
    fn scan_locals(&mut self, body: std::ops::Range<usize>) {
        let tokens = self.tokens;
        let mut i = body.start;
        while i < body.end {
            let tok = &tokens[i];
            let starts_declaration = tok.kind == TokenKind::Identifier
                && tok.text != MASK_PLACEHOLDER
                && i > body.start
                && is_type_end(&tokens[i - 1])
                && matches!(
                    tokens.get(i + 1).map(|t| t.text.as_str()),
                    Some("=" | ";" | ",")
                );
            if !starts_declaration {
                i += 1;
                continue;
            }
            self.local_statement_count += 1;
            self.local_names.insert(&tok.text);
            // walk the declarator list: name (= expr)? (, name (= expr)?)* ;
            let mut j = i + 1;
            let mut depth = 0i32;
            while j < body.end {
                match tokens[j].text.as_str() {
                    "(" | "[" | "{" => depth += 1,
                    ")" | "]" | "}" => depth -= 1,
                    ";" if depth <= 0 => break,
                    "," if depth == 0 => {
                        if let Some(next) = tokens.get(j + 1) {
                            if next.kind == TokenKind::Identifier {
                                self.local_names.insert(&next.text);
                            }
                        }
                    }
                    _ => {}
                }
                j += 1;
            }
            i = j + 1;
        }
    }

    fn count_tokens(&self, pred: impl Fn(usize, &Token) -> bool) -> u32 {
        self.tokens
            .iter()
            .enumerate()
            .filter(|(i, t)| pred(*i, t))
            .count() as u32
    }

    fn ternaries(&self) -> u32 {
        self.count_tokens(|i, t| {
            t.kind == TokenKind::Operator
                && t.text == "?"
                && i > 0
                && !matches!(self.tokens[i - 1].text.as_str(), "<" | ",")
        })
    }

    fn keyword_count(&self, words: &[&str]) -> u32 {
        self.count_tokens(|_, t| t.kind == TokenKind::Keyword && words.contains(&t.text.as_str()))
    }

    fn decisions(&self) -> u32 {
        self.keyword_count(&["if", "case"]) + self.ternaries()
    }

    fn jumps(&self) -> u32 {
        self.keyword_count(&["break", "continue"])
    }

    /// Distinct identifiers used (not invoked) but never declared as a
    /// parameter or local.
    fn global_variables(&self) -> u32 {
        let mut used: BTreeSet<&str> = BTreeSet::new();
        for (i, tok) in self.tokens[self.body.clone()].iter().enumerate() {
            let abs = self.body.start + i;
            if tok.kind == TokenKind::Identifier
                && tok.text != MASK_PLACEHOLDER
                && !self.tokens.get(abs + 1).is_some_and(|t| t.is("("))
            {
                used.insert(&tok.text);
            }
        }
        used.iter()
            .filter(|name| {
                !self.parameter_names.contains(**name) && !self.local_names.contains(**name)
            })
            .count() as u32
    }
}

fn is_type_end(tok: &Token) -> bool {
    match tok.kind {
        TokenKind::Identifier => tok.text != MASK_PLACEHOLDER,
        TokenKind::Keyword => PRIMITIVES.contains(&tok.text.as_str()),
        TokenKind::Operator => tok.text == ">",
        TokenKind::Separator => tok.text == "]",
        _ => false,
    }
}

/// Index of the declaration-site name token: the first mask placeholder (or
/// unmasked declared name) followed by `(`.
fn declaration_index(tokens: &[Token], declared_name: &str) -> Option<usize> {
    tokens.iter().enumerate().position(|(i, t)| {
        t.kind == TokenKind::Identifier
            && (t.text == MASK_PLACEHOLDER || t.text == declared_name)
            && tokens.get(i + 1).is_some_and(|n| n.is("("))
    })
}

fn matching_paren(tokens: &[Token], open: usize) -> Option<usize> {
    matching(tokens, open, "(", ")")
}

fn matching_brace(tokens: &[Token], open: usize) -> Option<usize> {
    matching(tokens, open, "{", "}")
}

fn matching(tokens: &[Token], open: usize, left: &str, right: &str) -> Option<usize> {
    let mut depth = 0usize;
    for (i, tok) in tokens.iter().enumerate().skip(open) {
        if tok.is(left) {
            depth += 1;
        } else if tok.is(right) {
            depth -= 1;
            if depth == 0 {
                return Some(i);
            }
        }
    }
    None
}

const CONDITION_OPERATORS: &[&str] = &["==", "!=", "<", ">", "<=", ">=", "&&", "||", "!"];

/// Count every schema predicate over one tokenized, name-masked record.
pub fn extract_counts(record: &MethodRecord, schema: &FeatureSchema) -> Result<RawCounts> {
    let facts = TokenFacts::gather(record);
    let stripped = record.stripped_source()?;
    let loc = nonblank_lines(&stripped) as u32;

    let counts = schema
        .entries
        .iter()
        .map(|entry| evaluate(entry.predicate, &facts, loc))
        .collect::<Result<Vec<u32>>>()?;
    Ok(RawCounts { counts })
}

fn evaluate(pred: Predicate, facts: &TokenFacts, loc: u32) -> Result<u32> {
    let count = match pred {
        Predicate::InvocationExact(name) => {
            facts.invocations.iter().filter(|n| **n == name).count() as u32
        }
        Predicate::InvocationContains(infix) => facts
            .invocations
            .iter()
            .filter(|n| n.to_ascii_lowercase().contains(infix))
            .count() as u32,
        Predicate::InvocationPrefix(prefix) => facts
            .invocations
            .iter()
            .filter(|n| n.len() > prefix.len() && n.starts_with(prefix))
            .count() as u32,
        Predicate::TokenText(alternatives) => facts.count_tokens(|_, t| {
            t.text != MASK_PLACEHOLDER && alternatives.contains(&t.text.as_str())
        }),
        Predicate::IdentifierContains(infix) => facts.count_tokens(|_, t| {
            t.kind == TokenKind::Identifier
                && t.text != MASK_PLACEHOLDER
                && t.text.to_ascii_lowercase().contains(infix)
        }),
        Predicate::IdentifierDot(name) => facts.count_tokens(|i, t| {
            t.kind == TokenKind::Identifier
                && t.text == name
                && facts.tokens.get(i + 1).is_some_and(|n| n.is("."))
        }),
        Predicate::Operator(op) => {
            facts.count_tokens(|_, t| t.kind == TokenKind::Operator && t.text == op)
        }
        Predicate::Ternary => facts.ternaries(),
        Predicate::ReturnValue => facts.count_tokens(|i, t| {
            t.kind == TokenKind::Keyword
                && t.text == "return"
                && facts.tokens.get(i + 1).is_some_and(|n| !n.is(";"))
        }),
        Predicate::Loc => loc,
        Predicate::Blocks => facts.count_tokens(|_, t| t.is("{")),
        Predicate::BasicBlocks => 1 + facts.decisions() + facts.jumps(),
        Predicate::Parameters => facts.parameter_count,
        Predicate::LocalVariables => facts.local_statement_count,
        Predicate::GlobalVariables => facts.global_variables(),
        Predicate::Loops => facts.keyword_count(&["for", "while", "do"]),
        Predicate::Jumps => facts.jumps(),
        Predicate::Decisions => facts.decisions(),
        Predicate::Conditions => facts.count_tokens(|_, t| {
            t.kind == TokenKind::Operator && CONDITION_OPERATORS.contains(&t.text.as_str())
        }),
        Predicate::Allocations => facts.keyword_count(&["new"]),
        Predicate::Invocations => facts.invocations.len() as u32,
        Predicate::TryBlocks => facts.keyword_count(&["try"]),
        Predicate::ThreadTokens => {
            facts.count_tokens(|_, t| {
                t.kind == TokenKind::Identifier && matches!(t.text.as_str(), "Thread" | "Runnable")
            }) + facts.keyword_count(&["synchronized"])
        }
    };
    Ok(count)
}

/// Invariant check helper used by validation paths.
pub fn check_counts(schema: &FeatureSchema, counts: &RawCounts) -> Result<()> {
    if counts.counts.len() != schema.len() {
        return Err(Error::Dimension(format!(
            "raw counts length {} does not match schema length {}",
            counts.counts.len(),
            schema.len()
        )));
    }
    Ok(())
}
