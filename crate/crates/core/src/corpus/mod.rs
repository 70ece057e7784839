//! Corpus ingest: lexing, own-name masking, clone deduplication, and
//! balanced per-target dataset assembly.

pub mod dataset;
pub mod dedup;
mod lexer;
pub mod similarity;
pub mod synthetic;

pub use dataset::{assemble_dataset, LabeledDataset, Polarity};
pub use dedup::{dedup, DedupReport};
pub use lexer::{nonblank_lines, strip_comments, tokenize, Token, TokenKind};
pub use similarity::{similarity, DedupConfig};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::SplitMix64;

/// Placeholder text substituted for the method's own name. Cannot collide
/// with a lexed identifier because `<` and `>` never lex into one.
pub const MASK_PLACEHOLDER: &str = "<SELF>";

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Split {
    Train,
    Validation,
    Test,
}

impl Split {
    pub const ALL: [Split; 3] = [Split::Train, Split::Validation, Split::Test];

    pub fn as_str(&self) -> &'static str {
        match self {
            Split::Train => "train",
            Split::Validation => "validation",
            Split::Test => "test",
        }
    }
}

/// One Java method of the corpus, tokenized and own-name masked.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MethodRecord {
    pub id: String,
    pub declared_name: String,
    /// Class label; equals `declared_name` at ingest.
    pub label: String,
    /// Original source, comments included.
    pub source: String,
    /// Comment-free tokens with the own name masked.
    pub tokens: Vec<Token>,
    pub split: Split,
}

impl MethodRecord {
    /// Comment-stripped source (line structure preserved).
    pub fn stripped_source(&self) -> Result<String> {
        strip_comments(&self.source)
    }
}

/// One line of the ingest JSONL format.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RawMethod {
    pub id: String,
    pub name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub path: Option<String>,
    pub code: String,
    /// Optional pre-assigned split; records without one get a seeded
    /// hash-based assignment.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub split: Option<Split>,
}

/// Fractions used for seeded split assignment when the input carries none.
#[derive(Debug, Clone, Copy, Serialize, Deserialize, PartialEq)]
pub struct SplitFractions {
    #[serde(default = "default_train_fraction")]
    pub train: f64,
    #[serde(default = "default_eval_fraction")]
    pub validation: f64,
    #[serde(default = "default_eval_fraction")]
    pub test: f64,
}

fn default_train_fraction() -> f64 {
    0.7
}

fn default_eval_fraction() -> f64 {
    0.15
}

impl Default for SplitFractions {
    fn default() -> Self {
        SplitFractions {
            train: 0.7,
            validation: 0.15,
            test: 0.15,
        }
    }
}

impl SplitFractions {
    pub fn validate(&self) -> Result<()> {
        let parts = [self.train, self.validation, self.test];
        if parts.iter().any(|p| !(0.0..=1.0).contains(p)) {
            return Err(Error::InvalidConfig(
                "split fractions must lie in [0, 1]".into(),
            ));
        }
        let sum: f64 = parts.iter().sum();
        if (sum - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidConfig(format!(
                "split fractions must sum to 1, got {sum}"
            )));
        }
        Ok(())
    }

    fn assign(&self, seed: u64, id: &str) -> Split {
        let u = SplitMix64::keyed(seed, id).next_f64();
        if u < self.train {
            Split::Train
        } else if u < self.train + self.validation {
            Split::Validation
        } else {
            Split::Test
        }
    }
}

/// Parse a JSONL corpus (one object per line; blank lines ignored).
pub fn parse_corpus_jsonl(text: &str) -> Result<Vec<RawMethod>> {
    let mut out = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let raw: RawMethod = serde_json::from_str(line)
            .map_err(|e| Error::Data(format!("corpus line {}: {e}", lineno + 1)))?;
        out.push(raw);
    }
    Ok(out)
}

/// Tokenize, mask, and split-assign one raw method.
pub fn build_record(raw: RawMethod, seed: u64, fractions: SplitFractions) -> Result<MethodRecord> {
    let tokens = tokenize(&raw.code).map_err(|e| match e {
        Error::Lex { offset, message } => Error::Lex {
            offset,
            message: format!("record `{}`: {message}", raw.id),
        },
        other => other,
    })?;
    let split = raw.split.unwrap_or_else(|| fractions.assign(seed, &raw.id));
    let record = MethodRecord {
        id: raw.id,
        label: raw.name.clone(),
        declared_name: raw.name,
        source: raw.code,
        tokens,
        split,
    };
    mask_own_name(record)
}

/// Ingest a whole corpus: build every record and enforce id uniqueness.
pub fn ingest(
    raws: Vec<RawMethod>,
    seed: u64,
    fractions: SplitFractions,
) -> Result<Vec<MethodRecord>> {
    fractions.validate()?;
    let mut seen = std::collections::BTreeSet::new();
    for raw in &raws {
        if !seen.insert(raw.id.as_str()) {
            return Err(Error::Data(format!("duplicate record id `{}`", raw.id)));
        }
    }
    let seen_len = seen.len();
    drop(seen);
    let mut records = Vec::with_capacity(seen_len);
    for raw in raws {
        records.push(build_record(raw, seed, fractions)?);
    }
    Ok(records)
}

/// Replace the declaration-site name token with [`MASK_PLACEHOLDER`], along
/// with bare self-recursive calls in the body (`name(` not preceded by `.`).
/// Calls through a receiver (`other.name(...)`) are kept.
pub fn mask_own_name(mut record: MethodRecord) -> Result<MethodRecord> {
    let name = record.declared_name.clone();
    let n = record.tokens.len();
    let mut declaration = None;
    for i in 0..n {
        let tok = &record.tokens[i];
        if tok.kind == TokenKind::Identifier
            && tok.text == name
            && record.tokens.get(i + 1).is_some_and(|t| t.is("("))
        {
            declaration = Some(i);
            break;
        }
    }
    let Some(decl) = declaration else {
        return Err(Error::Structural {
            id: record.id,
            message: format!("declaration-site token `{name}(` not found"),
        });
    };
    record.tokens[decl].text = MASK_PLACEHOLDER.to_string();
    for i in decl + 1..n {
        let is_self_call = record.tokens[i].kind == TokenKind::Identifier
            && record.tokens[i].text == name
            && record.tokens.get(i + 1).is_some_and(|t| t.is("("))
            && !record.tokens[i - 1].is(".");
        if is_self_call {
            record.tokens[i].text = MASK_PLACEHOLDER.to_string();
        }
    }
    Ok(record)
}
