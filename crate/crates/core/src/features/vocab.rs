//! Character- and token-level sequence vocabularies and index encodings.
//! Char mode works over the comment-stripped source restricted to ASCII
//! (codepoints 0-127); token mode over token texts. Index 0 is reserved
//! for out-of-vocabulary symbols.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::corpus::MethodRecord;
use crate::error::Result;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum VocabMode {
    Char,
    Token,
}

impl VocabMode {
    pub fn as_str(&self) -> &'static str {
        match self {
            VocabMode::Char => "char",
            VocabMode::Token => "token",
        }
    }
}

/// Symbol-to-index map with contiguous indices starting at 1 in
/// first-appearance order; 0 is the OOV index.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SequenceVocab {
    pub mode: VocabMode,
    /// `symbols[i]` has index `i + 1`.
    symbols: Vec<String>,
    #[serde(skip)]
    lookup: HashMap<String, u32>,
}

pub const UNK_INDEX: u32 = 0;

impl SequenceVocab {
    fn new(mode: VocabMode) -> Self {
        SequenceVocab {
            mode,
            symbols: Vec::new(),
            lookup: HashMap::new(),
        }
    }

    fn insert(&mut self, symbol: &str) {
        if !self.lookup.contains_key(symbol) {
            self.symbols.push(symbol.to_string());
            self.lookup
                .insert(symbol.to_string(), self.symbols.len() as u32);
        }
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn index_of(&self, symbol: &str) -> u32 {
        self.lookup.get(symbol).copied().unwrap_or(UNK_INDEX)
    }

    /// Inverse map for indices > 0.
    pub fn symbol_of(&self, index: u32) -> Option<&str> {
        if index == UNK_INDEX {
            return None;
        }
        self.symbols.get(index as usize - 1).map(|s| s.as_str())
    }

    /// Rebuild the lookup table (after deserialization).
    pub fn rebuild_lookup(&mut self) {
        self.lookup = self
            .symbols
            .iter()
            .enumerate()
            .map(|(i, s)| (s.clone(), i as u32 + 1))
            .collect();
    }

    /// The symbol stream of one record under this vocabulary's mode:
    /// ASCII chars of the comment-stripped source, or token texts.
    pub fn symbol_stream(&self, record: &MethodRecord) -> Result<Vec<String>> {
        match self.mode {
            VocabMode::Char => Ok(record
                .stripped_source()?
                .chars()
                .filter(|c| (*c as u32) <= 127)
                .map(|c| c.to_string())
                .collect()),
            VocabMode::Token => Ok(record.tokens.iter().map(|t| t.text.clone()).collect()),
        }
    }
}

/// Build a vocabulary from the given records (callers pass train +
/// validation), assigning indices in first-appearance order.
pub fn build_vocab(records: &[&MethodRecord], mode: VocabMode) -> Result<SequenceVocab> {
    let mut vocab = SequenceVocab::new(mode);
    for record in records {
        for symbol in vocab.symbol_stream(record)? {
            vocab.insert(&symbol);
        }
    }
    Ok(vocab)
}

/// Encode one record as vocabulary indices; out-of-vocabulary symbols map
/// to [`UNK_INDEX`].
pub fn encode_sequence(record: &MethodRecord, vocab: &SequenceVocab) -> Result<Vec<u32>> {
    Ok(vocab
        .symbol_stream(record)?
        .iter()
        .map(|s| vocab.index_of(s))
        .collect())
}
