//! Two-level Jaccard similarity between tokenized methods: a "key" Jaccard
//! over distinct identifier/literal texts and a multiset Jaccard over all
//! token texts.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use super::MethodRecord;
use crate::error::{Error, Result};

/// Thresholds for clone detection: a pair is a duplicate iff
/// `key_jaccard >= t0` and `multiset_jaccard >= t1`.
#[derive(Debug, Clone, Copy, Serialize, Deserialize, PartialEq)]
pub struct DedupConfig {
    #[serde(default = "default_t0")]
    pub t0: f64,
    #[serde(default = "default_t1")]
    pub t1: f64,
}

fn default_t0() -> f64 {
    0.8
}

fn default_t1() -> f64 {
    0.7
}

impl Default for DedupConfig {
    fn default() -> Self {
        DedupConfig { t0: 0.8, t1: 0.7 }
    }
}

impl DedupConfig {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("t0", self.t0), ("t1", self.t1)] {
            if !(0.0..=1.0).contains(&v) {
                return Err(Error::InvalidConfig(format!(
                    "dedup threshold {name} must lie in [0, 1], got {v}"
                )));
            }
        }
        Ok(())
    }
}

/// Precomputed token views of one record, shared by the O(n^2) dedup pass.
#[derive(Debug, Clone)]
pub(crate) struct TokenProfile {
    /// Distinct identifier and literal token texts.
    pub key_set: BTreeSet<String>,
    /// All token texts with multiplicities.
    pub counts: BTreeMap<String, usize>,
    pub total: usize,
}

impl TokenProfile {
    pub fn of(record: &MethodRecord) -> Self {
        let mut key_set = BTreeSet::new();
        let mut counts = BTreeMap::new();
        for tok in &record.tokens {
            if tok.is_key() {
                key_set.insert(tok.text.clone());
            }
            *counts.entry(tok.text.clone()).or_insert(0) += 1;
        }
        TokenProfile {
            key_set,
            total: record.tokens.len(),
            counts,
        }
    }
}

/// Jaccard over sets with the empty-set convention: both empty -> 1,
/// exactly one empty -> 0.
fn set_jaccard(a: &BTreeSet<String>, b: &BTreeSet<String>) -> f64 {
    if a.is_empty() && b.is_empty() {
        return 1.0;
    }
    if a.is_empty() || b.is_empty() {
        return 0.0;
    }
    let inter = a.intersection(b).count();
    let union = a.len() + b.len() - inter;
    inter as f64 / union as f64
}

/// Multiset Jaccard: sum of per-text min counts over sum of max counts,
/// same empty conventions.
fn multiset_jaccard(a: &BTreeMap<String, usize>, b: &BTreeMap<String, usize>) -> f64 {
    if a.is_empty() && b.is_empty() {
        return 1.0;
    }
    if a.is_empty() || b.is_empty() {
        return 0.0;
    }
    let mut inter = 0usize;
    let mut union = 0usize;
    for (text, &ca) in a {
        let cb = b.get(text).copied().unwrap_or(0);
        inter += ca.min(cb);
        union += ca.max(cb);
    }
    for (text, &cb) in b {
        if !a.contains_key(text) {
            union += cb;
        }
    }
    inter as f64 / union as f64
}

pub(crate) fn profile_similarity(a: &TokenProfile, b: &TokenProfile) -> (f64, f64) {
    (
        set_jaccard(&a.key_set, &b.key_set),
        multiset_jaccard(&a.counts, &b.counts),
    )
}

/// `(key_jaccard, multiset_jaccard)` between two tokenized records.
pub fn similarity(a: &MethodRecord, b: &MethodRecord) -> (f64, f64) {
    profile_similarity(&TokenProfile::of(a), &TokenProfile::of(b))
}
