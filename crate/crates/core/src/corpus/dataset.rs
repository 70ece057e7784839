//! Balanced per-target dataset assembly: for a target method name, train on
//! a fixed number of positives plus an equal seeded negative sample, and
//! evaluate on every available positive with equal-count negatives.

use serde::{Deserialize, Serialize};

use super::{MethodRecord, Split};
use crate::error::{Error, Result};
use crate::rng::SplitMix64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Polarity {
    Positive,
    Negative,
}

impl Polarity {
    pub fn as_str(&self) -> &'static str {
        match self {
            Polarity::Positive => "positive",
            Polarity::Negative => "negative",
        }
    }

    /// SVM label: +1 positive, -1 negative.
    pub fn y(&self) -> f64 {
        match self {
            Polarity::Positive => 1.0,
            Polarity::Negative => -1.0,
        }
    }
}

/// A balanced binary dataset for one target method name.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LabeledDataset {
    pub target: String,
    pub seed: u64,
    pub train: Vec<(String, Polarity)>,
    pub validation: Vec<(String, Polarity)>,
    pub test: Vec<(String, Polarity)>,
}

impl LabeledDataset {
    pub fn split(&self, split: Split) -> &[(String, Polarity)] {
        match split {
            Split::Train => &self.train,
            Split::Validation => &self.validation,
            Split::Test => &self.test,
        }
    }

    /// Manifest JSONL: one `{"id","label","split"}` object per example.
    pub fn to_manifest_jsonl(&self) -> String {
        let mut out = String::new();
        for split in Split::ALL {
            for (id, polarity) in self.split(split) {
                out.push_str(&format!(
                    "{{\"id\":{},\"label\":\"{}\",\"split\":\"{}\"}}\n",
                    serde_json::to_string(id).expect("string encodes"),
                    polarity.as_str(),
                    split.as_str()
                ));
            }
        }
        out
    }
}

/// Assemble the balanced dataset for `target`.
///
/// Train takes `n_train` positives and `n_train` negatives, both sampled
/// uniformly without replacement with a generator keyed on
/// `(seed, target, split, class)`. Validation and test take every available
/// positive plus an equal-count negative sample. With `small_corpus` set,
/// shortfalls shrink the per-class count to what both classes can supply
/// (balance is always exact); without it they are errors naming the
/// shortfall.
pub fn assemble_dataset(
    corpus: &[MethodRecord],
    target: &str,
    n_train: usize,
    seed: u64,
    small_corpus: bool,
) -> Result<LabeledDataset> {
    let mut dataset = LabeledDataset {
        target: target.to_string(),
        seed,
        train: Vec::new(),
        validation: Vec::new(),
        test: Vec::new(),
    };

    for split in Split::ALL {
        // sorted id pools give the sampler a canonical base order
        let mut positives: Vec<&str> = Vec::new();
        let mut negatives: Vec<&str> = Vec::new();
        for r in corpus.iter().filter(|r| r.split == split) {
            if r.label == target {
                positives.push(&r.id);
            } else {
                negatives.push(&r.id);
            }
        }
        positives.sort_unstable();
        negatives.sort_unstable();

        let requested = match split {
            Split::Train => n_train,
            _ => positives.len(),
        };
        let available = positives.len().min(negatives.len());
        let per_class = if available < requested {
            if !small_corpus {
                let (class, have) = if positives.len() < requested {
                    ("positive", positives.len())
                } else {
                    ("negative", negatives.len())
                };
                return Err(Error::Shortfall {
                    target: target.to_string(),
                    class: class.to_string(),
                    split: split.as_str().to_string(),
                    available: have,
                    required: requested,
                });
            }
            available
        } else {
            requested
        };

        let sample = |pool: &[&str], class: &str| -> Vec<String> {
            let take_all = pool.len() == per_class;
            if take_all {
                return pool.iter().map(|s| s.to_string()).collect();
            }
            let mut rng = SplitMix64::keyed(seed, &format!("{target}/{}/{class}", split.as_str()));
            rng.sample(pool, per_class)
                .into_iter()
                .map(|s| s.to_string())
                .collect()
        };

        let mut rows: Vec<(String, Polarity)> = sample(&positives, "pos")
            .into_iter()
            .map(|id| (id, Polarity::Positive))
            .collect();
        rows.extend(
            sample(&negatives, "neg")
                .into_iter()
                .map(|id| (id, Polarity::Negative)),
        );
        match split {
            Split::Train => dataset.train = rows,
            Split::Validation => dataset.validation = rows,
            Split::Test => dataset.test = rows,
        }
    }
    Ok(dataset)
}
