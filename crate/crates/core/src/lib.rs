//! Core library for `emprobe`: a laboratory for comparing handcrafted
//! source-code features with externally produced code embeddings on the
//! method-name classification task.
//!
//! The pipeline: ingest Java methods from JSONL, lex and deduplicate them,
//! assemble balanced per-name datasets, extract handcrafted feature vectors
//! (or import embedding vectors), train binary SVMs via SMO with grid-searched
//! hyper-parameters, and analyze the result with information gain, dimension
//! pruning, and 2-D t-SNE projections.

// `!(x > 0.0)` guards validate user-supplied floats; unlike `x <= 0.0`
// they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod corpus;
pub mod embeddings;
mod error;
pub mod features;
pub mod pipeline;
pub mod projection;
pub mod rng;
pub mod svm;

pub use error::{Error, Result};

pub use corpus::{DedupConfig, LabeledDataset, MethodRecord, Split, Token, TokenKind};
pub use embeddings::EmbeddingTable;
pub use features::{FeatureSchema, FeatureVector, RawCounts, ScalerStats, Scheme, SequenceVocab};
pub use svm::{GridSpec, KernelSpec, SvmConfig, SvmModel};
