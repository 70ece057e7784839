//! Handcrafted feature extraction and encoding: the 47-slot schema, raw
//! occurrence counting, train-fit standardization, the four encoding
//! schemes, and char/token sequence vocabularies.

mod encode;
mod extract;
mod scaler;
mod schema;
mod vocab;

pub use encode::{encode, FeatureVector, Scheme};
pub use extract::{check_counts, extract_counts, RawCounts};
pub use scaler::{fit_scaler, ScalerStats};
pub use schema::{
    schema, FeatureEntry, FeatureGroup, FeatureSchema, Predicate, COMPLEXITY_FEATURES,
    METHOD_FEATURES, SCHEMA_VERSION, TOTAL_FEATURES,
};
pub use vocab::{build_vocab, encode_sequence, SequenceVocab, VocabMode, UNK_INDEX};
