//! Evaluation: confusion metrics, per-dimension information gain,
//! dimension-pruning experiments, and result tables.

mod infogain;
mod metrics;
mod prune;
mod report;

pub use infogain::{information_gain, rank_dimensions, DimensionGain, IGRanking};
pub use metrics::{confusion, f1_score, metrics, ConfusionCounts, Metrics};
pub use prune::{prune_experiment, DataSplits, PruneResult};
pub use report::{
    make_report, percent, reference_averages, reference_report, reference_results, AverageRow,
    Marker, MethodRow, ReportTable, SCHEME_ORDER, TOP_METHOD_ORDER,
};
