//! Dimension-pruning experiments: rank dimensions by information gain on
//! the training set, keep a top fraction, retrain, and compare test
//! metrics against the full representation.

use serde::{Deserialize, Serialize};

use super::infogain::rank_dimensions;
use super::metrics::{confusion, metrics, Metrics};
use crate::error::{Error, Result};
use crate::svm::{grid_search, predict_label, GridSpec, KernelKind, SvmConfig};

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PruneResult {
    pub fraction: f64,
    /// Kept dimension indices, ascending.
    pub kept_dims: Vec<usize>,
    pub metrics_full: Metrics,
    pub metrics_pruned: Metrics,
}

/// A train/validation/test dataset as dense rows with +/-1 labels.
#[derive(Debug, Clone)]
pub struct DataSplits<'a> {
    pub train: (&'a [Vec<f64>], &'a [f64]),
    pub validation: (&'a [Vec<f64>], &'a [f64]),
    pub test: (&'a [Vec<f64>], &'a [f64]),
}

fn project(rows: &[Vec<f64>], dims: &[usize]) -> Vec<Vec<f64>> {
    rows.iter()
        .map(|row| dims.iter().map(|&d| row[d]).collect())
        .collect()
}

fn fit_and_score(
    train: (&[Vec<f64>], &[f64]),
    validation: (&[Vec<f64>], &[f64]),
    test: (&[Vec<f64>], &[f64]),
    grid: &GridSpec,
    kernel: KernelKind,
    base: &SvmConfig,
) -> Result<Metrics> {
    let result = grid_search(train, validation, grid, kernel, base)?;
    let preds: Vec<f64> = test
        .0
        .iter()
        .map(|x| predict_label(&result.best_model, x))
        .collect::<Result<_>>()?;
    metrics(&confusion(&preds, test.1)?)
}

/// Run the pruning experiment at one fraction. Ranking happens on the
/// train matrix only; both the full and the pruned model are tuned with
/// the same grid and evaluated on the test split. `fraction = 1` keeps
/// every dimension in original order, so the pruned run reproduces the
/// full run exactly.
pub fn prune_experiment(
    data: &DataSplits,
    fraction: f64,
    grid: &GridSpec,
    kernel: KernelKind,
    base: &SvmConfig,
) -> Result<PruneResult> {
    if !(fraction > 0.0 && fraction <= 1.0) {
        return Err(Error::InvalidConfig(format!(
            "prune fraction must lie in (0, 1], got {fraction}"
        )));
    }
    let metrics_full = fit_and_score(data.train, data.validation, data.test, grid, kernel, base)?;

    let ranking = rank_dimensions(data.train.0, data.train.1)?;
    let kept_dims = ranking.top_fraction(fraction);

    let train_p = project(data.train.0, &kept_dims);
    let val_p = project(data.validation.0, &kept_dims);
    let test_p = project(data.test.0, &kept_dims);
    let metrics_pruned = fit_and_score(
        (&train_p, data.train.1),
        (&val_p, data.validation.1),
        (&test_p, data.test.1),
        grid,
        kernel,
        base,
    )?;

    Ok(PruneResult {
        fraction,
        kept_dims,
        metrics_full,
        metrics_pruned,
    })
}
