//! Column standardization to zero mean and unit standard deviation, with
//! statistics fit on training rows only.

use serde::{Deserialize, Serialize};

use super::extract::RawCounts;
use crate::error::{Error, Result};

/// Per-column mean and population standard deviation for a column subset.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct ScalerStats {
    pub columns: Vec<usize>,
    pub mean: Vec<f64>,
    pub std: Vec<f64>,
}

impl ScalerStats {
    /// Standardized value for `column`, or an error if the scaler was not
    /// fit over it. Zero-variance columns map everything to 0.
    pub fn standardize(&self, column: usize, value: f64) -> Result<f64> {
        let pos = self.position(column)?;
        if self.std[pos] == 0.0 {
            return Ok(0.0);
        }
        Ok((value - self.mean[pos]) / self.std[pos])
    }

    pub fn covers(&self, columns: &[usize]) -> bool {
        columns.iter().all(|c| self.columns.contains(c))
    }

    fn position(&self, column: usize) -> Result<usize> {
        self.columns
            .iter()
            .position(|&c| c == column)
            .ok_or_else(|| Error::Dimension(format!("scaler was not fit over column {column}")))
    }
}

/// Fit mean and population standard deviation per selected column over the
/// training rows.
pub fn fit_scaler(train_counts: &[RawCounts], columns: &[usize]) -> Result<ScalerStats> {
    if train_counts.is_empty() {
        return Err(Error::Data("fit_scaler: no training rows".into()));
    }
    let n = train_counts.len() as f64;
    let mut mean = Vec::with_capacity(columns.len());
    let mut std = Vec::with_capacity(columns.len());
    for &col in columns {
        if train_counts.iter().any(|r| col >= r.counts.len()) {
            return Err(Error::Dimension(format!(
                "fit_scaler: column {col} exceeds row width"
            )));
        }
        let m = train_counts
            .iter()
            .map(|r| r.counts[col] as f64)
            .sum::<f64>()
            / n;
        let var = train_counts
            .iter()
            .map(|r| {
                let d = r.counts[col] as f64 - m;
                d * d
            })
            .sum::<f64>()
            / n;
        mean.push(m);
        std.push(var.sqrt());
    }
    Ok(ScalerStats {
        columns: columns.to_vec(),
        mean,
        std,
    })
}
