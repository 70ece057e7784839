//! Per-dimension information gain in bits: direct conditional entropy for
//! binary columns, best single-threshold stump for continuous ones.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DimensionGain {
    pub index: usize,
    /// Information gain in bits, always >= 0.
    pub ig: f64,
    /// Best stump threshold; `None` for binary columns.
    pub threshold: Option<f64>,
}

/// Gains in column order plus the ranking (ig descending, index ascending
/// on ties).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct IGRanking {
    pub gains: Vec<DimensionGain>,
    pub order: Vec<usize>,
}

impl IGRanking {
    /// The `ceil(fraction * d)` best dimension indices, sorted ascending so
    /// that fraction = 1 is an exact identity projection.
    pub fn top_fraction(&self, fraction: f64) -> Vec<usize> {
        let d = self.order.len();
        let keep = ((fraction * d as f64).ceil() as usize).clamp(0, d);
        let mut dims: Vec<usize> = self.order[..keep].to_vec();
        dims.sort_unstable();
        dims
    }

    /// `dim,name,ig_bits,threshold` CSV; names blank without a schema.
    pub fn to_csv(&self, names: Option<&[&str]>) -> String {
        let mut out = String::from("dim,name,ig_bits,threshold\n");
        for g in &self.gains {
            let name = names.and_then(|n| n.get(g.index)).copied().unwrap_or("");
            let threshold = g.threshold.map(|t| t.to_string()).unwrap_or_default();
            out.push_str(&format!("{},{},{},{}\n", g.index, name, g.ig, threshold));
        }
        out
    }
}

fn entropy_bits(pos: usize, neg: usize) -> f64 {
    let n = pos + neg;
    if n == 0 {
        return 0.0;
    }
    let mut h = 0.0;
    for count in [pos, neg] {
        if count > 0 {
            let p = count as f64 / n as f64;
            h -= p * p.log2();
        }
    }
    h
}

fn label_counts(labels: &[f64]) -> (usize, usize) {
    let pos = labels.iter().filter(|y| **y > 0.0).count();
    (pos, labels.len() - pos)
}

/// Information gain of one column against +/-1 labels.
///
/// Binary columns (every value exactly 0 or 1) use the two-way conditional
/// entropy directly. Continuous columns maximize the gain of a stump
/// `x <= t` over the midpoints of consecutive distinct sorted values,
/// returning the smallest maximizing threshold.
pub fn information_gain(column: &[f64], labels: &[f64]) -> Result<(f64, Option<f64>)> {
    if column.len() != labels.len() {
        return Err(Error::Dimension(format!(
            "information_gain: {} values vs {} labels",
            column.len(),
            labels.len()
        )));
    }
    if column.is_empty() {
        return Err(Error::Data("information_gain: empty column".into()));
    }

    let (pos, neg) = label_counts(labels);
    let base = entropy_bits(pos, neg);

    let binary = column.iter().all(|v| *v == 0.0 || *v == 1.0);
    if binary {
        let mut counts = [[0usize; 2]; 2]; // [value][label]
        for (&v, &y) in column.iter().zip(labels) {
            let vi = if v == 1.0 { 1 } else { 0 };
            let yi = if y > 0.0 { 1 } else { 0 };
            counts[vi][yi] += 1;
        }
        let n = column.len() as f64;
        let mut conditional = 0.0;
        for row in counts {
            let total = row[0] + row[1];
            if total > 0 {
                conditional += total as f64 / n * entropy_bits(row[1], row[0]);
            }
        }
        return Ok(((base - conditional).max(0.0), None));
    }

    // continuous: sort once, sweep prefix counts over distinct-value
    // boundaries
    let mut rows: Vec<(f64, bool)> = column
        .iter()
        .zip(labels)
        .map(|(&v, &y)| (v, y > 0.0))
        .collect();
    rows.sort_by(|a, b| a.0.partial_cmp(&b.0).expect("finite feature values"));

    let n = rows.len();
    let mut best: Option<(f64, f64)> = None; // (ig, threshold)
    let mut left_pos = 0usize;
    let mut left_neg = 0usize;
    for i in 0..n - 1 {
        if rows[i].1 {
            left_pos += 1;
        } else {
            left_neg += 1;
        }
        if rows[i].0 == rows[i + 1].0 {
            continue; // not a boundary between distinct values
        }
        let threshold = (rows[i].0 + rows[i + 1].0) / 2.0;
        let left = left_pos + left_neg;
        let right = n - left;
        let right_pos = pos - left_pos;
        let right_neg = neg - left_neg;
        let conditional = left as f64 / n as f64 * entropy_bits(left_pos, left_neg)
            + right as f64 / n as f64 * entropy_bits(right_pos, right_neg);
        let ig = (base - conditional).max(0.0);
        // strict improvement keeps the smallest maximizing threshold
        if best.is_none_or(|(best_ig, _)| ig > best_ig) {
            best = Some((ig, threshold));
        }
    }

    match best {
        Some((ig, threshold)) => Ok((ig, Some(threshold))),
        None => Ok((0.0, None)), // constant column
    }
}

/// Rank all columns of a row-major matrix by information gain.
pub fn rank_dimensions(matrix: &[Vec<f64>], labels: &[f64]) -> Result<IGRanking> {
    if matrix.is_empty() {
        return Err(Error::Data("rank_dimensions: empty matrix".into()));
    }
    let d = matrix[0].len();
    if matrix.iter().any(|row| row.len() != d) {
        return Err(Error::Dimension("rank_dimensions: ragged matrix".into()));
    }
    let mut gains = Vec::with_capacity(d);
    let mut column = vec![0.0; matrix.len()];
    for j in 0..d {
        for (i, row) in matrix.iter().enumerate() {
            column[i] = row[j];
        }
        let (ig, threshold) = information_gain(&column, labels)?;
        gains.push(DimensionGain {
            index: j,
            ig,
            threshold,
        });
    }
    let mut order: Vec<usize> = (0..d).collect();
    order.sort_by(|&a, &b| {
        gains[b]
            .ig
            .partial_cmp(&gains[a].ig)
            .expect("gains are finite")
            .then(a.cmp(&b))
    });
    Ok(IGRanking { gains, order })
}
