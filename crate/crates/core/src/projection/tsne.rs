//! Exact O(n^2) t-SNE: per-row Gaussian bandwidth calibration to a target
//! perplexity via bisection, then gradient descent on the KL divergence
//! with the Student-t low-dimensional kernel, momentum schedule, and early
//! exaggeration.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::SplitMix64;

#[derive(Debug, Clone, Copy, Serialize, Deserialize, PartialEq)]
pub struct TsneConfig {
    #[serde(default = "defaults::perplexity")]
    pub perplexity: f64,
    #[serde(default = "defaults::iterations")]
    pub iterations: usize,
    #[serde(default = "defaults::learning_rate")]
    pub learning_rate: f64,
    #[serde(default = "defaults::momentum_initial")]
    pub momentum_initial: f64,
    #[serde(default = "defaults::momentum_final")]
    pub momentum_final: f64,
    #[serde(default = "defaults::switch_iter")]
    pub momentum_switch_iter: usize,
    #[serde(default = "defaults::exaggeration_factor")]
    pub exaggeration_factor: f64,
    #[serde(default = "defaults::switch_iter")]
    pub exaggeration_iters: usize,
    #[serde(default)]
    pub seed: u64,
}

mod defaults {
    pub fn perplexity() -> f64 {
        30.0
    }
    pub fn iterations() -> usize {
        1000
    }
    pub fn learning_rate() -> f64 {
        200.0
    }
    pub fn momentum_initial() -> f64 {
        0.5
    }
    pub fn momentum_final() -> f64 {
        0.8
    }
    pub fn switch_iter() -> usize {
        250
    }
    pub fn exaggeration_factor() -> f64 {
        12.0
    }
}

impl Default for TsneConfig {
    fn default() -> Self {
        TsneConfig {
            perplexity: defaults::perplexity(),
            iterations: defaults::iterations(),
            learning_rate: defaults::learning_rate(),
            momentum_initial: defaults::momentum_initial(),
            momentum_final: defaults::momentum_final(),
            momentum_switch_iter: defaults::switch_iter(),
            exaggeration_factor: defaults::exaggeration_factor(),
            exaggeration_iters: defaults::switch_iter(),
            seed: 0,
        }
    }
}

impl TsneConfig {
    pub fn validate(&self, n: usize) -> Result<()> {
        if self.perplexity <= 1.0 {
            return Err(Error::InvalidConfig(format!(
                "perplexity must exceed 1, got {}",
                self.perplexity
            )));
        }
        if n < 3 {
            return Err(Error::Data(format!(
                "t-SNE needs at least 3 points, got {n}"
            )));
        }
        if self.perplexity >= (n - 1) as f64 {
            return Err(Error::InvalidConfig(format!(
                "perplexity {} must be below n-1 = {}",
                self.perplexity,
                n - 1
            )));
        }
        if self.iterations == 0 {
            return Err(Error::InvalidConfig("iterations must be at least 1".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ProjectedPoint {
    pub id: String,
    pub x: f64,
    pub y: f64,
}

/// Plot-ready 2-D coordinates, one per input row, in input order.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Projection2D {
    pub points: Vec<ProjectedPoint>,
}

/// Projection plus the per-iteration KL divergence trace (computed with
/// the un-exaggerated affinities).
#[derive(Debug, Clone)]
pub struct TsneRun {
    pub projection: Projection2D,
    pub kl_trace: Vec<f64>,
}

/// Pairwise squared Euclidean distances, dense row-major n*n.
pub fn pairwise_squared_distances(rows: &[Vec<f64>]) -> Vec<f64> {
    let n = rows.len();
    let mut d2 = vec![0.0; n * n];
    for i in 0..n {
        for j in (i + 1)..n {
            let dist: f64 = rows[i]
                .iter()
                .zip(&rows[j])
                .map(|(a, b)| {
                    let d = a - b;
                    d * d
                })
                .sum();
            d2[i * n + j] = dist;
            d2[j * n + i] = dist;
        }
    }
    d2
}

const BISECTION_STEPS: usize = 50;
const ENTROPY_TOLERANCE: f64 = 1e-5;

/// Per-row Gaussian affinities calibrated so that every row's entropy is
/// within 1e-5 bits of log2(perplexity). Returns a row-stochastic n*n
/// matrix with zero diagonal.
pub fn calibrate_affinities(distances_sq: &[f64], n: usize, perplexity: f64) -> Result<Vec<f64>> {
    if n < 3 {
        return Err(Error::Data(format!(
            "calibrate_affinities needs n >= 3, got {n}"
        )));
    }
    if distances_sq.len() != n * n {
        return Err(Error::Dimension(format!(
            "distance matrix has {} entries, expected {}",
            distances_sq.len(),
            n * n
        )));
    }
    for i in 0..n {
        if distances_sq[i * n + i] != 0.0 {
            return Err(Error::Data(format!(
                "distance matrix diagonal not zero at {i}"
            )));
        }
        for j in (i + 1)..n {
            let (a, b) = (distances_sq[i * n + j], distances_sq[j * n + i]);
            if (a - b).abs() > 1e-9 * (1.0 + a.abs()) {
                return Err(Error::Data(format!(
                    "distance matrix not symmetric at ({i}, {j})"
                )));
            }
        }
    }
    if !(perplexity > 1.0 && perplexity <= (n - 1) as f64) {
        return Err(Error::InvalidConfig(format!(
            "perplexity must lie in (1, n-1], got {perplexity}"
        )));
    }

    let target = perplexity.log2();
    let mut p = vec![0.0; n * n];
    let mut row = vec![0.0; n];
    for i in 0..n {
        // shift by the row minimum so exp never underflows to an all-zero row
        let shift = (0..n)
            .filter(|&j| j != i)
            .map(|j| distances_sq[i * n + j])
            .fold(f64::INFINITY, f64::min);
        let mut beta = 1.0;
        let mut beta_min = f64::NEG_INFINITY;
        let mut beta_max = f64::INFINITY;
        for _ in 0..BISECTION_STEPS {
            let mut sum = 0.0;
            for j in 0..n {
                row[j] = if j == i {
                    0.0
                } else {
                    (-beta * (distances_sq[i * n + j] - shift)).exp()
                };
                sum += row[j];
            }
            let mut entropy = 0.0;
            for (j, value) in row.iter_mut().enumerate() {
                if j != i && *value > 0.0 {
                    *value /= sum;
                    entropy -= *value * value.log2();
                }
            }
            let gap = entropy - target;
            if gap.abs() <= ENTROPY_TOLERANCE {
                break;
            }
            if gap > 0.0 {
                beta_min = beta;
                beta = if beta_max.is_infinite() {
                    beta * 2.0
                } else {
                    (beta + beta_max) / 2.0
                };
            } else {
                beta_max = beta;
                beta = if beta_min.is_infinite() {
                    beta / 2.0
                } else {
                    (beta + beta_min) / 2.0
                };
            }
        }
        p[i * n..(i + 1) * n].copy_from_slice(&row);
    }
    Ok(p)
}

/// Joint affinities `(P_ij + P_ji) / (2n)`; sums to 1 over all pairs.
pub fn symmetrize(p_conditional: &[f64], n: usize) -> Vec<f64> {
    let mut p = vec![0.0; n * n];
    let norm = 2.0 * n as f64;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                p[i * n + j] = (p_conditional[i * n + j] + p_conditional[j * n + i]) / norm;
            }
        }
    }
    p
}

/// KL divergence (nats) and its analytic gradient at embedding `y` for
/// joint affinities `p` (row-major n*n, zero diagonal). `exaggeration`
/// scales p inside the gradient only, exactly as the optimizer applies it.
pub fn kl_and_gradient(p: &[f64], y: &[[f64; 2]], exaggeration: f64) -> (f64, Vec<[f64; 2]>) {
    let n = y.len();
    let mut num = vec![0.0; n * n];
    let mut z = 0.0;
    for i in 0..n {
        for j in (i + 1)..n {
            let dx = y[i][0] - y[j][0];
            let dy = y[i][1] - y[j][1];
            let t = 1.0 / (1.0 + dx * dx + dy * dy);
            num[i * n + j] = t;
            num[j * n + i] = t;
            z += 2.0 * t;
        }
    }

    let mut kl = 0.0;
    let mut grad = vec![[0.0; 2]; n];
    for i in 0..n {
        for j in 0..n {
            if i == j {
                continue;
            }
            let pij = p[i * n + j];
            let q = (num[i * n + j] / z).max(1e-12);
            if pij > 0.0 {
                kl += pij * (pij / q).ln();
            }
            let force = 4.0 * (exaggeration * pij - q) * num[i * n + j];
            grad[i][0] += force * (y[i][0] - y[j][0]);
            grad[i][1] += force * (y[i][1] - y[j][1]);
        }
    }
    (kl, grad)
}

/// Project `rows` to 2-D. Rows are processed internally in lexicographic id
/// order, so the output is a pure function of the (id, row) set: permuting
/// the input permutes the output identically, and a fixed seed gives
/// byte-identical coordinates. Initial coordinates are per-id seeded
/// Gaussians at scale 1e-4; the output is mean-centered.
pub fn tsne_project(rows: &[Vec<f64>], ids: &[String], cfg: &TsneConfig) -> Result<TsneRun> {
    let n = rows.len();
    if ids.len() != n {
        return Err(Error::Dimension(format!(
            "tsne_project: {} rows vs {} ids",
            n,
            ids.len()
        )));
    }
    cfg.validate(n)?;
    let width = rows[0].len();
    if rows.iter().any(|r| r.len() != width) {
        return Err(Error::Dimension("tsne_project: ragged matrix".into()));
    }

    // canonical processing order
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| ids[a].cmp(&ids[b]));
    if order.windows(2).any(|w| ids[w[0]] == ids[w[1]]) {
        return Err(Error::Data("tsne_project: duplicate ids".into()));
    }
    let sorted_rows: Vec<Vec<f64>> = order.iter().map(|&i| rows[i].clone()).collect();

    let d2 = pairwise_squared_distances(&sorted_rows);
    let conditional = calibrate_affinities(&d2, n, cfg.perplexity)?;
    let p = symmetrize(&conditional, n);

    let mut y: Vec<[f64; 2]> = order
        .iter()
        .map(|&i| {
            let mut rng = SplitMix64::keyed(cfg.seed, &ids[i]);
            [rng.next_gaussian() * 1e-4, rng.next_gaussian() * 1e-4]
        })
        .collect();
    let mut velocity = vec![[0.0f64; 2]; n];
    let mut kl_trace = Vec::with_capacity(cfg.iterations);

    for iter in 0..cfg.iterations {
        let exaggeration = if iter < cfg.exaggeration_iters {
            cfg.exaggeration_factor
        } else {
            1.0
        };
        let momentum = if iter < cfg.momentum_switch_iter {
            cfg.momentum_initial
        } else {
            cfg.momentum_final
        };
        let (kl, grad) = kl_and_gradient(&p, &y, exaggeration);
        kl_trace.push(kl);
        for i in 0..n {
            for d in 0..2 {
                velocity[i][d] = momentum * velocity[i][d] - cfg.learning_rate * grad[i][d];
                y[i][d] += velocity[i][d];
            }
        }
        // re-center
        let mean = y.iter().fold([0.0; 2], |acc, p| {
            [acc[0] + p[0] / n as f64, acc[1] + p[1] / n as f64]
        });
        for point in &mut y {
            point[0] -= mean[0];
            point[1] -= mean[1];
        }
    }

    // back to input order
    let mut points = vec![
        ProjectedPoint {
            id: String::new(),
            x: 0.0,
            y: 0.0
        };
        n
    ];
    for (slot, &original) in order.iter().enumerate() {
        points[original] = ProjectedPoint {
            id: ids[original].clone(),
            x: y[slot][0],
            y: y[slot][1],
        };
    }
    if points.iter().any(|p| !p.x.is_finite() || !p.y.is_finite()) {
        return Err(Error::Data(
            "tsne_project: diverged to non-finite coordinates".into(),
        ));
    }
    Ok(TsneRun {
        projection: Projection2D { points },
        kl_trace,
    })
}
