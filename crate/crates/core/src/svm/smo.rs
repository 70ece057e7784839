//! Soft-margin binary SVM trained from scratch with Platt's sequential
//! minimal optimization: first choice sweeps KKT violators, second choice
//! maximizes |E1 - E2| over non-bound examples, with randomized (seeded)
//! fallback scans. Kernel rows are cached.

use std::rc::Rc;

use serde::{Deserialize, Serialize};

use super::kernel::{eval_unchecked, KernelSpec};
use crate::error::{Error, Result};
use crate::rng::SplitMix64;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SvmConfig {
    /// Box constraint.
    pub c: f64,
    pub kernel: KernelSpec,
    pub kkt_tolerance: f64,
    /// Safety cap on optimization sweeps.
    pub max_passes: usize,
    /// Seed for the randomized pair-selection fallbacks.
    pub seed: u64,
}

impl SvmConfig {
    pub fn new(c: f64, kernel: KernelSpec) -> Self {
        SvmConfig {
            c,
            kernel,
            kkt_tolerance: 1e-3,
            max_passes: 100,
            seed: 0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.c > 0.0) {
            return Err(Error::InvalidConfig(format!(
                "C must be positive, got {}",
                self.c
            )));
        }
        if !(self.kkt_tolerance > 0.0) {
            return Err(Error::InvalidConfig(
                "kkt_tolerance must be positive".into(),
            ));
        }
        self.kernel.validate()
    }
}

/// Trained model: support vectors with their dual coefficients and labels,
/// plus the bias and kernel.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SvmModel {
    pub kernel: KernelSpec,
    pub bias: f64,
    pub support_vectors: Vec<Vec<f64>>,
    pub alphas: Vec<f64>,
    pub sv_labels: Vec<f64>,
}

impl SvmModel {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("model serializes")
    }

    pub fn from_json(text: &str) -> Result<SvmModel> {
        serde_json::from_str(text).map_err(|e| Error::Data(format!("model json: {e}")))
    }
}

/// Signed decision value and its label (margin 0 maps to +1).
pub fn predict(model: &SvmModel, x: &[f64]) -> Result<(f64, f64)> {
    if let Some(sv) = model.support_vectors.first() {
        if sv.len() != x.len() {
            return Err(Error::Dimension(format!(
                "predict: input has {} features, support vectors have {}",
                x.len(),
                sv.len()
            )));
        }
    }
    let mut margin = model.bias;
    for ((sv, alpha), y) in model
        .support_vectors
        .iter()
        .zip(&model.alphas)
        .zip(&model.sv_labels)
    {
        margin += alpha * y * eval_unchecked(sv, x, model.kernel);
    }
    let label = if margin >= 0.0 { 1.0 } else { -1.0 };
    Ok((label, margin))
}

pub fn predict_label(model: &SvmModel, x: &[f64]) -> Result<f64> {
    predict(model, x).map(|(label, _)| label)
}

/// Train with SMO. Deterministic for a fixed `cfg.seed`; terminates at the
/// first full sweep that finds no KKT violator beyond `kkt_tolerance`
/// (further sweeps could not change state), or after `max_passes` sweeps.
pub fn train_smo(xs: &[Vec<f64>], ys: &[f64], cfg: &SvmConfig) -> Result<SvmModel> {
    cfg.validate()?;
    if xs.len() < 2 {
        return Err(Error::Data(format!(
            "train_smo needs at least 2 examples, got {}",
            xs.len()
        )));
    }
    if xs.len() != ys.len() {
        return Err(Error::Dimension(format!(
            "train_smo: {} examples vs {} labels",
            xs.len(),
            ys.len()
        )));
    }
    let width = xs[0].len();
    if xs.iter().any(|x| x.len() != width) {
        return Err(Error::Dimension("train_smo: ragged feature matrix".into()));
    }
    if ys.iter().any(|y| *y != 1.0 && *y != -1.0) {
        return Err(Error::Data("train_smo: labels must be +1 or -1".into()));
    }
    if ys.iter().all(|y| *y == ys[0]) {
        return Err(Error::SingleClass);
    }

    let mut solver = Solver::new(xs, ys, cfg);
    solver.run();
    Ok(solver.into_model())
}

struct Solver<'a> {
    xs: &'a [Vec<f64>],
    ys: &'a [f64],
    c: f64,
    kernel: KernelSpec,
    tol: f64,
    max_passes: usize,
    alphas: Vec<f64>,
    bias: f64,
    /// E_i = f(x_i) - y_i, maintained incrementally.
    errors: Vec<f64>,
    rows: Vec<Option<Rc<Vec<f64>>>>,
    cache_rows: bool,
    rng: SplitMix64,
}

// Cache whole kernel rows only while the Gram matrix stays reasonably small.
const CACHE_LIMIT: usize = 4096;
const STEP_EPS: f64 = 1e-12;

impl<'a> Solver<'a> {
    fn new(xs: &'a [Vec<f64>], ys: &'a [f64], cfg: &SvmConfig) -> Self {
        Solver {
            xs,
            ys,
            c: cfg.c,
            kernel: cfg.kernel,
            tol: cfg.kkt_tolerance,
            max_passes: cfg.max_passes,
            alphas: vec![0.0; xs.len()],
            bias: 0.0,
            errors: ys.iter().map(|y| -y).collect(),
            rows: vec![None; xs.len()],
            cache_rows: xs.len() <= CACHE_LIMIT,
            rng: SplitMix64::new(cfg.seed),
        }
    }

    fn kernel_row(&mut self, i: usize) -> Rc<Vec<f64>> {
        if let Some(row) = self.rows[i].as_ref() {
            return Rc::clone(row);
        }
        let row = Rc::new(
            self.xs
                .iter()
                .map(|x| eval_unchecked(&self.xs[i], x, self.kernel))
                .collect::<Vec<f64>>(),
        );
        if self.cache_rows {
            self.rows[i] = Some(Rc::clone(&row));
        }
        row
    }

    fn is_non_bound(&self, i: usize) -> bool {
        self.alphas[i] > 0.0 && self.alphas[i] < self.c
    }

    fn non_bound_indices(&self) -> Vec<usize> {
        (0..self.alphas.len())
            .filter(|&i| self.is_non_bound(i))
            .collect()
    }

    fn run(&mut self) {
        let n = self.xs.len();
        let mut examine_all = true;
        let mut num_changed = 1usize;
        let mut sweeps = 0usize;
        while (num_changed > 0 || examine_all) && sweeps < self.max_passes {
            sweeps += 1;
            num_changed = 0;
            if examine_all {
                for i in 0..n {
                    num_changed += self.examine(i) as usize;
                }
            } else {
                for i in self.non_bound_indices() {
                    num_changed += self.examine(i) as usize;
                }
            }
            if examine_all {
                examine_all = false;
            } else if num_changed == 0 {
                examine_all = true;
            }
        }
    }

    fn examine(&mut self, i2: usize) -> bool {
        let y2 = self.ys[i2];
        let alpha2 = self.alphas[i2];
        let e2 = self.errors[i2];
        let r2 = e2 * y2;
        let violates = (r2 < -self.tol && alpha2 < self.c) || (r2 > self.tol && alpha2 > 0.0);
        if !violates {
            return false;
        }

        // second choice: maximize |E1 - E2| over non-bound examples
        let non_bound = self.non_bound_indices();
        if non_bound.len() > 1 {
            let mut best = None;
            let mut best_gap = -1.0;
            for &i in &non_bound {
                let gap = (self.errors[i] - e2).abs();
                if gap > best_gap {
                    best_gap = gap;
                    best = Some(i);
                }
            }
            if let Some(i1) = best {
                if self.take_step(i1, i2) {
                    return true;
                }
            }
        }
        // fallback: non-bound examples from a random start
        if !non_bound.is_empty() {
            let start = self.rng.next_below(non_bound.len());
            for k in 0..non_bound.len() {
                let i1 = non_bound[(start + k) % non_bound.len()];
                if self.take_step(i1, i2) {
                    return true;
                }
            }
        }
        // fallback: everything from a random start
        let n = self.xs.len();
        let start = self.rng.next_below(n);
        for k in 0..n {
            let i1 = (start + k) % n;
            if self.take_step(i1, i2) {
                return true;
            }
        }
        false
    }

    fn take_step(&mut self, i1: usize, i2: usize) -> bool {
        if i1 == i2 {
            return false;
        }
        let (y1, y2) = (self.ys[i1], self.ys[i2]);
        let (alpha1, alpha2) = (self.alphas[i1], self.alphas[i2]);
        let (e1, e2) = (self.errors[i1], self.errors[i2]);
        let s = y1 * y2;

        let (low, high) = if y1 != y2 {
            (
                (alpha2 - alpha1).max(0.0),
                (self.c + alpha2 - alpha1).min(self.c),
            )
        } else {
            (
                (alpha1 + alpha2 - self.c).max(0.0),
                (alpha1 + alpha2).min(self.c),
            )
        };
        if low >= high {
            return false;
        }

        let row1 = self.kernel_row(i1);
        let row2 = self.kernel_row(i2);
        let k11 = row1[i1];
        let k12 = row1[i2];
        let k22 = row2[i2];
        let eta = k11 + k22 - 2.0 * k12;

        let mut a2 = if eta > 0.0 {
            (alpha2 + y2 * (e1 - e2) / eta).clamp(low, high)
        } else {
            // degenerate curvature: evaluate the objective at both ends
            let f1 = y1 * (e1 + self.bias) - alpha1 * k11 - s * alpha2 * k12;
            let f2 = y2 * (e2 + self.bias) - s * alpha1 * k12 - alpha2 * k22;
            let l1 = alpha1 + s * (alpha2 - low);
            let h1 = alpha1 + s * (alpha2 - high);
            let obj_low = l1 * f1
                + low * f2
                + 0.5 * l1 * l1 * k11
                + 0.5 * low * low * k22
                + s * low * l1 * k12;
            let obj_high = h1 * f1
                + high * f2
                + 0.5 * h1 * h1 * k11
                + 0.5 * high * high * k22
                + s * high * h1 * k12;
            if obj_low < obj_high - STEP_EPS {
                low
            } else if obj_low > obj_high + STEP_EPS {
                high
            } else {
                alpha2
            }
        };
        if (a2 - alpha2).abs() < STEP_EPS * (a2 + alpha2 + STEP_EPS) {
            return false;
        }
        // clean exact bound hits
        if a2 < 1e-10 {
            a2 = 0.0;
        } else if a2 > self.c - 1e-10 {
            a2 = self.c;
        }
        // the snap can push the derived a1 past a bound by its own width
        let a1 = (alpha1 + s * (alpha2 - a2)).clamp(0.0, self.c);

        let d1 = y1 * (a1 - alpha1);
        let d2 = y2 * (a2 - alpha2);
        let b1 = self.bias - e1 - d1 * k11 - d2 * k12;
        let b2 = self.bias - e2 - d1 * k12 - d2 * k22;
        let new_bias = if a1 > 0.0 && a1 < self.c {
            b1
        } else if a2 > 0.0 && a2 < self.c {
            b2
        } else {
            (b1 + b2) / 2.0
        };

        #[cfg(debug_assertions)]
        {
            // dual objective never decreases on an accepted step
            let d_alpha2 = a2 - alpha2;
            let delta = y2 * (e1 - e2) * d_alpha2 - 0.5 * eta * d_alpha2 * d_alpha2;
            debug_assert!(
                delta >= -1e-7 * (1.0 + delta.abs()),
                "dual objective decreased by {delta}"
            );
        }

        let bias_delta = new_bias - self.bias;
        self.bias = new_bias;
        self.alphas[i1] = a1;
        self.alphas[i2] = a2;
        for j in 0..self.errors.len() {
            self.errors[j] += d1 * row1[j] + d2 * row2[j] + bias_delta;
        }
        // pin the optimized pair's errors to their definition
        if self.is_non_bound(i1) {
            self.errors[i1] = 0.0;
        }
        if self.is_non_bound(i2) {
            self.errors[i2] = 0.0;
        }
        true
    }

    fn into_model(self) -> SvmModel {
        debug_assert!(
            self.alphas
                .iter()
                .zip(self.ys)
                .map(|(a, y)| a * y)
                .sum::<f64>()
                .abs()
                <= 1e-6
        );
        let mut support_vectors = Vec::new();
        let mut alphas = Vec::new();
        let mut sv_labels = Vec::new();
        for (i, &alpha) in self.alphas.iter().enumerate() {
            if alpha > 1e-12 {
                support_vectors.push(self.xs[i].clone());
                alphas.push(alpha);
                sv_labels.push(self.ys[i]);
            }
        }
        SvmModel {
            kernel: self.kernel,
            bias: self.bias,
            support_vectors,
            alphas,
            sv_labels,
        }
    }
}

/// Dual objective value for a full alpha vector; exposed for tests and
/// solver cross-checks.
pub fn dual_objective(xs: &[Vec<f64>], ys: &[f64], alphas: &[f64], kernel: KernelSpec) -> f64 {
    let n = xs.len();
    let mut obj: f64 = alphas.iter().sum();
    for i in 0..n {
        for j in 0..n {
            obj -= 0.5
                * alphas[i]
                * alphas[j]
                * ys[i]
                * ys[j]
                * eval_unchecked(&xs[i], &xs[j], kernel);
        }
    }
    obj
}
