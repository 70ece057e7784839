//! Validation-set grid search over (C, gamma) for SMO-trained SVMs.

use serde::{Deserialize, Serialize};

use super::kernel::KernelSpec;
use super::smo::{predict_label, train_smo, SvmConfig, SvmModel};
use crate::analysis::{confusion, metrics};
use crate::error::{Error, Result};

/// Hyper-parameter candidates. `gamma_values` only matters for the RBF
/// kernel.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct GridSpec {
    #[serde(default = "default_c_values")]
    pub c_values: Vec<f64>,
    #[serde(default = "default_gamma_values")]
    pub gamma_values: Vec<f64>,
}

// the customary exponential grid: C in 2^-5..2^15, gamma in 2^-15..2^3,
// both in steps of 2^2
fn default_c_values() -> Vec<f64> {
    (-5..=15).step_by(2).map(|e| 2f64.powi(e)).collect()
}

fn default_gamma_values() -> Vec<f64> {
    (-15..=3).step_by(2).map(|e| 2f64.powi(e)).collect()
}

impl Default for GridSpec {
    fn default() -> Self {
        GridSpec {
            c_values: default_c_values(),
            gamma_values: default_gamma_values(),
        }
    }
}

impl GridSpec {
    pub fn validate(&self, kernel: KernelKind) -> Result<()> {
        if self.c_values.is_empty() {
            return Err(Error::InvalidConfig("grid has no C values".into()));
        }
        if self.c_values.iter().any(|c| !(*c > 0.0)) {
            return Err(Error::InvalidConfig(
                "grid C values must be positive".into(),
            ));
        }
        if kernel == KernelKind::Rbf {
            if self.gamma_values.is_empty() {
                return Err(Error::InvalidConfig("rbf grid has no gamma values".into()));
            }
            if self.gamma_values.iter().any(|g| !(*g > 0.0)) {
                return Err(Error::InvalidConfig(
                    "grid gamma values must be positive".into(),
                ));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum KernelKind {
    Linear,
    Rbf,
}

impl KernelKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            KernelKind::Linear => "linear",
            KernelKind::Rbf => "rbf",
        }
    }

    pub fn parse(s: &str) -> Result<KernelKind> {
        match s {
            "linear" => Ok(KernelKind::Linear),
            "rbf" => Ok(KernelKind::Rbf),
            other => Err(Error::InvalidConfig(format!("unknown kernel `{other}`"))),
        }
    }

    fn spec(&self, gamma: Option<f64>) -> KernelSpec {
        match self {
            KernelKind::Linear => KernelSpec::Linear,
            KernelKind::Rbf => KernelSpec::Rbf {
                gamma: gamma.expect("rbf cells carry a gamma"),
            },
        }
    }
}

/// One evaluated grid cell.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct GridCell {
    pub c: f64,
    pub gamma: Option<f64>,
    pub val_accuracy: f64,
    pub val_f1: f64,
}

#[derive(Debug, Clone)]
pub struct GridSearchResult {
    pub best_cfg: SvmConfig,
    pub best_model: SvmModel,
    pub table: Vec<GridCell>,
}

impl GridSearchResult {
    /// `C,gamma,val_accuracy,val_f1` CSV (gamma blank for linear cells).
    pub fn table_csv(&self) -> String {
        let mut out = String::from("C,gamma,val_accuracy,val_f1\n");
        for cell in &self.table {
            let gamma = cell.gamma.map(|g| g.to_string()).unwrap_or_default();
            out.push_str(&format!(
                "{},{},{},{}\n",
                cell.c, gamma, cell.val_accuracy, cell.val_f1
            ));
        }
        out
    }
}

/// Train a model per grid cell, score validation F1, and return the
/// maximizer. Ties break toward the smaller C, then the smaller gamma
/// (cells are visited in ascending order and replaced only on strict
/// improvement). Training failures are annotated with the failing cell.
pub fn grid_search(
    train: (&[Vec<f64>], &[f64]),
    validation: (&[Vec<f64>], &[f64]),
    grid: &GridSpec,
    kernel: KernelKind,
    base: &SvmConfig,
) -> Result<GridSearchResult> {
    grid.validate(kernel)?;
    // ascending visit order makes the tie-break (smaller C, then smaller
    // gamma) fall out of "replace only on strict improvement"
    let mut c_values = grid.c_values.clone();
    c_values.sort_by(|a, b| a.partial_cmp(b).expect("validated positive"));
    let gammas: Vec<Option<f64>> = match kernel {
        KernelKind::Linear => vec![None],
        KernelKind::Rbf => {
            let mut gs = grid.gamma_values.clone();
            gs.sort_by(|a, b| a.partial_cmp(b).expect("validated positive"));
            gs.into_iter().map(Some).collect()
        }
    };

    let mut best: Option<(f64, SvmConfig, SvmModel)> = None;
    let mut table = Vec::new();
    for &c in &c_values {
        for &gamma in &gammas {
            let cfg = SvmConfig {
                c,
                kernel: kernel.spec(gamma),
                ..*base
            };
            let model = train_smo(train.0, train.1, &cfg).map_err(|e| {
                Error::Data(format!(
                    "grid cell (C={c}, gamma={}): {e}",
                    gamma.map(|g| g.to_string()).unwrap_or_else(|| "-".into())
                ))
            })?;
            let preds: Vec<f64> = validation
                .0
                .iter()
                .map(|x| predict_label(&model, x))
                .collect::<Result<_>>()?;
            let m = metrics(&confusion(&preds, validation.1)?)?;
            table.push(GridCell {
                c,
                gamma,
                val_accuracy: m.accuracy,
                val_f1: m.f1,
            });
            if best.as_ref().is_none_or(|(f1, _, _)| m.f1 > *f1) {
                best = Some((m.f1, cfg, model));
            }
        }
    }
    let (_, best_cfg, best_model) = best.expect("grid has at least one cell");
    Ok(GridSearchResult {
        best_cfg,
        best_model,
        table,
    })
}
