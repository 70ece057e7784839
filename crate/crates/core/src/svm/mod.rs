//! Soft-margin binary SVM from scratch: kernels, the SMO solver, and
//! validation-set grid search.

mod grid;
mod kernel;
mod smo;

pub use grid::{grid_search, GridCell, GridSearchResult, GridSpec, KernelKind};
pub use kernel::{kernel_eval, KernelSpec};
pub use smo::{dual_objective, predict, predict_label, train_smo, SvmConfig, SvmModel};
