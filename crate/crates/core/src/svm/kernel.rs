//! Kernel functions for the SVM: linear dot product and Gaussian RBF.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum KernelSpec {
    Linear,
    Rbf { gamma: f64 },
}

impl KernelSpec {
    pub fn validate(&self) -> Result<()> {
        if let KernelSpec::Rbf { gamma } = self {
            if !(*gamma > 0.0) {
                return Err(Error::InvalidConfig(format!(
                    "rbf gamma must be positive, got {gamma}"
                )));
            }
        }
        Ok(())
    }

    pub fn name(&self) -> &'static str {
        match self {
            KernelSpec::Linear => "linear",
            KernelSpec::Rbf { .. } => "rbf",
        }
    }
}

/// Evaluate the kernel on two equal-length vectors.
pub fn kernel_eval(a: &[f64], b: &[f64], spec: KernelSpec) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::Dimension(format!(
            "kernel_eval: {} vs {}",
            a.len(),
            b.len()
        )));
    }
    Ok(eval_unchecked(a, b, spec))
}

pub(crate) fn eval_unchecked(a: &[f64], b: &[f64], spec: KernelSpec) -> f64 {
    match spec {
        KernelSpec::Linear => dot(a, b),
        KernelSpec::Rbf { gamma } => {
            let dist2: f64 = a
                .iter()
                .zip(b)
                .map(|(x, y)| {
                    let d = x - y;
                    d * d
                })
                .sum();
            (-gamma * dist2).exp()
        }
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn linear_dot_product() {
        assert_eq!(
            kernel_eval(&[1.0, 2.0], &[3.0, 4.0], KernelSpec::Linear).unwrap(),
            11.0
        );
    }

    #[test]
    fn rbf_at_identical_points_is_one() {
        let k = kernel_eval(&[0.3, -2.0], &[0.3, -2.0], KernelSpec::Rbf { gamma: 3.0 }).unwrap();
        assert_eq!(k, 1.0);
    }

    #[test]
    fn rbf_known_value() {
        // gamma = 0.5, squared distance 2 -> e^-1
        let k = kernel_eval(&[0.0, 0.0], &[1.0, 1.0], KernelSpec::Rbf { gamma: 0.5 }).unwrap();
        assert!((k - (-1.0f64).exp()).abs() < 1e-12);
        assert!((k - 0.3679).abs() < 1e-4);
    }

    #[test]
    fn length_mismatch_is_an_error() {
        assert!(kernel_eval(&[1.0], &[1.0, 2.0], KernelSpec::Linear).is_err());
    }

    #[test]
    fn symmetry_and_rbf_range() {
        let a = [0.5, -1.0, 2.0];
        let b = [1.5, 0.0, -0.5];
        for spec in [KernelSpec::Linear, KernelSpec::Rbf { gamma: 0.7 }] {
            let kab = kernel_eval(&a, &b, spec).unwrap();
            let kba = kernel_eval(&b, &a, spec).unwrap();
            assert_eq!(kab, kba);
        }
        let k = kernel_eval(&a, &b, KernelSpec::Rbf { gamma: 0.7 }).unwrap();
        assert!(k > 0.0 && k <= 1.0);
    }
}
