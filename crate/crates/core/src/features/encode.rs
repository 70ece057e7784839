//! Raw counts to feature vectors under the four handcrafted encoding
//! schemes: binary or standardized method features, optionally extended
//! with standardized complexity features.

use serde::{Deserialize, Serialize};

use super::extract::RawCounts;
use super::scaler::ScalerStats;
use super::schema::{COMPLEXITY_FEATURES, METHOD_FEATURES};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Scheme {
    HcBinary,
    HcNorm,
    HcBinaryCxNorm,
    HcNormCxNorm,
}

impl Scheme {
    pub const ALL: [Scheme; 4] = [
        Scheme::HcBinary,
        Scheme::HcNorm,
        Scheme::HcBinaryCxNorm,
        Scheme::HcNormCxNorm,
    ];

    /// Display name used in reports and configuration files.
    pub fn name(&self) -> &'static str {
        match self {
            Scheme::HcBinary => "HC(Binary)",
            Scheme::HcNorm => "HC(Norm)",
            Scheme::HcBinaryCxNorm => "HC(Binary)+CX(Norm)",
            Scheme::HcNormCxNorm => "HC(Norm)+CX(Norm)",
        }
    }

    pub fn parse(name: &str) -> Option<Scheme> {
        Scheme::ALL.into_iter().find(|s| s.name() == name)
    }

    /// Output width: 33 for method-only schemes, 47 with complexity.
    pub fn dims(&self) -> usize {
        match self {
            Scheme::HcBinary | Scheme::HcNorm => METHOD_FEATURES,
            _ => METHOD_FEATURES + COMPLEXITY_FEATURES,
        }
    }

    fn standardizes_method_features(&self) -> bool {
        matches!(self, Scheme::HcNorm | Scheme::HcNormCxNorm)
    }

    fn includes_complexity(&self) -> bool {
        matches!(self, Scheme::HcBinaryCxNorm | Scheme::HcNormCxNorm)
    }

    /// Columns the scaler must cover for this scheme.
    pub fn standardized_columns(&self) -> Vec<usize> {
        let mut cols = Vec::new();
        if self.standardizes_method_features() {
            cols.extend(0..METHOD_FEATURES);
        }
        if self.includes_complexity() {
            cols.extend(METHOD_FEATURES..METHOD_FEATURES + COMPLEXITY_FEATURES);
        }
        cols
    }
}

impl std::fmt::Display for Scheme {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// One encoded example.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureVector {
    pub scheme: Scheme,
    pub values: Vec<f64>,
}

/// Encode raw counts under `scheme`. A scaler fit on training rows is
/// required whenever the scheme standardizes any column.
pub fn encode(
    counts: &RawCounts,
    scheme: Scheme,
    scaler: Option<&ScalerStats>,
) -> Result<FeatureVector> {
    if counts.counts.len() < scheme.dims() {
        return Err(Error::Dimension(format!(
            "encode: {} raw counts, scheme {} needs {}",
            counts.counts.len(),
            scheme.name(),
            scheme.dims()
        )));
    }
    let needed = scheme.standardized_columns();
    let scaler = if needed.is_empty() {
        None
    } else {
        let s = scaler.ok_or_else(|| {
            Error::InvalidConfig(format!("scheme {} requires a fitted scaler", scheme.name()))
        })?;
        if !s.covers(&needed) {
            return Err(Error::Dimension(format!(
                "scaler does not cover the columns scheme {} standardizes",
                scheme.name()
            )));
        }
        Some(s)
    };

    let mut values = Vec::with_capacity(scheme.dims());
    for col in 0..METHOD_FEATURES {
        let raw = counts.counts[col] as f64;
        if scheme.standardizes_method_features() {
            values.push(scaler.expect("checked above").standardize(col, raw)?);
        } else {
            values.push(if raw > 0.0 { 1.0 } else { 0.0 });
        }
    }
    if scheme.includes_complexity() {
        for col in METHOD_FEATURES..METHOD_FEATURES + COMPLEXITY_FEATURES {
            let raw = counts.counts[col] as f64;
            values.push(scaler.expect("checked above").standardize(col, raw)?);
        }
    }
    Ok(FeatureVector { scheme, values })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::features::scaler::fit_scaler;
    use crate::features::schema::TOTAL_FEATURES;

    fn counts(first: u32) -> RawCounts {
        let mut c = vec![0u32; TOTAL_FEATURES];
        c[0] = first;
        c[33] = first + 1;
        RawCounts { counts: c }
    }

    #[test]
    fn binary_thresholding() {
        let v = encode(&counts(5), Scheme::HcBinary, None).unwrap();
        assert_eq!(v.values.len(), 33);
        assert_eq!(v.values[0], 1.0);
        assert_eq!(v.values[1], 0.0);
        assert!(v.values.iter().all(|x| *x == 0.0 || *x == 1.0));
    }

    #[test]
    fn binary_is_monotone_in_counts() {
        let lo = encode(&counts(0), Scheme::HcBinary, None).unwrap();
        let hi = encode(&counts(9), Scheme::HcBinary, None).unwrap();
        assert!(lo.values[0] <= hi.values[0]);
    }

    #[test]
    fn norm_standardizes_with_train_stats() {
        let rows = vec![counts(1), counts(2), counts(3)];
        let scaler = fit_scaler(&rows, &(0..TOTAL_FEATURES).collect::<Vec<_>>()).unwrap();
        let v = encode(&counts(3), Scheme::HcNorm, Some(&scaler)).unwrap();
        assert!((v.values[0] - 1.2247).abs() < 1e-4);
        // zero-variance columns encode to 0
        assert_eq!(v.values[5], 0.0);
    }

    #[test]
    fn combined_scheme_appends_standardized_complexity() {
        let rows = vec![counts(1), counts(2), counts(3)];
        let scaler = fit_scaler(&rows, &(0..TOTAL_FEATURES).collect::<Vec<_>>()).unwrap();
        let v = encode(&counts(2), Scheme::HcBinaryCxNorm, Some(&scaler)).unwrap();
        assert_eq!(v.values.len(), 47);
        // first 33 stay binary
        assert!(v.values[..33].iter().all(|x| *x == 0.0 || *x == 1.0));
        // complexity column 33 (raw 3, mean 3, std sqrt(2/3)): standardized 0
        assert!((v.values[33] - 0.0).abs() < 1e-12);
    }

    #[test]
    fn missing_scaler_is_an_error() {
        assert!(encode(&counts(1), Scheme::HcNorm, None).is_err());
        assert!(encode(&counts(1), Scheme::HcBinary, None).is_ok());
    }

    #[test]
    fn scaler_column_mismatch_is_an_error() {
        let rows = vec![counts(1), counts(2)];
        let scaler = fit_scaler(&rows, &[0, 1, 2]).unwrap();
        assert!(encode(&counts(1), Scheme::HcNorm, Some(&scaler)).is_err());
    }

    #[test]
    fn scheme_names_round_trip() {
        for s in Scheme::ALL {
            assert_eq!(Scheme::parse(s.name()), Some(s));
        }
        assert_eq!(Scheme::parse("code2vec"), None);
    }
}
