//! Experiment configuration: one JSON file drives a whole run, with
//! dotted-path overrides for quick variations.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::corpus::{DedupConfig, SplitFractions};
use crate::error::{Error, Result};
use crate::features::Scheme;
use crate::projection::TsneConfig;
use crate::svm::{GridSpec, KernelKind};

/// Feature space a classifier trains on: one of the handcrafted encoding
/// schemes or the imported embedding table.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FeatureSpace {
    Handcrafted(Scheme),
    Embedding,
}

/// Report/config label for the embedding feature space.
pub const EMBEDDING_SCHEME_NAME: &str = "code2vec";

impl FeatureSpace {
    pub fn parse(name: &str) -> Result<FeatureSpace> {
        if name == EMBEDDING_SCHEME_NAME {
            return Ok(FeatureSpace::Embedding);
        }
        Scheme::parse(name)
            .map(FeatureSpace::Handcrafted)
            .ok_or_else(|| Error::InvalidConfig(format!("unknown scheme `{name}`")))
    }

    pub fn name(&self) -> &'static str {
        match self {
            FeatureSpace::Handcrafted(s) => s.name(),
            FeatureSpace::Embedding => EMBEDDING_SCHEME_NAME,
        }
    }

    /// Filesystem-safe slug.
    pub fn slug(&self) -> String {
        self.name()
            .chars()
            .map(|c| {
                if c.is_ascii_alphanumeric() {
                    c.to_ascii_lowercase()
                } else {
                    '-'
                }
            })
            .collect::<String>()
            .split('-')
            .filter(|s| !s.is_empty())
            .collect::<Vec<_>>()
            .join("-")
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub corpus_path: PathBuf,
    pub workdir: PathBuf,
    pub targets: Vec<String>,
    pub n_train: usize,
    pub seed: u64,
    #[serde(default)]
    pub dedup: DedupConfig,
    #[serde(default = "default_schemes")]
    pub schemes: Vec<String>,
    #[serde(default)]
    pub embedding_path: Option<PathBuf>,
    #[serde(default = "default_embedding_dim")]
    pub embedding_dim: usize,
    #[serde(default)]
    pub grid: GridSpec,
    #[serde(default = "default_kernel")]
    pub kernel: String,
    #[serde(default = "default_prune_fractions")]
    pub prune_fractions: Vec<f64>,
    #[serde(default)]
    pub tsne: TsneConfig,
    #[serde(default)]
    pub split_fractions: SplitFractions,
    /// Permit datasets smaller than `n_train` by shrinking to what both
    /// classes can supply.
    #[serde(default)]
    pub small_corpus: bool,
}

fn default_schemes() -> Vec<String> {
    Scheme::ALL.iter().map(|s| s.name().to_string()).collect()
}

fn default_embedding_dim() -> usize {
    384
}

fn default_kernel() -> String {
    "linear".into()
}

fn default_prune_fractions() -> Vec<f64> {
    vec![0.25]
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<RunConfig> {
        serde_json::from_str(text).map_err(|e| Error::InvalidConfig(format!("config: {e}")))
    }

    pub fn load(path: &Path, overrides: &[(String, String)]) -> Result<RunConfig> {
        let text =
            std::fs::read_to_string(path).map_err(|e| Error::io(path.display().to_string(), e))?;
        if overrides.is_empty() {
            return Self::from_json(&text);
        }
        let mut value: serde_json::Value = serde_json::from_str(&text)
            .map_err(|e| Error::InvalidConfig(format!("config: {e}")))?;
        for (key, raw) in overrides {
            apply_override(&mut value, key, raw)?;
        }
        serde_json::from_value(value).map_err(|e| Error::InvalidConfig(format!("config: {e}")))
    }

    pub fn kernel_kind(&self) -> Result<KernelKind> {
        KernelKind::parse(&self.kernel)
    }

    pub fn feature_spaces(&self) -> Result<Vec<FeatureSpace>> {
        self.schemes
            .iter()
            .map(|s| FeatureSpace::parse(s))
            .collect()
    }

    pub fn validate(&self) -> Result<()> {
        if self.targets.is_empty() {
            return Err(Error::InvalidConfig("targets must be non-empty".into()));
        }
        if self.n_train == 0 {
            return Err(Error::InvalidConfig("n_train must be at least 1".into()));
        }
        self.dedup.validate()?;
        self.split_fractions.validate()?;
        let spaces = self.feature_spaces()?;
        if spaces.is_empty() {
            return Err(Error::InvalidConfig("schemes must be non-empty".into()));
        }
        if spaces.contains(&FeatureSpace::Embedding) && self.embedding_path.is_none() {
            return Err(Error::InvalidConfig(format!(
                "scheme `{EMBEDDING_SCHEME_NAME}` requires embedding_path"
            )));
        }
        if self.embedding_path.is_some() && self.embedding_dim == 0 {
            return Err(Error::InvalidConfig(
                "embedding_dim must be positive".into(),
            ));
        }
        let kernel = self.kernel_kind()?;
        self.grid.validate(kernel)?;
        for f in &self.prune_fractions {
            if !(*f > 0.0 && *f <= 1.0) {
                return Err(Error::InvalidConfig(format!(
                    "prune fraction {f} outside (0, 1]"
                )));
            }
        }
        if self.tsne.perplexity <= 1.0 {
            return Err(Error::InvalidConfig("tsne.perplexity must exceed 1".into()));
        }
        if self.tsne.iterations == 0 {
            return Err(Error::InvalidConfig(
                "tsne.iterations must be at least 1".into(),
            ));
        }
        Ok(())
    }
}

/// Apply one `--set key=value` override onto the raw config JSON. Dotted
/// keys descend into objects; values parse as JSON when possible and fall
/// back to strings.
fn apply_override(root: &mut serde_json::Value, key: &str, raw: &str) -> Result<()> {
    let parsed: serde_json::Value =
        serde_json::from_str(raw).unwrap_or_else(|_| serde_json::Value::String(raw.to_string()));
    let mut cursor = root;
    let parts: Vec<&str> = key.split('.').collect();
    for (i, part) in parts.iter().enumerate() {
        let object = cursor.as_object_mut().ok_or_else(|| {
            Error::InvalidConfig(format!("--set {key}: `{part}` is not an object"))
        })?;
        if i + 1 == parts.len() {
            object.insert(part.to_string(), parsed);
            return Ok(());
        }
        cursor = object
            .entry(part.to_string())
            .or_insert_with(|| serde_json::Value::Object(Default::default()));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn minimal_json() -> String {
        serde_json::json!({
            "corpus_path": "corpus.jsonl",
            "workdir": "work",
            "targets": ["equals"],
            "n_train": 50,
            "seed": 7,
        })
        .to_string()
    }

    #[test]
    fn minimal_config_gets_defaults() {
        let cfg = RunConfig::from_json(&minimal_json()).unwrap();
        cfg.validate().unwrap();
        assert_eq!(cfg.schemes.len(), 4);
        assert_eq!(cfg.embedding_dim, 384);
        assert_eq!(cfg.kernel, "linear");
        assert_eq!(cfg.prune_fractions, vec![0.25]);
        assert_eq!(cfg.dedup.t0, 0.8);
        assert_eq!(cfg.dedup.t1, 0.7);
    }

    #[test]
    fn embedding_scheme_requires_path() {
        let mut cfg = RunConfig::from_json(&minimal_json()).unwrap();
        cfg.schemes.push("code2vec".into());
        assert!(cfg.validate().is_err());
        cfg.embedding_path = Some("emb.csv".into());
        cfg.validate().unwrap();
    }

    #[test]
    fn unknown_scheme_is_rejected() {
        let mut cfg = RunConfig::from_json(&minimal_json()).unwrap();
        cfg.schemes = vec!["HC(Fancy)".into()];
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn unknown_field_is_rejected() {
        let mut v: serde_json::Value = serde_json::from_str(&minimal_json()).unwrap();
        v["typo_field"] = serde_json::json!(1);
        assert!(RunConfig::from_json(&v.to_string()).is_err());
    }

    #[test]
    fn overrides_descend_dotted_paths() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("exp.json");
        std::fs::write(&path, minimal_json()).unwrap();
        let cfg = RunConfig::load(
            &path,
            &[
                ("n_train".to_string(), "10".to_string()),
                ("dedup.t0".to_string(), "0.9".to_string()),
                ("kernel".to_string(), "rbf".to_string()),
            ],
        )
        .unwrap();
        assert_eq!(cfg.n_train, 10);
        assert_eq!(cfg.dedup.t0, 0.9);
        assert_eq!(cfg.kernel, "rbf");
    }

    #[test]
    fn slugs_are_filesystem_safe() {
        assert_eq!(
            FeatureSpace::Handcrafted(Scheme::HcBinaryCxNorm).slug(),
            "hc-binary-cx-norm"
        );
        assert_eq!(FeatureSpace::Embedding.slug(), "code2vec");
    }
}
