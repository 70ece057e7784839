//! End-to-end orchestration: seeded, resumable stages over a single
//! experiment configuration.

mod artifacts;
mod config;
mod stages;

pub use artifacts::{read_matrix_csv, LabeledMatrix, Paths};
pub use config::{FeatureSpace, RunConfig, EMBEDDING_SCHEME_NAME};

use std::path::PathBuf;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::fnv1a;
use stages::StageContext;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Stage {
    Ingest,
    Dedup,
    Split,
    Featurize,
    Embed,
    Train,
    Evaluate,
    Ig,
    Prune,
    Tsne,
    Report,
}

impl Stage {
    pub const ALL: [Stage; 11] = [
        Stage::Ingest,
        Stage::Dedup,
        Stage::Split,
        Stage::Featurize,
        Stage::Embed,
        Stage::Train,
        Stage::Evaluate,
        Stage::Ig,
        Stage::Prune,
        Stage::Tsne,
        Stage::Report,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            Stage::Ingest => "ingest",
            Stage::Dedup => "dedup",
            Stage::Split => "split",
            Stage::Featurize => "featurize",
            Stage::Embed => "embed",
            Stage::Train => "train",
            Stage::Evaluate => "evaluate",
            Stage::Ig => "ig",
            Stage::Prune => "prune",
            Stage::Tsne => "tsne",
            Stage::Report => "report",
        }
    }

    pub fn parse(s: &str) -> Result<Stage> {
        Stage::ALL
            .into_iter()
            .find(|stage| stage.as_str() == s)
            .ok_or_else(|| Error::InvalidConfig(format!("unknown stage `{s}`")))
    }
}

impl std::fmt::Display for Stage {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.pad(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StageStatus {
    Ran,
    /// Inputs unchanged and outputs present, or the stage does not apply
    /// (embed without an embedding path).
    Skipped,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct StageOutcome {
    pub stage: Stage,
    pub status: StageStatus,
    /// Output files, relative to the workdir.
    pub outputs: Vec<String>,
    pub wall_ms: u64,
}

/// What a run did: one outcome per requested stage, every artifact listed.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExitReport {
    pub seed: u64,
    pub outcomes: Vec<StageOutcome>,
}

impl ExitReport {
    pub fn outputs(&self) -> impl Iterator<Item = &str> {
        self.outcomes
            .iter()
            .flat_map(|o| o.outputs.iter().map(|s| s.as_str()))
    }

    pub fn all_skipped(&self) -> bool {
        self.outcomes
            .iter()
            .all(|o| o.status == StageStatus::Skipped)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

#[derive(Debug, Serialize, Deserialize)]
struct StageManifest {
    fingerprint: String,
    outputs: Vec<String>,
}

/// Fingerprint of everything that can influence stage outputs: the full
/// config plus the external input files.
fn run_fingerprint(config: &RunConfig) -> Result<String> {
    let mut hash = fnv1a(
        serde_json::to_string(config)
            .expect("config serializes")
            .as_bytes(),
    );
    let corpus = std::fs::read(&config.corpus_path)
        .map_err(|e| Error::io(config.corpus_path.display().to_string(), e))?;
    hash ^= fnv1a(&corpus).rotate_left(1);
    if let Some(path) = &config.embedding_path {
        let bytes = std::fs::read(path).map_err(|e| Error::io(path.display().to_string(), e))?;
        hash ^= fnv1a(&bytes).rotate_left(2);
    }
    Ok(format!("{hash:016x}"))
}

fn relative_to(workdir: &std::path::Path, path: &std::path::Path) -> String {
    path.strip_prefix(workdir)
        .unwrap_or(path)
        .to_string_lossy()
        .into_owned()
}

/// The prerequisite (stage, one marker file) that must exist before a
/// stage may run.
fn prerequisite(ctx: &StageContext, stage: Stage) -> Option<(Stage, PathBuf)> {
    let paths = &ctx.paths;
    match stage {
        Stage::Ingest => None,
        Stage::Dedup => Some((Stage::Ingest, paths.records())),
        Stage::Split => Some((Stage::Dedup, paths.kept())),
        Stage::Featurize | Stage::Embed => Some((Stage::Dedup, paths.kept())),
        Stage::Train | Stage::Ig | Stage::Prune | Stage::Tsne => {
            Some((Stage::Featurize, paths.schema()))
        }
        Stage::Evaluate => Some((Stage::Train, paths.metrics_prerequisite_marker(ctx.config))),
        Stage::Report => Some((Stage::Evaluate, paths.metrics())),
    }
}

impl Paths {
    /// First model file the evaluate stage will need.
    fn metrics_prerequisite_marker(&self, config: &RunConfig) -> PathBuf {
        let target = config.targets.first().map(String::as_str).unwrap_or("");
        let slug = config
            .feature_spaces()
            .ok()
            .and_then(|s| s.first().map(|sp| sp.slug()))
            .unwrap_or_default();
        self.model(target, &slug)
    }
}

fn check_secondary_inputs(ctx: &StageContext, stage: Stage) -> Result<()> {
    // stages that read dataset manifests need the split stage too
    let needs_manifests = matches!(
        stage,
        Stage::Featurize | Stage::Train | Stage::Evaluate | Stage::Ig | Stage::Prune | Stage::Tsne
    );
    if needs_manifests {
        for target in &ctx.config.targets {
            if !ctx.paths.dataset_manifest(target).exists() {
                return Err(Error::MissingStage {
                    stage: stage.as_str().into(),
                    needed: Stage::Split.as_str().into(),
                });
            }
        }
    }
    let uses_embeddings = matches!(
        stage,
        Stage::Train | Stage::Evaluate | Stage::Ig | Stage::Prune | Stage::Tsne
    );
    if uses_embeddings
        && ctx
            .config
            .feature_spaces()?
            .contains(&FeatureSpace::Embedding)
        && !ctx.paths.embedding_table().exists()
    {
        return Err(Error::MissingStage {
            stage: stage.as_str().into(),
            needed: Stage::Embed.as_str().into(),
        });
    }
    Ok(())
}

fn execute(ctx: &StageContext, stage: Stage) -> Result<Vec<PathBuf>> {
    match stage {
        Stage::Ingest => stages::run_ingest(ctx),
        Stage::Dedup => stages::run_dedup(ctx),
        Stage::Split => stages::run_split(ctx),
        Stage::Featurize => stages::run_featurize(ctx),
        Stage::Embed => stages::run_embed(ctx),
        Stage::Train => stages::run_train(ctx),
        Stage::Evaluate => stages::run_evaluate(ctx),
        Stage::Ig => stages::run_ig(ctx),
        Stage::Prune => stages::run_prune(ctx),
        Stage::Tsne => stages::run_tsne(ctx),
        Stage::Report => stages::run_report(ctx),
    }
}

/// Run the requested stages in their fixed order. A completed stage whose
/// fingerprint (config + external inputs) is unchanged and whose outputs
/// still exist is skipped, so a rerun of an identical experiment is a
/// no-op.
pub fn run(config: &RunConfig, requested: &[Stage]) -> Result<ExitReport> {
    config.validate()?;
    let paths = Paths::new(&config.workdir, config.seed);
    let ctx = StageContext { config, paths };
    let fingerprint = run_fingerprint(config)?;

    let mut outcomes = Vec::new();
    for stage in Stage::ALL {
        if !requested.contains(&stage) {
            continue;
        }
        let started = Instant::now();

        if stage == Stage::Embed && config.embedding_path.is_none() {
            outcomes.push(StageOutcome {
                stage,
                status: StageStatus::Skipped,
                outputs: Vec::new(),
                wall_ms: 0,
            });
            continue;
        }

        if let Some((needed, marker)) = prerequisite(&ctx, stage) {
            if !marker.exists() {
                return Err(Error::MissingStage {
                    stage: stage.as_str().into(),
                    needed: needed.as_str().into(),
                });
            }
        }
        check_secondary_inputs(&ctx, stage)?;

        // no-op skip for completed stages with unchanged inputs
        let manifest_path = ctx.paths.stage_manifest(stage.as_str());
        if let Ok(text) = std::fs::read_to_string(&manifest_path) {
            if let Ok(manifest) = serde_json::from_str::<StageManifest>(&text) {
                let intact = manifest.fingerprint == fingerprint
                    && manifest
                        .outputs
                        .iter()
                        .all(|rel| config.workdir.join(rel).exists());
                if intact {
                    outcomes.push(StageOutcome {
                        stage,
                        status: StageStatus::Skipped,
                        outputs: manifest.outputs,
                        wall_ms: 0,
                    });
                    continue;
                }
            }
        }

        let outputs = execute(&ctx, stage)?;
        let rel_outputs: Vec<String> = outputs
            .iter()
            .map(|p| relative_to(&config.workdir, p))
            .collect();
        artifacts::write_file(
            &manifest_path,
            &serde_json::to_string_pretty(&StageManifest {
                fingerprint: fingerprint.clone(),
                outputs: rel_outputs.clone(),
            })
            .expect("manifest serializes"),
        )?;
        outcomes.push(StageOutcome {
            stage,
            status: StageStatus::Ran,
            outputs: rel_outputs,
            wall_ms: started.elapsed().as_millis() as u64,
        });
    }

    let report = ExitReport {
        seed: config.seed,
        outcomes,
    };
    artifacts::write_file(&ctx.paths.run_report(), &report.to_json())?;
    Ok(report)
}
