//! `emprobe`: run and validate method-name classification experiments that
//! compare handcrafted source-code features with code embeddings.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use emprobe_core::pipeline::{run, RunConfig, Stage};

#[derive(Parser)]
#[command(
    name = "emprobe",
    version,
    about = "Corpus-to-report pipeline: tokenize and deduplicate Java methods, train per-name \
             SVM classifiers on handcrafted features or imported embeddings, and emit metric \
             tables, information-gain rankings, pruning results, and t-SNE plots."
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Execute pipeline stages for one experiment configuration.
    Run {
        /// Experiment configuration JSON.
        #[arg(long)]
        config: PathBuf,
        /// Comma-separated stage subset (default: all stages in order).
        /// Stages: ingest,dedup,split,featurize,embed,train,evaluate,ig,prune,tsne,report
        #[arg(long, value_delimiter = ',')]
        stages: Option<Vec<String>>,
        /// Override a config value by dotted path, e.g. --set n_train=100
        /// or --set dedup.t0=0.9. Repeatable.
        #[arg(long = "set", value_name = "KEY=VALUE")]
        sets: Vec<String>,
    },
    /// Check a configuration file without running anything.
    Validate {
        #[arg(long)]
        config: PathBuf,
        #[arg(long = "set", value_name = "KEY=VALUE")]
        sets: Vec<String>,
    },
}

/// Workdir override, applied after the config file and --set flags.
const WORKDIR_ENV: &str = "EMPROBE_WORKDIR";

fn parse_sets(sets: &[String]) -> Result<Vec<(String, String)>, String> {
    sets.iter()
        .map(|s| {
            s.split_once('=')
                .map(|(k, v)| (k.to_string(), v.to_string()))
                .ok_or_else(|| format!("--set expects KEY=VALUE, got `{s}`"))
        })
        .collect()
}

fn load_config(path: &Path, sets: &[String]) -> Result<RunConfig, emprobe_core::Error> {
    let overrides = parse_sets(sets).map_err(emprobe_core::Error::InvalidConfig)?;
    let mut config = RunConfig::load(path, &overrides)?;
    if let Ok(workdir) = std::env::var(WORKDIR_ENV) {
        config.workdir = PathBuf::from(workdir);
    }
    Ok(config)
}

fn parse_stages(stages: Option<Vec<String>>) -> Result<Vec<Stage>, emprobe_core::Error> {
    match stages {
        None => Ok(Stage::ALL.to_vec()),
        Some(names) => names.iter().map(|n| Stage::parse(n.trim())).collect(),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run {
            config,
            stages,
            sets,
        } => run_command(&config, stages, &sets),
        Command::Validate { config, sets } => validate_command(&config, &sets),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn run_command(
    config_path: &Path,
    stages: Option<Vec<String>>,
    sets: &[String],
) -> Result<(), emprobe_core::Error> {
    let config = load_config(config_path, sets)?;
    let stages = parse_stages(stages)?;
    let report = run(&config, &stages)?;
    for outcome in &report.outcomes {
        println!(
            "{:<9} {:<8} {:>6} ms  {} file(s)",
            outcome.stage,
            match outcome.status {
                emprobe_core::pipeline::StageStatus::Ran => "ran",
                emprobe_core::pipeline::StageStatus::Skipped => "skipped",
            },
            outcome.wall_ms,
            outcome.outputs.len()
        );
        for path in &outcome.outputs {
            println!("          {path}");
        }
    }
    Ok(())
}

fn validate_command(config_path: &Path, sets: &[String]) -> Result<(), emprobe_core::Error> {
    let config = load_config(config_path, sets)?;
    config.validate()?;
    println!(
        "ok: {} target(s), {} scheme(s), kernel {}, workdir {}",
        config.targets.len(),
        config.schemes.len(),
        config.kernel,
        config.workdir.display()
    );
    Ok(())
}
