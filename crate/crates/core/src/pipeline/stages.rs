//! Stage implementations. Every stage reads only files produced by earlier
//! stages (or the external corpus/embedding inputs) and writes its own
//! files under the workdir, so completed stages can be skipped and
//! per-target work items can run concurrently.

use std::collections::{BTreeMap, BTreeSet};
use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use super::artifacts::{
    read_file, read_matrix_csv, read_records_jsonl, write_file, write_matrix_csv,
    write_records_jsonl, LabeledMatrix, Paths,
};
use super::config::{FeatureSpace, RunConfig};
use crate::analysis::{
    confusion, make_report, metrics, prune_experiment, rank_dimensions, DataSplits, Metrics,
};
use crate::corpus::{
    assemble_dataset, dedup, ingest, parse_corpus_jsonl, MethodRecord, Polarity, Split,
};
use crate::embeddings::import_embeddings;
use crate::error::{Error, Result};
use crate::features::{
    build_vocab, encode, encode_sequence, extract_counts, fit_scaler, schema, RawCounts, Scheme,
    SequenceVocab, VocabMode, TOTAL_FEATURES,
};
use crate::projection::{scatter_svg, tsne_project};
use crate::svm::{grid_search, predict_label, GridCell, KernelSpec, SvmConfig, SvmModel};

pub struct StageContext<'a> {
    pub config: &'a RunConfig,
    pub paths: Paths,
}

impl StageContext<'_> {
    fn spaces(&self) -> Result<Vec<FeatureSpace>> {
        self.config.feature_spaces()
    }

    fn base_svm_config(&self) -> SvmConfig {
        SvmConfig {
            c: 1.0,
            kernel: KernelSpec::Linear,
            kkt_tolerance: 1e-3,
            max_passes: 100,
            seed: self.config.seed,
        }
    }

    fn work_items(&self) -> Result<Vec<(String, FeatureSpace)>> {
        let spaces = self.spaces()?;
        let mut items = Vec::new();
        for target in &self.config.targets {
            for space in &spaces {
                items.push((target.clone(), *space));
            }
        }
        Ok(items)
    }
}

/// Map work over items on scoped threads, preserving item order in the
/// results. Items are pure over read-only inputs; each writes only its own
/// files.
fn parallel_map<T, R, F>(items: &[T], f: F) -> Result<Vec<R>>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> Result<R> + Sync,
{
    let threads = std::thread::available_parallelism()
        .map(|n| n.get())
        .unwrap_or(1)
        .min(items.len())
        .max(1);
    if threads == 1 {
        return items.iter().map(f).collect();
    }
    let mut indexed: Vec<(usize, Result<R>)> = std::thread::scope(|scope| {
        let f = &f;
        let handles: Vec<_> = (0..threads)
            .map(|t| {
                scope.spawn(move || {
                    let mut out = Vec::new();
                    let mut i = t;
                    while i < items.len() {
                        out.push((i, f(&items[i])));
                        i += threads;
                    }
                    out
                })
            })
            .collect();
        handles
            .into_iter()
            .flat_map(|h| h.join().expect("stage worker panicked"))
            .collect()
    });
    indexed.sort_by_key(|(i, _)| *i);
    indexed.into_iter().map(|(_, r)| r).collect()
}

// ---------------------------------------------------------------------
// ingest / dedup / split
// ---------------------------------------------------------------------

pub fn run_ingest(ctx: &StageContext) -> Result<Vec<PathBuf>> {
    let text = read_file(&ctx.config.corpus_path)?;
    let raws = parse_corpus_jsonl(&text)?;
    let records = ingest(raws, ctx.config.seed, ctx.config.split_fractions)?;
    let out = ctx.paths.records();
    write_records_jsonl(&out, &records)?;
    Ok(vec![out])
}

pub fn run_dedup(ctx: &StageContext) -> Result<Vec<PathBuf>> {
    let records = read_records_jsonl(&ctx.paths.records())?;
    let (kept, report) = dedup(&records, ctx.config.dedup);
    let kept_path = ctx.paths.kept();
    let report_path = ctx.paths.dedup_report();
    write_records_jsonl(&kept_path, &kept)?;
    write_file(&report_path, &report.to_csv())?;
    Ok(vec![kept_path, report_path])
}

pub fn run_split(ctx: &StageContext) -> Result<Vec<PathBuf>> {
    let kept = read_records_jsonl(&ctx.paths.kept())?;
    let mut outputs = Vec::new();
    for target in &ctx.config.targets {
        let dataset = assemble_dataset(
            &kept,
            target,
            ctx.config.n_train,
            ctx.config.seed,
            ctx.config.small_corpus,
        )?;
        let path = ctx.paths.dataset_manifest(target);
        write_file(&path, &dataset.to_manifest_jsonl())?;
        outputs.push(path);
    }
    Ok(outputs)
}

// ---------------------------------------------------------------------
// featurize / embed
// ---------------------------------------------------------------------

#[derive(Debug, Serialize, Deserialize)]
struct ManifestRow {
    id: String,
    label: Polarity,
    split: Split,
}

fn read_manifest(ctx: &StageContext, target: &str) -> Result<Vec<ManifestRow>> {
    let path = ctx.paths.dataset_manifest(target);
    let text = read_file(&path)?;
    let mut rows = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        rows.push(
            serde_json::from_str(line)
                .map_err(|e| Error::Data(format!("{} line {}: {e}", path.display(), lineno + 1)))?,
        );
    }
    Ok(rows)
}

#[derive(Serialize)]
struct SequenceRow<'a> {
    id: &'a str,
    label: &'a str,
    indices: Vec<u32>,
}

fn write_sequences(
    path: &std::path::Path,
    records: &[MethodRecord],
    vocab: &SequenceVocab,
) -> Result<()> {
    let mut out = String::new();
    for r in records {
        let row = SequenceRow {
            id: &r.id,
            label: &r.label,
            indices: encode_sequence(r, vocab)?,
        };
        out.push_str(&serde_json::to_string(&row).expect("sequence row serializes"));
        out.push('\n');
    }
    write_file(path, &out)
}

pub fn run_featurize(ctx: &StageContext) -> Result<Vec<PathBuf>> {
    let kept = read_records_jsonl(&ctx.paths.kept())?;
    let schema = schema();
    let mut outputs = Vec::new();

    let schema_path = ctx.paths.schema();
    write_file(&schema_path, &schema.to_json())?;
    outputs.push(schema_path);

    // sequence encodings: vocabularies from train+validation, encodings
    // for the whole kept corpus
    let tv: Vec<&MethodRecord> = kept.iter().filter(|r| r.split != Split::Test).collect();
    for mode in [VocabMode::Char, VocabMode::Token] {
        let vocab = build_vocab(&tv, mode)?;
        let vocab_path = ctx.paths.vocab(mode.as_str());
        write_file(
            &vocab_path,
            &serde_json::to_string_pretty(&vocab).expect("vocab serializes"),
        )?;
        let seq_path = ctx.paths.sequences(mode.as_str());
        write_sequences(&seq_path, &kept, &vocab)?;
        outputs.push(vocab_path);
        outputs.push(seq_path);
    }

    // raw counts once per record
    let mut counts: BTreeMap<&str, RawCounts> = BTreeMap::new();
    for r in &kept {
        counts.insert(&r.id, extract_counts(r, &schema)?);
    }

    let spaces = ctx.spaces()?;
    let handcrafted: Vec<Scheme> = spaces
        .iter()
        .filter_map(|s| match s {
            FeatureSpace::Handcrafted(scheme) => Some(*scheme),
            FeatureSpace::Embedding => None,
        })
        .collect();
    let all_columns: Vec<usize> = (0..TOTAL_FEATURES).collect();
    let names = schema.names();

    for target in &ctx.config.targets {
        let manifest = read_manifest(ctx, target)?;
        let train_counts: Vec<RawCounts> = manifest
            .iter()
            .filter(|row| row.split == Split::Train)
            .map(|row| {
                counts
                    .get(row.id.as_str())
                    .cloned()
                    .ok_or_else(|| Error::Data(format!("manifest id `{}` not in corpus", row.id)))
            })
            .collect::<Result<_>>()?;
        if train_counts.is_empty() {
            return Err(Error::Data(format!("target `{target}`: empty train split")));
        }
        let scaler = fit_scaler(&train_counts, &all_columns)?;

        for &scheme in &handcrafted {
            let space = FeatureSpace::Handcrafted(scheme);
            for split in Split::ALL {
                let mut matrix = LabeledMatrix::default();
                for row in manifest.iter().filter(|r| r.split == split) {
                    let c = counts
                        .get(row.id.as_str())
                        .ok_or_else(|| Error::Data(format!("id `{}` not in corpus", row.id)))?;
                    let vector = encode(c, scheme, Some(&scaler))?;
                    matrix.push(row.id.clone(), row.label.y(), vector.values);
                }
                let path = ctx.paths.feature_matrix(target, &space.slug(), split);
                write_matrix_csv(&path, &names[..scheme.dims()], &matrix)?;
                outputs.push(path);
            }
        }
    }
    Ok(outputs)
}

pub fn run_embed(ctx: &StageContext) -> Result<Vec<PathBuf>> {
    let Some(source) = &ctx.config.embedding_path else {
        return Ok(Vec::new());
    };
    let kept = read_records_jsonl(&ctx.paths.kept())?;
    let required: BTreeSet<String> = kept.iter().map(|r| r.id.clone()).collect();
    let table = import_embeddings(source, ctx.config.embedding_dim, &required)?;

    let mut out = String::from("id");
    for d in 0..table.dim {
        out.push_str(&format!(",v{d}"));
    }
    out.push('\n');
    for id in table.ids() {
        out.push_str(id);
        for v in table.get(id).expect("listed id") {
            out.push(',');
            out.push_str(&v.to_string());
        }
        out.push('\n');
    }
    let path = ctx.paths.embedding_table();
    write_file(&path, &out)?;
    Ok(vec![path])
}

// ---------------------------------------------------------------------
// train / evaluate
// ---------------------------------------------------------------------

/// Load the dense matrix for one (target, space, split).
fn load_matrix(
    ctx: &StageContext,
    target: &str,
    space: FeatureSpace,
    split: Split,
) -> Result<LabeledMatrix> {
    match space {
        FeatureSpace::Handcrafted(_) => {
            read_matrix_csv(&ctx.paths.feature_matrix(target, &space.slug(), split))
        }
        FeatureSpace::Embedding => {
            let table = read_matrix_csv(&ctx.paths.embedding_table())?;
            let by_id: BTreeMap<&str, usize> = table
                .ids
                .iter()
                .enumerate()
                .map(|(i, id)| (id.as_str(), i))
                .collect();
            let mut matrix = LabeledMatrix::default();
            for row in read_manifest(ctx, target)?
                .iter()
                .filter(|r| r.split == split)
            {
                let &i = by_id.get(row.id.as_str()).ok_or_else(|| {
                    Error::Data(format!("embedding table misses id `{}`", row.id))
                })?;
                matrix.push(row.id.clone(), row.label.y(), table.rows[i].clone());
            }
            Ok(matrix)
        }
    }
}

#[derive(Debug, Serialize, Deserialize)]
struct ChosenCell {
    c: f64,
    gamma: Option<f64>,
    val_accuracy: f64,
    val_f1: f64,
}

impl ChosenCell {
    fn from_grid(cell: &GridCell) -> Self {
        ChosenCell {
            c: cell.c,
            gamma: cell.gamma,
            val_accuracy: cell.val_accuracy,
            val_f1: cell.val_f1,
        }
    }
}

pub fn run_train(ctx: &StageContext) -> Result<Vec<PathBuf>> {
    let items = ctx.work_items()?;
    let kernel = ctx.config.kernel_kind()?;
    let base = ctx.base_svm_config();
    let outputs = parallel_map(&items, |(target, space)| {
        let train = load_matrix(ctx, target, *space, Split::Train)?;
        let validation = load_matrix(ctx, target, *space, Split::Validation)?;
        let result = grid_search(
            (&train.rows, &train.labels),
            (&validation.rows, &validation.labels),
            &ctx.config.grid,
            kernel,
            &base,
        )
        .map_err(|e| Error::Data(format!("train {target}/{}: {e}", space.name())))?;

        let slug = space.slug();
        let model_path = ctx.paths.model(target, &slug);
        write_file(&model_path, &result.best_model.to_json())?;
        let grid_path = ctx.paths.grid_table(target, &slug);
        write_file(&grid_path, &result.table_csv())?;
        let chosen = result
            .table
            .iter()
            .find(|cell| {
                cell.c == result.best_cfg.c
                    && cell.gamma
                        == match result.best_cfg.kernel {
                            KernelSpec::Linear => None,
                            KernelSpec::Rbf { gamma } => Some(gamma),
                        }
            })
            .expect("best cell is in the table");
        let cell_path = ctx.paths.best_cell(target, &slug);
        write_file(
            &cell_path,
            &serde_json::to_string_pretty(&ChosenCell::from_grid(chosen)).expect("cell serializes"),
        )?;
        Ok(vec![model_path, grid_path, cell_path])
    })?;
    Ok(outputs.into_iter().flatten().collect())
}

pub fn run_evaluate(ctx: &StageContext) -> Result<Vec<PathBuf>> {
    let items = ctx.work_items()?;
    let rows = parallel_map(&items, |(target, space)| {
        let slug = space.slug();
        let model = SvmModel::from_json(&read_file(&ctx.paths.model(target, &slug))?)?;
        let cell: ChosenCell =
            serde_json::from_str(&read_file(&ctx.paths.best_cell(target, &slug))?)
                .map_err(|e| Error::Data(format!("cell json: {e}")))?;
        let test = load_matrix(ctx, target, *space, Split::Test)?;
        let preds: Vec<f64> = test
            .rows
            .iter()
            .map(|x| predict_label(&model, x))
            .collect::<Result<_>>()?;
        let m = metrics(&confusion(&preds, &test.labels)?)?;
        Ok((target.clone(), space.name().to_string(), cell, m))
    })?;

    let mut out = String::from("method,scheme,C,gamma,accuracy,precision,recall,f1\n");
    for (target, scheme, cell, m) in rows {
        out.push_str(&format!(
            "{target},{scheme},{},{},{},{},{},{}\n",
            cell.c,
            cell.gamma.map(|g| g.to_string()).unwrap_or_default(),
            m.accuracy,
            m.precision,
            m.recall,
            m.f1
        ));
    }
    let path = ctx.paths.metrics();
    write_file(&path, &out)?;
    Ok(vec![path])
}

// ---------------------------------------------------------------------
// ig / prune / tsne / report
// ---------------------------------------------------------------------

pub fn run_ig(ctx: &StageContext) -> Result<Vec<PathBuf>> {
    let items = ctx.work_items()?;
    let schema = schema();
    let names = schema.names();
    let outputs = parallel_map(&items, |(target, space)| {
        let train = load_matrix(ctx, target, *space, Split::Train)?;
        let ranking = rank_dimensions(&train.rows, &train.labels)?;
        let named: Option<&[&str]> = match space {
            FeatureSpace::Handcrafted(scheme) => Some(&names[..scheme.dims()]),
            FeatureSpace::Embedding => None,
        };
        let path = ctx.paths.ig(target, &space.slug());
        write_file(&path, &ranking.to_csv(named))?;
        Ok(path)
    })?;
    Ok(outputs)
}

pub fn run_prune(ctx: &StageContext) -> Result<Vec<PathBuf>> {
    let pairs = ctx.work_items()?;
    let mut items = Vec::new();
    for (target, space) in pairs {
        for &fraction in &ctx.config.prune_fractions {
            items.push((target.clone(), space, fraction));
        }
    }
    let kernel = ctx.config.kernel_kind()?;
    let base = ctx.base_svm_config();
    let rows = parallel_map(&items, |(target, space, fraction)| {
        let train = load_matrix(ctx, target, *space, Split::Train)?;
        let validation = load_matrix(ctx, target, *space, Split::Validation)?;
        let test = load_matrix(ctx, target, *space, Split::Test)?;
        let data = DataSplits {
            train: (&train.rows, &train.labels),
            validation: (&validation.rows, &validation.labels),
            test: (&test.rows, &test.labels),
        };
        let result = prune_experiment(&data, *fraction, &ctx.config.grid, kernel, &base)
            .map_err(|e| Error::Data(format!("prune {target}/{}: {e}", space.name())))?;
        Ok((target.clone(), space.name().to_string(), result))
    })?;

    let mut out = String::from(
        "method,scheme,fraction,kept_dims,full_precision,full_recall,full_f1,\
         pruned_precision,pruned_recall,pruned_f1\n",
    );
    for (target, scheme, r) in rows {
        out.push_str(&format!(
            "{target},{scheme},{},{},{},{},{},{},{},{}\n",
            r.fraction,
            r.kept_dims.len(),
            r.metrics_full.precision,
            r.metrics_full.recall,
            r.metrics_full.f1,
            r.metrics_pruned.precision,
            r.metrics_pruned.recall,
            r.metrics_pruned.f1
        ));
    }
    let path = ctx.paths.prune();
    write_file(&path, &out)?;
    Ok(vec![path])
}

pub fn run_tsne(ctx: &StageContext) -> Result<Vec<PathBuf>> {
    let items = ctx.work_items()?;
    let outputs = parallel_map(&items, |(target, space)| {
        let test = load_matrix(ctx, target, *space, Split::Test)?;
        let run = tsne_project(&test.rows, &test.ids, &ctx.config.tsne)
            .map_err(|e| Error::Data(format!("tsne {target}/{}: {e}", space.name())))?;

        let mut csv = String::from("id,label,x,y\n");
        for (point, label) in run.projection.points.iter().zip(&test.labels) {
            csv.push_str(&format!(
                "{},{},{},{}\n",
                point.id,
                if *label > 0.0 { "1" } else { "-1" },
                point.x,
                point.y
            ));
        }
        let csv_path = ctx.paths.tsne_csv(target, &space.slug());
        write_file(&csv_path, &csv)?;

        let with_polarity: Vec<_> = run
            .projection
            .points
            .iter()
            .zip(&test.labels)
            .map(|(p, label)| (p, *label > 0.0))
            .collect();
        let svg_path = ctx.paths.tsne_svg(target, &space.slug());
        write_file(&svg_path, &scatter_svg(&with_polarity))?;
        Ok(vec![csv_path, svg_path])
    })?;
    Ok(outputs.into_iter().flatten().collect())
}

pub fn run_report(ctx: &StageContext) -> Result<Vec<PathBuf>> {
    let text = read_file(&ctx.paths.metrics())?;
    let mut results: Vec<(String, String, Metrics)> = Vec::new();
    for line in text.lines().skip(1) {
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 8 {
            return Err(Error::Data(format!(
                "metrics row has {} fields",
                fields.len()
            )));
        }
        let parse = |s: &str| -> Result<f64> {
            s.parse()
                .map_err(|e| Error::Data(format!("metrics value `{s}`: {e}")))
        };
        results.push((
            fields[0].to_string(),
            fields[1].to_string(),
            Metrics {
                accuracy: parse(fields[4])?,
                precision: parse(fields[5])?,
                recall: parse(fields[6])?,
                f1: parse(fields[7])?,
            },
        ));
    }
    let table = make_report(&results)?;
    let methods_path = ctx.paths.report_methods();
    let averages_path = ctx.paths.report_averages();
    let md_path = ctx.paths.report_markdown();
    write_file(&methods_path, &table.methods_csv())?;
    write_file(&averages_path, &table.averages_csv())?;
    write_file(&md_path, &table.to_markdown())?;
    Ok(vec![methods_path, averages_path, md_path])
}
