//! Acceptance suite: one test per criterion, each printing a PASS/FAIL
//! line (visible with `--nocapture`) and enforcing its runtime budget.
//! Criteria run serialized behind a gate so budgets are not distorted by
//! parallel scheduling.

// `ensure!` negates float comparisons; NaN must fail them
#![allow(clippy::neg_cmp_op_on_partial_ord)]

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};
use std::sync::Mutex;
use std::time::{Duration, Instant};

use emprobe_core::analysis::{
    confusion, f1_score, information_gain, metrics, prune_experiment, rank_dimensions, DataSplits,
};
use emprobe_core::corpus::synthetic::{clone_corpus, two_class_corpus};
use emprobe_core::corpus::{dedup, ingest, DedupConfig, SplitFractions};
use emprobe_core::features::{encode, fit_scaler, RawCounts, Scheme, TOTAL_FEATURES};
use emprobe_core::pipeline::{run, Paths, RunConfig, Stage};
use emprobe_core::projection::{
    calibrate_affinities, kl_and_gradient, pairwise_squared_distances, symmetrize, tsne_project,
    TsneConfig,
};
use emprobe_core::rng::SplitMix64;
use emprobe_core::svm::{
    kernel_eval, predict_label, train_smo, GridSpec, KernelKind, KernelSpec, SvmConfig, SvmModel,
};

static GATE: Mutex<()> = Mutex::new(());

macro_rules! ensure {
    ($cond:expr, $($arg:tt)+) => {
        if !($cond) {
            return Err(format!($($arg)+));
        }
    };
}

fn criterion<F>(number: u32, name: &str, budget: Duration, body: F)
where
    F: FnOnce() -> Result<String, String>,
{
    let _gate = GATE.lock().unwrap_or_else(|poisoned| poisoned.into_inner());
    let start = Instant::now();
    let outcome = body();
    let elapsed = start.elapsed();
    match outcome {
        Ok(detail) if elapsed <= budget => {
            println!(
                "PASS criterion {number:2} ({name}): {detail} [{elapsed:.2?} within {budget:?}]"
            );
        }
        Ok(detail) => {
            println!(
                "FAIL criterion {number:2} ({name}): runtime {elapsed:.2?} exceeds {budget:?} — {detail}"
            );
            panic!("criterion {number} exceeded its runtime budget");
        }
        Err(why) => {
            println!("FAIL criterion {number:2} ({name}): {why}");
            panic!("criterion {number} failed: {why}");
        }
    }
}

// ---------------------------------------------------------------------
// 1. metric oracle
// ---------------------------------------------------------------------

#[test]
fn acceptance_01_metric_oracle() {
    criterion(1, "metric oracle", Duration::from_secs(5), || {
        let mut rng = SplitMix64::new(101);
        for trial in 0..1000 {
            let n = 1 + rng.next_below(200);
            let truth: Vec<f64> = (0..n)
                .map(|_| if rng.next_f64() < 0.5 { 1.0 } else { -1.0 })
                .collect();
            let preds: Vec<f64> = truth
                .iter()
                .map(|t| if rng.next_f64() < 0.8 { *t } else { -t })
                .collect();
            let m = metrics(&confusion(&preds, &truth).unwrap()).unwrap();

            // brute-force recount from the raw lists
            let count = |f: &dyn Fn(f64, f64) -> bool| {
                preds
                    .iter()
                    .zip(&truth)
                    .filter(|(p, t)| f(**p, **t))
                    .count() as f64
            };
            let tp = count(&|p, t| p > 0.0 && t > 0.0);
            let tn = count(&|p, t| p < 0.0 && t < 0.0);
            let fp = count(&|p, t| p > 0.0 && t < 0.0);
            let fng = count(&|p, t| p < 0.0 && t > 0.0);
            let accuracy = (tp + tn) / n as f64;
            let precision = if tp + fp == 0.0 { 0.0 } else { tp / (tp + fp) };
            let recall = if tp + fng == 0.0 {
                0.0
            } else {
                tp / (tp + fng)
            };
            let f1 = if precision + recall == 0.0 {
                0.0
            } else {
                2.0 * precision * recall / (precision + recall)
            };
            ensure!(m.accuracy == accuracy, "trial {trial}: accuracy mismatch");
            ensure!(
                m.precision == precision,
                "trial {trial}: precision mismatch"
            );
            ensure!(m.recall == recall, "trial {trial}: recall mismatch");
            ensure!(m.f1 == f1, "trial {trial}: f1 mismatch");
        }

        // published triple: P=94.62, R=96.85 -> F1=95.72
        let f1 = f1_score(0.9462, 0.9685) * 100.0;
        ensure!(
            (f1 - 95.72).abs() <= 0.01,
            "F1(94.62, 96.85) = {f1}, expected 95.72 within 0.01"
        );
        Ok(format!("1000 trials exact; F1(94.62, 96.85) = {f1:.4}"))
    });
}

// ---------------------------------------------------------------------
// 2. SMO vs projected-gradient QP oracle
// ---------------------------------------------------------------------

/// Exact projection of `v` onto {0 <= a <= c} intersected with {y.a = 0},
/// by bisection on the shift multiplier.
fn project_feasible(v: &[f64], ys: &[f64], c: f64) -> Vec<f64> {
    let clip = |lambda: f64| -> Vec<f64> {
        v.iter()
            .zip(ys)
            .map(|(vi, yi)| (vi - lambda * yi).clamp(0.0, c))
            .collect()
    };
    let balance = |alpha: &[f64]| -> f64 { alpha.iter().zip(ys).map(|(a, y)| a * y).sum() };
    let bound = v.iter().fold(0.0f64, |m, x| m.max(x.abs())) + c + 1.0;
    let (mut lo, mut hi) = (-bound, bound);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if balance(&clip(mid)) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    clip(0.5 * (lo + hi))
}

/// Independent dual solver: projected gradient ascent on the SVM dual.
fn oracle_dual(xs: &[Vec<f64>], ys: &[f64], c: f64, kernel: KernelSpec) -> Vec<f64> {
    let n = xs.len();
    let mut q = vec![vec![0.0; n]; n];
    let mut frobenius = 0.0;
    for i in 0..n {
        for j in 0..n {
            q[i][j] = ys[i] * ys[j] * kernel_eval(&xs[i], &xs[j], kernel).unwrap();
            frobenius += q[i][j] * q[i][j];
        }
    }
    let step = 1.0 / (frobenius.sqrt() + 1.0);
    let mut alpha = vec![0.0; n];
    for iter in 0..200_000 {
        let mut target = vec![0.0; n];
        for i in 0..n {
            let grad_i = 1.0
                - q[i]
                    .iter()
                    .zip(&alpha)
                    .map(|(qij, aj)| qij * aj)
                    .sum::<f64>();
            target[i] = alpha[i] + step * grad_i;
        }
        let next = project_feasible(&target, ys, c);
        let change = next
            .iter()
            .zip(&alpha)
            .fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
        alpha = next;
        if change < 1e-14 && iter > 100 {
            break;
        }
    }
    alpha
}

/// KKT-interval bias for a dual solution.
fn oracle_bias(xs: &[Vec<f64>], ys: &[f64], alphas: &[f64], c: f64, kernel: KernelSpec) -> f64 {
    let n = xs.len();
    let eps = 1e-8 * c;
    let mut lo = f64::NEG_INFINITY;
    let mut hi = f64::INFINITY;
    for i in 0..n {
        let e: f64 = (0..n)
            .map(|j| alphas[j] * ys[j] * kernel_eval(&xs[j], &xs[i], kernel).unwrap())
            .sum();
        if ys[i] > 0.0 {
            if alphas[i] < c - eps {
                lo = lo.max(1.0 - e);
            }
            if alphas[i] > eps {
                hi = hi.min(1.0 - e);
            }
        } else {
            if alphas[i] < c - eps {
                hi = hi.min(-1.0 - e);
            }
            if alphas[i] > eps {
                lo = lo.max(-1.0 - e);
            }
        }
    }
    if lo.is_infinite() && hi.is_infinite() {
        return 0.0;
    }
    if lo.is_infinite() {
        return hi;
    }
    if hi.is_infinite() {
        return lo;
    }
    0.5 * (lo + hi)
}

fn full_alphas(model: &SvmModel, xs: &[Vec<f64>]) -> Vec<f64> {
    xs.iter()
        .map(|x| {
            model
                .support_vectors
                .iter()
                .position(|sv| sv == x)
                .map(|i| model.alphas[i])
                .unwrap_or(0.0)
        })
        .collect()
}

#[test]
fn acceptance_02_smo_oracle() {
    criterion(2, "SMO dual oracle", Duration::from_secs(10), || {
        // analytic 2-point case
        let xs = vec![vec![-1.0], vec![1.0]];
        let ys = vec![-1.0, 1.0];
        let model = train_smo(&xs, &ys, &SvmConfig::new(10.0, KernelSpec::Linear))
            .map_err(|e| e.to_string())?;
        let alphas = full_alphas(&model, &xs);
        ensure!(
            (alphas[0] - 0.5).abs() <= 1e-9 && (alphas[1] - 0.5).abs() <= 1e-9,
            "2-point alphas {alphas:?}, expected (0.5, 0.5)"
        );
        ensure!(model.bias.abs() <= 1e-6, "2-point bias {}", model.bias);

        let mut rng = SplitMix64::new(202);
        let mut max_gap = 0.0f64;
        for fixture in 0..25u32 {
            let n = 2 + (fixture as usize % 5);
            // linear kernels get dim >= n so the dual optimum is unique
            let (kernel, dim) = if fixture % 2 == 0 {
                (KernelSpec::Linear, n)
            } else {
                (
                    KernelSpec::Rbf {
                        gamma: 0.3 + 0.1 * (fixture % 4) as f64,
                    },
                    2,
                )
            };
            let c = if fixture % 3 == 0 { 1.0 } else { 10.0 };
            let xs: Vec<Vec<f64>> = (0..n)
                .map(|_| (0..dim).map(|_| rng.next_gaussian()).collect())
                .collect();
            let mut ys: Vec<f64> = (0..n)
                .map(|i| if i % 2 == 0 { 1.0 } else { -1.0 })
                .collect();
            if rng.next_f64() < 0.3 && n > 3 {
                ys[n - 1] = -ys[n - 1];
            }
            if ys.iter().all(|y| *y == ys[0]) {
                ys[0] = -ys[0];
            }

            let cfg = SvmConfig {
                kkt_tolerance: 1e-6,
                ..SvmConfig::new(c, kernel)
            };
            let model = train_smo(&xs, &ys, &cfg).map_err(|e| format!("fixture {fixture}: {e}"))?;
            let smo_alphas = full_alphas(&model, &xs);
            let oracle_alphas = oracle_dual(&xs, &ys, c, kernel);

            for i in 0..n {
                let gap = (smo_alphas[i] - oracle_alphas[i]).abs();
                max_gap = max_gap.max(gap);
                ensure!(
                    gap <= 1e-3,
                    "fixture {fixture} alpha[{i}]: smo {} vs oracle {} (gap {gap:.2e})",
                    smo_alphas[i],
                    oracle_alphas[i]
                );
            }

            let bias = oracle_bias(&xs, &ys, &oracle_alphas, c, kernel);
            for (i, x) in xs.iter().enumerate() {
                let oracle_margin: f64 = (0..n)
                    .map(|j| oracle_alphas[j] * ys[j] * kernel_eval(&xs[j], x, kernel).unwrap())
                    .sum::<f64>()
                    + bias;
                let oracle_label = if oracle_margin >= 0.0 { 1.0 } else { -1.0 };
                let smo_label = predict_label(&model, x).map_err(|e| e.to_string())?;
                ensure!(
                    smo_label == oracle_label,
                    "fixture {fixture} point {i}: smo label {smo_label}, oracle {oracle_label}"
                );
            }
        }
        Ok(format!(
            "25 fixtures: max |alpha_smo - alpha_qp| = {max_gap:.2e}; predictions identical"
        ))
    });
}

// ---------------------------------------------------------------------
// 3. XOR
// ---------------------------------------------------------------------

#[test]
fn acceptance_03_xor() {
    criterion(3, "XOR separability", Duration::from_secs(1), || {
        let xs = vec![
            vec![0.0, 0.0],
            vec![1.0, 1.0],
            vec![0.0, 1.0],
            vec![1.0, 0.0],
        ];
        let ys = vec![-1.0, -1.0, 1.0, 1.0];
        let accuracy = |model: &SvmModel| -> f64 {
            xs.iter()
                .zip(&ys)
                .filter(|(x, y)| predict_label(model, x).unwrap() == **y)
                .count() as f64
                / 4.0
        };
        let linear = train_smo(&xs, &ys, &SvmConfig::new(10.0, KernelSpec::Linear))
            .map_err(|e| e.to_string())?;
        let linear_acc = accuracy(&linear);
        ensure!(
            linear_acc <= 0.75,
            "linear kernel reached {linear_acc} on XOR"
        );
        let rbf = train_smo(
            &xs,
            &ys,
            &SvmConfig::new(10.0, KernelSpec::Rbf { gamma: 1.0 }),
        )
        .map_err(|e| e.to_string())?;
        let rbf_acc = accuracy(&rbf);
        ensure!(rbf_acc == 1.0, "rbf kernel reached only {rbf_acc} on XOR");
        Ok(format!(
            "linear accuracy {linear_acc} <= 0.75, rbf accuracy {rbf_acc} = 1.0"
        ))
    });
}

// ---------------------------------------------------------------------
// 4. dedup on planted clones
// ---------------------------------------------------------------------

#[test]
fn acceptance_04_dedup_planted_clones() {
    criterion(4, "dedup planted clones", Duration::from_secs(5), || {
        let (raws, planted) = clone_corpus(450, 50, 404);
        ensure!(
            raws.len() == 500,
            "expected 500 methods, built {}",
            raws.len()
        );
        let records = ingest(raws, 404, SplitFractions::default()).map_err(|e| e.to_string())?;
        let cfg = DedupConfig { t0: 0.8, t1: 0.7 };
        let (kept, report) = dedup(&records, cfg);

        let normalize = |a: &str, b: &str| -> (String, String) {
            if a <= b {
                (a.to_string(), b.to_string())
            } else {
                (b.to_string(), a.to_string())
            }
        };
        let detected: BTreeSet<(String, String)> = report
            .removals
            .iter()
            .map(|r| normalize(&r.kept_id, &r.removed_id))
            .collect();
        let expected: BTreeSet<(String, String)> =
            planted.iter().map(|(a, b)| normalize(a, b)).collect();
        let missed: Vec<_> = expected.difference(&detected).collect();
        let spurious: Vec<_> = detected.difference(&expected).collect();
        ensure!(
            missed.is_empty(),
            "recall below 100%: {} planted pairs missed, e.g. {:?}",
            missed.len(),
            missed.first()
        );
        ensure!(
            spurious.is_empty(),
            "precision below 100%: {} spurious pairs, e.g. {:?}",
            spurious.len(),
            spurious.first()
        );

        let (again, second_report) = dedup(&kept, cfg);
        ensure!(
            second_report.removals.is_empty() && again.len() == kept.len(),
            "dedup is not idempotent"
        );
        Ok(format!(
            "50/50 planted pairs found, 0 spurious, {} records kept, idempotent",
            kept.len()
        ))
    });
}

// ---------------------------------------------------------------------
// 5. information-gain stump oracle
// ---------------------------------------------------------------------

fn oracle_stump_ig(column: &[f64], labels: &[f64]) -> (f64, Option<f64>) {
    let entropy = |rows: &[(f64, f64)]| -> f64 {
        if rows.is_empty() {
            return 0.0;
        }
        let pos = rows.iter().filter(|(_, y)| *y > 0.0).count() as f64;
        let n = rows.len() as f64;
        let mut h = 0.0;
        for p in [pos / n, (n - pos) / n] {
            if p > 0.0 {
                h -= p * p.log2();
            }
        }
        h
    };
    let rows: Vec<(f64, f64)> = column.iter().zip(labels).map(|(&v, &y)| (v, y)).collect();
    let base = entropy(&rows);
    let mut values: Vec<f64> = column.to_vec();
    values.sort_by(|a, b| a.partial_cmp(b).unwrap());
    values.dedup();
    let mut best: Option<(f64, f64)> = None;
    for w in values.windows(2) {
        let threshold = (w[0] + w[1]) / 2.0;
        let left: Vec<(f64, f64)> = rows
            .iter()
            .copied()
            .filter(|(v, _)| *v <= threshold)
            .collect();
        let right: Vec<(f64, f64)> = rows
            .iter()
            .copied()
            .filter(|(v, _)| *v > threshold)
            .collect();
        let n = rows.len() as f64;
        let conditional =
            left.len() as f64 / n * entropy(&left) + right.len() as f64 / n * entropy(&right);
        let ig = (base - conditional).max(0.0);
        if best.map(|(b, _)| ig > b).unwrap_or(true) {
            best = Some((ig, threshold));
        }
    }
    match best {
        Some((ig, t)) => (ig, Some(t)),
        None => (0.0, None),
    }
}

#[test]
fn acceptance_05_information_gain_oracle() {
    criterion(5, "information-gain oracle", Duration::from_secs(5), || {
        let mut rng = SplitMix64::new(505);
        let mut checked_continuous = 0;
        for case in 0..100 {
            let n = 4 + rng.next_below(61); // <= 64
            let labels: Vec<f64> = (0..n)
                .map(|_| if rng.next_f64() < 0.5 { 1.0 } else { -1.0 })
                .collect();
            let column: Vec<f64> = match case % 10 {
                0 => vec![rng.next_f64() * 4.0; n], // constant
                1 => (0..n)
                    .map(|_| if rng.next_f64() < 0.5 { 0.0 } else { 1.0 })
                    .collect(),
                // duplicated coarse values exercise the distinct-boundary walk
                _ => (0..n)
                    .map(|_| (rng.next_f64() * 20.0 - 10.0 * rng.next_f64()).round() / 2.0)
                    .collect(),
            };
            let (ig, threshold) = information_gain(&column, &labels).unwrap();
            if case % 10 == 0 {
                ensure!(ig == 0.0, "case {case}: constant column ig {ig} != 0");
                continue;
            }
            let binary = column.iter().all(|v| *v == 0.0 || *v == 1.0);
            let (oracle_ig, oracle_threshold) = oracle_stump_ig(&column, &labels);
            ensure!(
                (ig - oracle_ig).abs() <= 1e-9,
                "case {case}: ig {ig} vs oracle {oracle_ig}"
            );
            if !binary {
                checked_continuous += 1;
                ensure!(
                    threshold == oracle_threshold,
                    "case {case}: threshold {threshold:?} vs oracle {oracle_threshold:?}"
                );
                // order-invariance under x -> x^3
                let cubed: Vec<f64> = column.iter().map(|v| f64::powi(*v, 3)).collect();
                let (ig_cubed, _) = information_gain(&cubed, &labels).unwrap();
                ensure!(
                    (ig - ig_cubed).abs() <= 1e-9,
                    "case {case}: cubing changed ig {ig} -> {ig_cubed}"
                );
            }
        }
        Ok(format!(
            "100 columns match the exhaustive oracle within 1e-9 ({checked_continuous} continuous; constants exactly 0; cube-invariant)"
        ))
    });
}

// ---------------------------------------------------------------------
// 6. end-to-end synthetic pipeline
// ---------------------------------------------------------------------

fn sample_corpus_path() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../sample/corpus-200.jsonl")
}

#[test]
fn acceptance_06_end_to_end_synthetic() {
    criterion(
        6,
        "end-to-end synthetic corpus",
        Duration::from_secs(60),
        || {
            let corpus_path = sample_corpus_path();
            // the bundled corpus is exactly what the generator produces
            let committed = std::fs::read_to_string(&corpus_path)
                .map_err(|e| format!("bundled corpus: {e}"))?;
            let regenerated: String = two_class_corpus(100, 2024)
                .iter()
                .map(|r| serde_json::to_string(r).unwrap() + "\n")
                .collect();
            ensure!(
                committed == regenerated,
                "sample/corpus-200.jsonl diverged from its generator"
            );

            let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
            let config = RunConfig {
                corpus_path,
                workdir: dir.path().join("work"),
                targets: vec!["equals".into()],
                n_train: 50,
                seed: 42,
                dedup: DedupConfig::default(),
                schemes: vec!["HC(Binary)".into()],
                embedding_path: None,
                embedding_dim: 384,
                grid: GridSpec::default(),
                kernel: "linear".into(),
                prune_fractions: vec![0.25],
                tsne: TsneConfig {
                    perplexity: 8.0,
                    iterations: 400,
                    ..TsneConfig::default()
                },
                split_fractions: SplitFractions::default(),
                small_corpus: false,
            };
            let started = Instant::now();
            let report = run(&config, &Stage::ALL).map_err(|e| e.to_string())?;
            let pipeline_time = started.elapsed();

            let paths = Paths::new(&config.workdir, config.seed);
            let metrics_csv =
                std::fs::read_to_string(paths.metrics()).map_err(|e| e.to_string())?;
            let row = metrics_csv
                .lines()
                .find(|l| l.starts_with("equals,HC(Binary),"))
                .ok_or("no HC(Binary) metrics row")?;
            let f1: f64 = row
                .rsplit(',')
                .next()
                .and_then(|v| v.parse().ok())
                .ok_or("bad f1 field")?;
            ensure!(f1 >= 0.95, "held-out F1 {f1} below 0.95");
            // the exit report lists corpus, dataset, feature, model,
            // metrics, ig, tsne, and report files
            let outputs: Vec<&str> = report.outputs().collect();
            for class in [
                "corpus/",
                "datasets/",
                "features/",
                "models/",
                "reports/metrics",
                "reports/ig/",
                "reports/prune",
                "reports/tsne/",
                "reports/report",
            ] {
                ensure!(
                    outputs.iter().any(|p| p.starts_with(class)),
                    "exit report lists no `{class}*` artifact"
                );
            }
            Ok(format!(
                "held-out F1 {f1:.4} >= 0.95 under HC(Binary); {} artifacts in {pipeline_time:.2?}",
                outputs.len()
            ))
        },
    );
}

// ---------------------------------------------------------------------
// 7. pruning on a planted embedding
// ---------------------------------------------------------------------

fn planted_embedding(n: usize, seed: u64) -> (Vec<Vec<f64>>, Vec<f64>) {
    let mut rng = SplitMix64::new(seed);
    let mut xs = Vec::with_capacity(n);
    let mut ys = Vec::with_capacity(n);
    for i in 0..n {
        let y = if i % 2 == 0 { 1.0 } else { -1.0 };
        xs.push(
            (0..100)
                .map(|d| {
                    if d < 5 {
                        y * 0.8 + 0.5 * rng.next_gaussian()
                    } else {
                        rng.next_gaussian()
                    }
                })
                .collect(),
        );
        ys.push(y);
    }
    (xs, ys)
}

#[test]
fn acceptance_07_pruning() {
    criterion(7, "top-fraction pruning", Duration::from_secs(30), || {
        let (train_x, train_y) = planted_embedding(300, 71);
        let (val_x, val_y) = planted_embedding(100, 72);
        let (test_x, test_y) = planted_embedding(200, 73);

        let ranking = rank_dimensions(&train_x, &train_y).unwrap();
        let top5: BTreeSet<usize> = ranking.order[..5].iter().copied().collect();
        ensure!(
            top5 == (0..5).collect::<BTreeSet<usize>>(),
            "top-5 IG ranks are {top5:?}, expected the 5 informative dims"
        );

        let data = DataSplits {
            train: (&train_x, &train_y),
            validation: (&val_x, &val_y),
            test: (&test_x, &test_y),
        };
        let grid = GridSpec {
            c_values: vec![0.1, 1.0, 10.0],
            gamma_values: vec![],
        };
        let base = SvmConfig::new(1.0, KernelSpec::Linear);
        let quarter = prune_experiment(&data, 0.25, &grid, KernelKind::Linear, &base)
            .map_err(|e| e.to_string())?;
        ensure!(
            quarter.kept_dims.len() == 25,
            "kept {} dims, expected ceil(0.25 * 100) = 25",
            quarter.kept_dims.len()
        );
        let gap = (quarter.metrics_pruned.f1 - quarter.metrics_full.f1).abs() * 100.0;
        ensure!(
            gap <= 2.0,
            "pruned F1 {} vs full {} differ by {gap:.2} points",
            quarter.metrics_pruned.f1,
            quarter.metrics_full.f1
        );

        let identity = prune_experiment(&data, 1.0, &grid, KernelKind::Linear, &base)
            .map_err(|e| e.to_string())?;
        ensure!(
            identity.metrics_pruned == identity.metrics_full,
            "fraction 1.0 did not reproduce full metrics exactly"
        );
        Ok(format!(
            "informative dims occupy the top-5 ranks; |pruned - full| = {gap:.2} points; identity fraction exact"
        ))
    });
}

// ---------------------------------------------------------------------
// 8. standardization
// ---------------------------------------------------------------------

#[test]
fn acceptance_08_standardization() {
    criterion(
        8,
        "train-fit standardization",
        Duration::from_secs(5),
        || {
            let mut rng = SplitMix64::new(808);
            let rows: Vec<RawCounts> = (0..200)
                .map(|_| RawCounts {
                    counts: (0..TOTAL_FEATURES)
                        .map(|col| {
                            if col % 7 == 3 {
                                4 // planted zero-variance columns
                            } else {
                                rng.next_below(30) as u32
                            }
                        })
                        .collect(),
                })
                .collect();
            let columns: Vec<usize> = (0..TOTAL_FEATURES).collect();
            let scaler = fit_scaler(&rows, &columns).unwrap();

            let mut worst_mean = 0.0f64;
            let mut worst_std = 0.0f64;
            for col in 0..TOTAL_FEATURES {
                let z: Vec<f64> = rows
                    .iter()
                    .map(|r| scaler.standardize(col, r.counts[col] as f64).unwrap())
                    .collect();
                let mean = z.iter().sum::<f64>() / z.len() as f64;
                if col % 7 == 3 {
                    ensure!(
                        z.iter().all(|v| *v == 0.0),
                        "zero-variance column {col} did not encode to 0"
                    );
                    continue;
                }
                let std = (z.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / z.len() as f64)
                    .sqrt();
                worst_mean = worst_mean.max(mean.abs());
                worst_std = worst_std.max((std - 1.0).abs());
                ensure!(mean.abs() <= 1e-9, "column {col}: |mean| = {}", mean.abs());
                ensure!(
                    (std - 1.0).abs() <= 1e-9,
                    "column {col}: |std - 1| = {}",
                    (std - 1.0).abs()
                );
            }

            // the same guarantee through the encoding path
            let v = encode(&rows[0], Scheme::HcNormCxNorm, Some(&scaler)).unwrap();
            ensure!(v.values[3] == 0.0, "zero-variance column encodes to 0");
            Ok(format!(
            "non-constant columns: max |mean| = {worst_mean:.2e}, max |std-1| = {worst_std:.2e}; constants -> 0"
        ))
        },
    );
}

// ---------------------------------------------------------------------
// 9. t-SNE calibration, gradient, runtime, determinism
// ---------------------------------------------------------------------

#[test]
fn acceptance_09_tsne() {
    criterion(9, "t-SNE", Duration::from_secs(60), || {
        // (a) 100-point calibration fixture
        let mut rng = SplitMix64::new(909);
        let rows: Vec<Vec<f64>> = (0..100)
            .map(|i| {
                let c = if i % 2 == 0 { 2.0 } else { -2.0 };
                (0..8).map(|_| c + rng.next_gaussian()).collect()
            })
            .collect();
        let d2 = pairwise_squared_distances(&rows);
        let perplexity = 20.0;
        let p = calibrate_affinities(&d2, 100, perplexity).map_err(|e| e.to_string())?;
        let target = perplexity.log2();
        let mut worst_entropy_gap = 0.0f64;
        for i in 0..100 {
            let row = &p[i * 100..(i + 1) * 100];
            let entropy: f64 = row
                .iter()
                .filter(|v| **v > 0.0)
                .map(|v| -v * v.log2())
                .sum();
            worst_entropy_gap = worst_entropy_gap.max((entropy - target).abs());
            ensure!(
                (entropy - target).abs() <= 1e-5,
                "row {i}: entropy {entropy} vs target {target}"
            );
        }

        // (b) analytic gradient vs central differences at a mid-run iterate
        let sub: Vec<Vec<f64>> = rows[..30].to_vec();
        let d2 = pairwise_squared_distances(&sub);
        let cond = calibrate_affinities(&d2, 30, 8.0).map_err(|e| e.to_string())?;
        let p_joint = symmetrize(&cond, 30);
        let mut y: Vec<[f64; 2]> = {
            let mut r = SplitMix64::new(910);
            (0..30)
                .map(|_| [r.next_gaussian() * 1e-4, r.next_gaussian() * 1e-4])
                .collect()
        };
        // march the optimizer forward to a representative iterate
        for _ in 0..80 {
            let (_, grad) = kl_and_gradient(&p_joint, &y, 12.0);
            for (yi, gi) in y.iter_mut().zip(&grad) {
                yi[0] -= 100.0 * gi[0];
                yi[1] -= 100.0 * gi[1];
            }
        }
        let (_, analytic) = kl_and_gradient(&p_joint, &y, 1.0);
        let h = 1e-6;
        let mut numeric = vec![[0.0f64; 2]; 30];
        for i in 0..30 {
            for d in 0..2 {
                let mut plus = y.clone();
                plus[i][d] += h;
                let mut minus = y.clone();
                minus[i][d] -= h;
                let (kl_plus, _) = kl_and_gradient(&p_joint, &plus, 1.0);
                let (kl_minus, _) = kl_and_gradient(&p_joint, &minus, 1.0);
                numeric[i][d] = (kl_plus - kl_minus) / (2.0 * h);
            }
        }
        let norm = |g: &[[f64; 2]]| -> f64 {
            g.iter()
                .map(|v| v[0] * v[0] + v[1] * v[1])
                .sum::<f64>()
                .sqrt()
        };
        let diff: Vec<[f64; 2]> = analytic
            .iter()
            .zip(&numeric)
            .map(|(a, n)| [a[0] - n[0], a[1] - n[1]])
            .collect();
        let rel = norm(&diff) / norm(&analytic).max(1e-12);
        ensure!(rel <= 1e-4, "gradient relative error {rel:.2e}");

        // (c) n = 300 projection, timed within this criterion's budget
        let big: Vec<Vec<f64>> = (0..300)
            .map(|i| {
                let c = if i % 2 == 0 { 3.0 } else { -3.0 };
                (0..10).map(|_| c + rng.next_gaussian()).collect()
            })
            .collect();
        let ids: Vec<String> = (0..300).map(|i| format!("n{i:04}")).collect();
        let cfg = TsneConfig {
            seed: 99,
            ..TsneConfig::default()
        };
        let projection_started = Instant::now();
        let first = tsne_project(&big, &ids, &cfg).map_err(|e| e.to_string())?;
        let projection_time = projection_started.elapsed();
        ensure!(
            projection_time <= Duration::from_secs(60),
            "n=300 projection took {projection_time:?}"
        );

        // (d) fixed seed -> byte-identical output
        let second = tsne_project(&big, &ids, &cfg).map_err(|e| e.to_string())?;
        let a = serde_json::to_string(&first.projection).unwrap();
        let b = serde_json::to_string(&second.projection).unwrap();
        ensure!(a == b, "two projections with one seed differ");

        Ok(format!(
            "entropy gap {worst_entropy_gap:.1e} <= 1e-5; gradient rel err {rel:.1e} <= 1e-4; n=300 in {projection_time:.2?}; byte-identical"
        ))
    });
}

// ---------------------------------------------------------------------
// 10. whole-pipeline determinism
// ---------------------------------------------------------------------

fn tree_bytes(root: &Path) -> Vec<(String, Vec<u8>)> {
    let mut files = Vec::new();
    let mut stack = vec![root.to_path_buf()];
    while let Some(dir) = stack.pop() {
        let Ok(entries) = std::fs::read_dir(&dir) else {
            continue;
        };
        for entry in entries {
            let path = entry.unwrap().path();
            if path.is_dir() {
                stack.push(path);
            } else {
                let rel = path
                    .strip_prefix(root)
                    .unwrap()
                    .to_string_lossy()
                    .into_owned();
                files.push((rel, std::fs::read(&path).unwrap()));
            }
        }
    }
    files.sort();
    files
}

#[test]
fn acceptance_10_determinism() {
    criterion(10, "run determinism", Duration::from_secs(60), || {
        let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
        let corpus_path = dir.path().join("corpus.jsonl");
        let text: String = two_class_corpus(40, 17)
            .iter()
            .map(|r| serde_json::to_string(r).unwrap() + "\n")
            .collect();
        std::fs::write(&corpus_path, text).map_err(|e| e.to_string())?;

        let make_config = |workdir: PathBuf| RunConfig {
            corpus_path: corpus_path.clone(),
            workdir,
            targets: vec!["equals".into(), "main".into()],
            n_train: 20,
            seed: 11,
            dedup: DedupConfig::default(),
            schemes: vec!["HC(Binary)".into(), "HC(Norm)+CX(Norm)".into()],
            embedding_path: None,
            embedding_dim: 384,
            grid: GridSpec {
                c_values: vec![1.0, 10.0],
                gamma_values: vec![],
            },
            kernel: "linear".into(),
            prune_fractions: vec![0.5],
            tsne: TsneConfig {
                perplexity: 5.0,
                iterations: 200,
                exaggeration_iters: 60,
                momentum_switch_iter: 80,
                seed: 11,
                ..TsneConfig::default()
            },
            split_fractions: SplitFractions::default(),
            small_corpus: false,
        };

        run(&make_config(dir.path().join("run-a")), &Stage::ALL).map_err(|e| e.to_string())?;
        run(&make_config(dir.path().join("run-b")), &Stage::ALL).map_err(|e| e.to_string())?;

        let mut compared = 0;
        for sub in ["features", "models", "reports"] {
            let a = tree_bytes(&dir.path().join("run-a").join(sub));
            let b = tree_bytes(&dir.path().join("run-b").join(sub));
            ensure!(
                a.iter().map(|(n, _)| n).eq(b.iter().map(|(n, _)| n)),
                "{sub}: file sets differ"
            );
            for ((name, bytes_a), (_, bytes_b)) in a.iter().zip(&b) {
                ensure!(
                    bytes_a == bytes_b,
                    "{sub}/{name} differs between identical runs"
                );
                compared += 1;
            }
            ensure!(compared > 0, "{sub}: nothing to compare");
        }
        Ok(format!(
            "{compared} feature/model/report files byte-identical across two runs"
        ))
    });
}
