//! Workdir layout, file IO helpers, and the feature-matrix CSV format.

use std::path::{Path, PathBuf};

use crate::corpus::{MethodRecord, Split};
use crate::error::{Error, Result};

/// All artifact paths for one (workdir, seed) pair. Names carry the seed
/// so runs with different seeds coexist in one workdir.
#[derive(Debug, Clone)]
pub struct Paths {
    pub workdir: PathBuf,
    pub seed: u64,
}

impl Paths {
    pub fn new(workdir: &Path, seed: u64) -> Self {
        Paths {
            workdir: workdir.to_path_buf(),
            seed,
        }
    }

    fn seeded(&self, dir: &str, stem: &str, ext: &str) -> PathBuf {
        self.workdir
            .join(dir)
            .join(format!("{stem}-s{}.{ext}", self.seed))
    }

    pub fn records(&self) -> PathBuf {
        self.seeded("corpus", "records", "jsonl")
    }

    pub fn kept(&self) -> PathBuf {
        self.seeded("corpus", "kept", "jsonl")
    }

    pub fn dedup_report(&self) -> PathBuf {
        self.seeded("corpus", "dedup-report", "csv")
    }

    pub fn dataset_manifest(&self, target: &str) -> PathBuf {
        self.workdir
            .join("datasets")
            .join(target)
            .join(format!("manifest-s{}.jsonl", self.seed))
    }

    pub fn schema(&self) -> PathBuf {
        self.seeded("features", "schema", "json")
    }

    pub fn vocab(&self, mode: &str) -> PathBuf {
        self.seeded("features", &format!("vocab-{mode}"), "json")
    }

    pub fn sequences(&self, mode: &str) -> PathBuf {
        self.seeded("features", &format!("{mode}seq"), "jsonl")
    }

    pub fn feature_matrix(&self, target: &str, slug: &str, split: Split) -> PathBuf {
        self.workdir.join("features").join(target).join(format!(
            "{slug}-{}-s{}.csv",
            split.as_str(),
            self.seed
        ))
    }

    pub fn embedding_table(&self) -> PathBuf {
        self.seeded("features", "embeddings", "csv")
    }

    pub fn model(&self, target: &str, slug: &str) -> PathBuf {
        self.workdir
            .join("models")
            .join(target)
            .join(format!("{slug}-s{}.json", self.seed))
    }

    pub fn grid_table(&self, target: &str, slug: &str) -> PathBuf {
        self.workdir
            .join("models")
            .join(target)
            .join(format!("{slug}-grid-s{}.csv", self.seed))
    }

    pub fn best_cell(&self, target: &str, slug: &str) -> PathBuf {
        self.workdir
            .join("models")
            .join(target)
            .join(format!("{slug}-cell-s{}.json", self.seed))
    }

    pub fn metrics(&self) -> PathBuf {
        self.seeded("reports", "metrics", "csv")
    }

    pub fn ig(&self, target: &str, slug: &str) -> PathBuf {
        self.workdir
            .join("reports")
            .join("ig")
            .join(format!("{target}-{slug}-s{}.csv", self.seed))
    }

    pub fn prune(&self) -> PathBuf {
        self.seeded("reports", "prune", "csv")
    }

    pub fn tsne_csv(&self, target: &str, slug: &str) -> PathBuf {
        self.workdir
            .join("reports")
            .join("tsne")
            .join(format!("{target}-{slug}-s{}.csv", self.seed))
    }

    pub fn tsne_svg(&self, target: &str, slug: &str) -> PathBuf {
        self.workdir
            .join("reports")
            .join("tsne")
            .join(format!("{target}-{slug}-s{}.svg", self.seed))
    }

    pub fn report_methods(&self) -> PathBuf {
        self.seeded("reports", "report-methods", "csv")
    }

    pub fn report_averages(&self) -> PathBuf {
        self.seeded("reports", "report-averages", "csv")
    }

    pub fn report_markdown(&self) -> PathBuf {
        self.seeded("reports", "report", "md")
    }

    pub fn stage_manifest(&self, stage: &str) -> PathBuf {
        self.workdir
            .join("manifests")
            .join(format!("{stage}-s{}.json", self.seed))
    }

    pub fn run_report(&self) -> PathBuf {
        self.seeded("manifests", "run-report", "json")
    }
}

pub fn write_file(path: &Path, content: &str) -> Result<()> {
    if let Some(parent) = path.parent() {
        std::fs::create_dir_all(parent).map_err(|e| Error::io(parent.display().to_string(), e))?;
    }
    std::fs::write(path, content).map_err(|e| Error::io(path.display().to_string(), e))
}

pub fn read_file(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::io(path.display().to_string(), e))
}

pub fn write_records_jsonl(path: &Path, records: &[MethodRecord]) -> Result<()> {
    let mut out = String::new();
    for r in records {
        out.push_str(&serde_json::to_string(r).expect("record serializes"));
        out.push('\n');
    }
    write_file(path, &out)
}

pub fn read_records_jsonl(path: &Path) -> Result<Vec<MethodRecord>> {
    let text = read_file(path)?;
    let mut out = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let record: MethodRecord = serde_json::from_str(line)
            .map_err(|e| Error::Data(format!("{} line {}: {e}", path.display(), lineno + 1)))?;
        out.push(record);
    }
    Ok(out)
}

/// A dense labeled matrix as stored in feature CSVs.
#[derive(Debug, Clone, Default)]
pub struct LabeledMatrix {
    pub ids: Vec<String>,
    pub labels: Vec<f64>,
    pub rows: Vec<Vec<f64>>,
}

impl LabeledMatrix {
    pub fn push(&mut self, id: String, label: f64, row: Vec<f64>) {
        self.ids.push(id);
        self.labels.push(label);
        self.rows.push(row);
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }
}

/// `id,label,<column names...>` header, then one row per example with
/// labels +1/-1 and full-precision values.
pub fn write_matrix_csv(path: &Path, columns: &[&str], matrix: &LabeledMatrix) -> Result<()> {
    let mut out = String::from("id,label");
    for c in columns {
        out.push(',');
        out.push_str(c);
    }
    out.push('\n');
    for ((id, label), row) in matrix.ids.iter().zip(&matrix.labels).zip(&matrix.rows) {
        out.push_str(id);
        out.push(',');
        out.push_str(if *label > 0.0 { "1" } else { "-1" });
        for v in row {
            out.push(',');
            out.push_str(&v.to_string());
        }
        out.push('\n');
    }
    write_file(path, &out)
}

pub fn read_matrix_csv(path: &Path) -> Result<LabeledMatrix> {
    let text = read_file(path)?;
    let mut lines = text.lines();
    let _header = lines
        .next()
        .ok_or_else(|| Error::Data(format!("{}: empty matrix file", path.display())))?;
    let mut matrix = LabeledMatrix::default();
    for (lineno, line) in lines.enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let mut fields = line.split(',');
        let id = fields
            .next()
            .ok_or_else(|| Error::Data(format!("{} line {}", path.display(), lineno + 2)))?;
        let label: f64 = fields.next().and_then(|f| f.parse().ok()).ok_or_else(|| {
            Error::Data(format!("{} line {}: bad label", path.display(), lineno + 2))
        })?;
        let row: std::result::Result<Vec<f64>, _> = fields.map(|f| f.parse::<f64>()).collect();
        let row =
            row.map_err(|e| Error::Data(format!("{} line {}: {e}", path.display(), lineno + 2)))?;
        matrix.push(id.to_string(), label, row);
    }
    Ok(matrix)
}
