//! On-disk dataset layout: `manifest.jsonl`, `images/<id>.svg` and
//! `puzzles/<id>.json` sidecars holding each instance's logical content.

use crate::taskgen::{
    validate_instance, Alignment, Answer, AnswerType, Category, Check, GeneratedSet, Instance, OptionEntry,
    TaskPuzzle, ValidationReport,
};
use crate::topology::{Boundary, Topology};
use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use thiserror::Error;

pub const MANIFEST: &str = "manifest.jsonl";
pub const IMAGES_DIR: &str = "images";
pub const PUZZLES_DIR: &str = "puzzles";

#[derive(Debug, Error)]
pub enum DatasetError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}:{line}: {source}")]
    Json {
        path: PathBuf,
        line: usize,
        #[source]
        source: serde_json::Error,
    },
    #[error("{path}: cannot render instance {id}: {message}")]
    Render { path: PathBuf, id: String, message: String },
    #[error("duplicate instance id {0} in manifest")]
    DuplicateId(String),
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> DatasetError + '_ {
    move |source| DatasetError::Io {
        path: path.to_path_buf(),
        source,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct GridDims {
    pub major: usize,
    pub minor: usize,
}

/// One line of `manifest.jsonl`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ManifestRecord {
    pub id: String,
    pub task_id: String,
    pub category: Category,
    pub subcategory: String,
    pub topology: Topology,
    pub boundary: Boundary,
    pub alignment: Alignment,
    pub answer_type: AnswerType,
    pub seed: u64,
    pub question: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub options: Option<Vec<OptionEntry>>,
    pub ground_truth: Answer,
    pub image_path: String,
    pub image_sha256: String,
    pub puzzle_path: String,
    pub grid: GridDims,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub answer_domain: Option<usize>,
    /// Set on both members of a pair whose ground truths differ.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub divergence: Option<String>,
    pub generator_version: String,
}

fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

fn record_for(inst: &Instance, svg: &[u8], divergence: Option<String>) -> ManifestRecord {
    ManifestRecord {
        id: inst.id.clone(),
        task_id: inst.task_id.clone(),
        category: inst.category,
        subcategory: inst.subcategory.clone(),
        topology: inst.topology,
        boundary: inst.boundary,
        alignment: inst.alignment,
        answer_type: inst.answer_type,
        seed: inst.seed,
        question: inst.question.clone(),
        options: inst.options.clone(),
        ground_truth: inst.ground_truth.clone(),
        image_path: format!("{IMAGES_DIR}/{}.svg", inst.id),
        image_sha256: sha256_hex(svg),
        puzzle_path: format!("{PUZZLES_DIR}/{}.json", inst.id),
        grid: GridDims {
            major: inst.grid.major,
            minor: inst.grid.minor,
        },
        answer_domain: inst.answer_domain,
        divergence,
        generator_version: inst.generator_version.clone(),
    }
}

fn reset_dir(dir: &Path) -> Result<(), DatasetError> {
    if dir.exists() {
        fs::remove_dir_all(dir).map_err(io_err(dir))?;
    }
    fs::create_dir_all(dir).map_err(io_err(dir))
}

/// Write a generated set to `out_dir`, replacing any previous dataset
/// there. Returns the manifest path.
pub fn write_dataset(set: &GeneratedSet, out_dir: &Path) -> Result<PathBuf, DatasetError> {
    fs::create_dir_all(out_dir).map_err(io_err(out_dir))?;
    let images = out_dir.join(IMAGES_DIR);
    let puzzles = out_dir.join(PUZZLES_DIR);
    reset_dir(&images)?;
    reset_dir(&puzzles)?;
    let divergence: BTreeMap<&str, &str> = set
        .pairs
        .iter()
        .filter_map(|p| p.divergence.as_deref().map(|d| [(p.cartesian.id.as_str(), d), (p.polar.id.as_str(), d)]))
        .flatten()
        .collect();
    let mut manifest = String::new();
    for inst in set.instances() {
        let svg = inst.render().map_err(|e| DatasetError::Render {
            path: out_dir.to_path_buf(),
            id: inst.id.clone(),
            message: e.to_string(),
        })?;
        let record = record_for(inst, &svg.bytes, divergence.get(inst.id.as_str()).map(|d| d.to_string()));
        let img = out_dir.join(&record.image_path);
        fs::write(&img, &svg.bytes).map_err(io_err(&img))?;
        let side = out_dir.join(&record.puzzle_path);
        let body = serde_json::to_string(inst).expect("instances serialize");
        fs::write(&side, body + "\n").map_err(io_err(&side))?;
        manifest.push_str(&serde_json::to_string(&record).expect("records serialize"));
        manifest.push('\n');
    }
    let path = out_dir.join(MANIFEST);
    let mut f = fs::File::create(&path).map_err(io_err(&path))?;
    f.write_all(manifest.as_bytes()).map_err(io_err(&path))?;
    f.sync_all().map_err(io_err(&path))?;
    Ok(path)
}

pub fn read_manifest(dir: &Path) -> Result<Vec<ManifestRecord>, DatasetError> {
    let path = dir.join(MANIFEST);
    let text = fs::read_to_string(&path).map_err(io_err(&path))?;
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty()) {
        let rec: ManifestRecord = serde_json::from_str(line).map_err(|source| DatasetError::Json {
            path: path.clone(),
            line: i + 1,
            source,
        })?;
        if !seen.insert(rec.id.clone()) {
            return Err(DatasetError::DuplicateId(rec.id));
        }
        out.push(rec);
    }
    Ok(out)
}

/// A dataset read back from disk. The instance's public fields (question,
/// options, ground truth) come from the manifest; the logical puzzle comes
/// from its sidecar.
#[derive(Debug, Clone)]
pub struct Dataset {
    pub root: PathBuf,
    pub records: Vec<ManifestRecord>,
    pub instances: Vec<Instance>,
}

impl Dataset {
    pub fn instance(&self, id: &str) -> Option<&Instance> {
        self.instances.iter().find(|i| i.id == id)
    }

    pub fn image_path(&self, rec: &ManifestRecord) -> PathBuf {
        self.root.join(&rec.image_path)
    }
}

fn load_sidecar(dir: &Path, rec: &ManifestRecord) -> Result<Instance, DatasetError> {
    let path = dir.join(&rec.puzzle_path);
    let text = fs::read_to_string(&path).map_err(io_err(&path))?;
    let mut inst: Instance = serde_json::from_str(&text).map_err(|source| DatasetError::Json {
        path: path.clone(),
        line: 1,
        source,
    })?;
    inst.question = rec.question.clone();
    inst.options = rec.options.clone();
    inst.ground_truth = rec.ground_truth.clone();
    inst.answer_type = rec.answer_type;
    Ok(inst)
}

pub fn read_dataset(dir: &Path) -> Result<Dataset, DatasetError> {
    let records = read_manifest(dir)?;
    let instances = records.iter().map(|r| load_sidecar(dir, r)).collect::<Result<Vec<_>, _>>()?;
    Ok(Dataset {
        root: dir.to_path_buf(),
        records,
        instances,
    })
}

fn check(name: &str, result: Result<(), String>) -> Check {
    let (passed, detail) = match result {
        Ok(()) => (true, String::new()),
        Err(e) => (false, e),
    };
    Check {
        name: name.into(),
        passed,
        detail,
    }
}

/// Validate every record of the dataset at `dir`: the instance checks plus
/// manifest/sidecar agreement and image integrity.
pub fn verify_dataset(dir: &Path) -> Result<Vec<ValidationReport>, DatasetError> {
    let records = read_manifest(dir)?;
    let mut reports = Vec::with_capacity(records.len());
    for rec in &records {
        let inst = match load_sidecar(dir, rec) {
            Ok(i) => i,
            Err(e) => {
                reports.push(ValidationReport {
                    id: rec.id.clone(),
                    checks: vec![check("sidecar", Err(e.to_string()))],
                });
                continue;
            }
        };
        let mut report = validate_instance(&inst);
        report.checks.push(check("manifest_record", {
            let same = inst.id == rec.id
                && inst.task_id == rec.task_id
                && inst.topology == rec.topology
                && inst.boundary == rec.boundary
                && inst.seed == rec.seed
                && inst.grid.major == rec.grid.major
                && inst.grid.minor == rec.grid.minor;
            if same {
                Ok(())
            } else {
                Err("manifest record disagrees with its sidecar".into())
            }
        }));
        report.checks.push(check("image", {
            let path = dir.join(&rec.image_path);
            match fs::read(&path) {
                Err(e) => Err(format!("{}: {e}", path.display())),
                Ok(bytes) if sha256_hex(&bytes) != rec.image_sha256 => {
                    Err(format!("{}: content digest mismatch", path.display()))
                }
                Ok(bytes) => match inst.render() {
                    Ok(svg) if svg.bytes == bytes => Ok(()),
                    Ok(_) => Err(format!("{}: image differs from a fresh render", path.display())),
                    Err(e) => Err(e.to_string()),
                },
            }
        }));
        reports.push(report);
    }
    Ok(reports)
}

// ---------------------------------------------------------------- baselines

/// Chance of a uniform-random answerer on one instance: 1/k over the
/// options, 1/|domain| for finite open domains, otherwise zero.
pub fn chance(inst: &Instance) -> f64 {
    match (&inst.options, inst.answer_domain) {
        (Some(o), _) if !o.is_empty() => 1.0 / o.len() as f64,
        (_, Some(d)) if d > 0 => 1.0 / d as f64,
        _ => 0.0,
    }
}

/// Expected accuracy, in percent, of a uniform-random answerer averaged
/// over `sample`.
pub fn random_baseline<'a>(sample: impl IntoIterator<Item = &'a Instance>) -> f64 {
    let (sum, n) = sample.into_iter().fold((0.0, 0usize), |(s, n), i| (s + chance(i), n + 1));
    if n == 0 {
        0.0
    } else {
        100.0 * sum / n as f64
    }
}

/// One random guess for an instance, or `None` when the format has no
/// finite domain to draw from.
pub fn random_guess<R: Rng>(inst: &Instance, rng: &mut R) -> Option<Answer> {
    if let Some(opts) = &inst.options {
        return opts.choose(rng).map(|o| Answer::OptionLabel(o.label.clone()));
    }
    inst.puzzle.answer_candidates(&inst.grid)?.choose(rng).cloned()
}

/// Accuracy, in percent, of simulated uniform guessing: one guess per
/// instance. Open formats without a finite domain always miss.
pub fn simulate_random_answerer<'a, R: Rng>(sample: impl IntoIterator<Item = &'a Instance>, rng: &mut R) -> f64 {
    let mut hits = 0usize;
    let mut n = 0usize;
    for inst in sample {
        n += 1;
        if random_guess(inst, rng).is_some_and(|g| g.matches(&inst.ground_truth)) {
            hits += 1;
        }
    }
    if n == 0 {
        0.0
    } else {
        100.0 * hits as f64 / n as f64
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BaselineRow {
    pub task_id: String,
    pub category: Category,
    pub cartesian: f64,
    pub polar: f64,
    pub overall: f64,
    pub instances: usize,
}

/// Per-task random baselines in catalog order, over the Cartesian/Polar
/// instances of `instances`.
pub fn baseline_table(instances: &[Instance]) -> Vec<BaselineRow> {
    crate::taskgen::catalog()
        .iter()
        .filter_map(|spec| {
            let of = |t: Option<Topology>| {
                instances
                    .iter()
                    .filter(|i| i.task_id == spec.id && matches!(i.topology, Topology::Cartesian | Topology::Polar))
                    .filter(move |i| t.is_none_or(|t| i.topology == t))
            };
            let n = of(None).count();
            (n > 0).then(|| BaselineRow {
                task_id: spec.id.to_string(),
                category: spec.category,
                cartesian: random_baseline(of(Some(Topology::Cartesian))),
                polar: random_baseline(of(Some(Topology::Polar))),
                overall: random_baseline(of(None)),
                instances: n,
            })
        })
        .collect()
}

pub fn format_baseline_table(rows: &[BaselineRow]) -> String {
    let mut out = format!("{:<20} {:>8} {:>8} {:>8} {:>6}\n", "task", "C", "P", "all", "n");
    for r in rows {
        out.push_str(&format!(
            "{:<20} {:>8.1} {:>8.1} {:>8.1} {:>6}\n",
            r.task_id, r.cartesian, r.polar, r.overall, r.instances
        ));
    }
    out
}
