//! Resumable evaluation runs writing one JSON record per line.

use super::prompt::{build_prompt, pick_exemplars, PromptMode};
use super::{make_record, EvalError, EvalRecord, Judge, ModelClient};
use crate::taskgen::Instance;
use crate::topology::Topology;
use std::collections::{BTreeMap, HashSet};
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::Arc;
use tokio::sync::{Mutex, Semaphore};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TopologyFilter {
    Cartesian,
    Polar,
    /// Cartesian and Polar.
    Both,
    /// Including the other tiling variants.
    All,
}

impl TopologyFilter {
    pub fn admits(self, t: Topology) -> bool {
        match self {
            TopologyFilter::Cartesian => t == Topology::Cartesian,
            TopologyFilter::Polar => t == Topology::Polar,
            TopologyFilter::Both => matches!(t, Topology::Cartesian | Topology::Polar),
            TopologyFilter::All => true,
        }
    }
}

impl std::str::FromStr for TopologyFilter {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "c" | "cartesian" => Ok(TopologyFilter::Cartesian),
            "p" | "polar" => Ok(TopologyFilter::Polar),
            "both" => Ok(TopologyFilter::Both),
            "all" => Ok(TopologyFilter::All),
            _ => Err(format!("unknown topology filter `{s}` (expected c, p, both or all)")),
        }
    }
}

#[derive(Debug, Clone)]
pub struct RunOptions {
    pub mode: PromptMode,
    pub topology: TopologyFilter,
    pub repeats: u32,
    pub records_path: PathBuf,
    /// Restrict to these task ids.
    pub tasks: Option<Vec<String>>,
}

#[derive(Debug, Default)]
pub struct RunSummary {
    /// Records written by this run, sorted by key.
    pub records: Vec<EvalRecord>,
    /// Jobs already present in the records file.
    pub skipped: usize,
    /// Jobs that failed, with the error text. They are retried on the next run.
    pub failures: Vec<(String, String)>,
    /// New records that hit the output limit; these are re-run next time.
    pub truncated: usize,
}

/// Read a records file, keeping the last record per (instance, mode,
/// repeat). A missing file reads as empty; an unparseable final line (an
/// interrupted write) is dropped.
pub fn read_records(path: &Path) -> Result<Vec<EvalRecord>, EvalError> {
    let text = match std::fs::read_to_string(path) {
        Ok(t) => t,
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(Vec::new()),
        Err(e) => return Err(EvalError::Io(format!("{}: {e}", path.display()))),
    };
    let lines: Vec<&str> = text.lines().filter(|l| !l.trim().is_empty()).collect();
    let mut latest = BTreeMap::new();
    for (i, line) in lines.iter().enumerate() {
        match serde_json::from_str::<EvalRecord>(line) {
            Ok(r) => {
                latest.insert(r.key(), r);
            }
            Err(e) if i + 1 == lines.len() => {
                tracing::warn!(path = %path.display(), error = %e, "dropping partial final record");
            }
            Err(e) => return Err(EvalError::Io(format!("{}:{}: {e}", path.display(), i + 1))),
        }
    }
    Ok(latest.into_values().collect())
}

struct Sink {
    file: std::fs::File,
}

impl Sink {
    fn append(&mut self, rec: &EvalRecord) -> Result<(), EvalError> {
        let mut line = serde_json::to_string(rec).map_err(|e| EvalError::Io(e.to_string()))?;
        line.push('\n');
        self.file
            .write_all(line.as_bytes())
            .and_then(|_| self.file.sync_data())
            .map_err(|e| EvalError::Io(e.to_string()))
    }
}

fn request_id(id: &str, mode: PromptMode, repeat: u32) -> String {
    format!("{id}/{mode}/{repeat}")
}

struct Job {
    index: usize,
    repeat: u32,
    caption: Option<String>,
}

async fn run_job(
    job: Job,
    instances: &[Instance],
    client: &ModelClient,
    mode: PromptMode,
    judge: Option<&dyn Judge>,
    sink: &Mutex<Sink>,
) -> Result<Vec<EvalRecord>, EvalError> {
    let inst = &instances[job.index];
    let model = client.config().model.clone();
    let mut out = Vec::new();
    let caption = match (mode, job.caption) {
        (PromptMode::TwoStageAnswer, None) => {
            let prompt = build_prompt(inst, PromptMode::TwoStageCaption, &[], None)?;
            let reply = client
                .complete(&prompt, &request_id(&inst.id, PromptMode::TwoStageCaption, job.repeat))
                .await?;
            let rec = make_record(inst, PromptMode::TwoStageCaption, job.repeat, &model, reply, None);
            sink.lock().await.append(&rec)?;
            let text = rec.raw_response.clone();
            out.push(rec);
            Some(text)
        }
        (_, c) => c,
    };
    let exemplars = if mode == PromptMode::FewShot {
        pick_exemplars(inst, instances)
    } else {
        Vec::new()
    };
    let prompt = build_prompt(inst, mode, &exemplars, caption.as_deref())?;
    let reply = client.complete(&prompt, &request_id(&inst.id, mode, job.repeat)).await?;
    let rec = make_record(inst, mode, job.repeat, &model, reply, judge);
    sink.lock().await.append(&rec)?;
    out.push(rec);
    Ok(out)
}

/// Evaluate every admitted instance `repeats` times, appending records to
/// `opts.records_path`. Jobs with an untruncated record already on file are
/// skipped, so an interrupted run resumes where it stopped.
pub async fn run_eval(
    instances: Arc<Vec<Instance>>,
    client: Arc<ModelClient>,
    opts: &RunOptions,
    judge: Option<Arc<dyn Judge>>,
) -> Result<RunSummary, EvalError> {
    let existing = read_records(&opts.records_path)?;
    let done: HashSet<(String, PromptMode, u32)> =
        existing.iter().filter(|r| !r.truncated).map(EvalRecord::key).collect();
    let captions: BTreeMap<(String, u32), String> = existing
        .iter()
        .filter(|r| r.mode == PromptMode::TwoStageCaption && !r.truncated)
        .map(|r| ((r.instance_id.clone(), r.repeat), r.raw_response.clone()))
        .collect();

    if let Some(dir) = opts.records_path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|e| EvalError::Io(format!("{}: {e}", dir.display())))?;
    }
    let file = std::fs::OpenOptions::new()
        .create(true)
        .append(true)
        .open(&opts.records_path)
        .map_err(|e| EvalError::Io(format!("{}: {e}", opts.records_path.display())))?;
    let sink = Arc::new(Mutex::new(Sink { file }));

    let mut summary = RunSummary::default();
    let mut jobs = Vec::new();
    for (index, inst) in instances.iter().enumerate() {
        if !opts.topology.admits(inst.topology) {
            continue;
        }
        if let Some(tasks) = &opts.tasks {
            if !tasks.contains(&inst.task_id) {
                continue;
            }
        }
        for repeat in 0..opts.repeats.max(1) {
            if done.contains(&(inst.id.clone(), opts.mode, repeat)) {
                summary.skipped += 1;
                continue;
            }
            jobs.push(Job {
                index,
                repeat,
                caption: captions.get(&(inst.id.clone(), repeat)).cloned(),
            });
        }
    }

    let permits = Arc::new(Semaphore::new(client.config().concurrency.max(1)));
    let mut set = tokio::task::JoinSet::new();
    for job in jobs {
        let permit = permits.clone().acquire_owned().await.expect("semaphore is never closed");
        let (instances, client, sink, judge) = (instances.clone(), client.clone(), sink.clone(), judge.clone());
        let mode = opts.mode;
        set.spawn(async move {
            let id = instances[job.index].id.clone();
            let res = run_job(job, &instances, &client, mode, judge.as_deref(), &sink).await;
            drop(permit);
            (id, res)
        });
    }
    while let Some(joined) = set.join_next().await {
        let (id, res) = joined.map_err(|e| EvalError::Io(format!("worker panicked: {e}")))?;
        match res {
            Ok(recs) => summary.records.extend(recs),
            Err(e) => {
                tracing::error!(instance = %id, error = %e, "evaluation failed");
                summary.failures.push((id, e.to_string()));
            }
        }
    }
    summary.truncated = summary.records.iter().filter(|r| r.truncated).count();
    summary.records.sort_by_key(EvalRecord::key);
    summary.failures.sort();
    Ok(summary)
}
