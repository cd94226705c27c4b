use super::{EvalError, EvalRecord};
use crate::taskgen::{catalog, Category, Instance};
use crate::topology::{Boundary, Topology};
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write;

pub const DETECTOR_NOTE: &str =
    "coordinate invocation is measured by a lexical pattern detector, an approximation of a judge-model reading";

/// Cartesian/Polar accuracy for one slice of the records.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Row {
    pub key: String,
    pub c_n: usize,
    pub c_correct: usize,
    pub p_n: usize,
    pub p_correct: usize,
    pub c_acc: Option<f64>,
    pub p_acc: Option<f64>,
    /// `c_acc - p_acc` when both sides have records.
    pub delta: Option<f64>,
}

#[derive(Default)]
struct Tally {
    c: (usize, usize),
    p: (usize, usize),
}

impl Tally {
    fn add(&mut self, topology: Topology, correct: bool) {
        let slot = match topology {
            Topology::Cartesian => &mut self.c,
            Topology::Polar => &mut self.p,
            _ => return,
        };
        slot.0 += 1;
        slot.1 += correct as usize;
    }

    fn row(&self, key: impl Into<String>) -> Row {
        let pct = |(n, k): (usize, usize)| (n > 0).then(|| 100.0 * k as f64 / n as f64);
        let (c_acc, p_acc) = (pct(self.c), pct(self.p));
        Row {
            key: key.into(),
            c_n: self.c.0,
            c_correct: self.c.1,
            p_n: self.p.0,
            p_correct: self.p.1,
            c_acc,
            p_acc,
            delta: c_acc.zip(p_acc).map(|(c, p)| c - p),
        }
    }
}

/// Accuracy on a layout outside the Cartesian/Polar pair.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LayoutRow {
    pub topology: Topology,
    pub n: usize,
    pub correct: usize,
    pub accuracy: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TopologyRates {
    pub cartesian: Option<f64>,
    pub polar: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SizeMentionRates {
    pub topology: Topology,
    pub n: usize,
    pub correct: f64,
    pub incorrect: f64,
    pub unmentioned: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AggregateReport {
    pub records: usize,
    pub scored: usize,
    pub parse_failures: usize,
    pub judged: usize,
    /// Unparsed and unjudged; counted as wrong.
    pub unjudged: usize,
    pub truncated: usize,
    pub overall: Row,
    pub categories: Vec<Row>,
    pub tasks: Vec<Row>,
    pub alignment: Vec<Row>,
    pub boundary: Vec<Row>,
    pub layouts: Vec<LayoutRow>,
    pub coordinate_invocation: Option<TopologyRates>,
    pub size_mentions: Vec<SizeMentionRates>,
    pub detector_note: String,
}

/// Aggregate records against the instances they answer. Every record must
/// name an instance in `instances`.
pub fn aggregate(records: &[EvalRecord], instances: &[Instance]) -> Result<AggregateReport, EvalError> {
    let by_id: BTreeMap<&str, &Instance> = instances.iter().map(|i| (i.id.as_str(), i)).collect();
    let orphans: BTreeSet<String> = records
        .iter()
        .filter(|r| !by_id.contains_key(r.instance_id.as_str()))
        .map(|r| r.instance_id.clone())
        .collect();
    if !orphans.is_empty() {
        return Err(EvalError::Orphans(orphans.into_iter().collect()));
    }

    let mut overall = Tally::default();
    let mut cats: BTreeMap<Category, Tally> = BTreeMap::new();
    let mut tasks: BTreeMap<&str, Tally> = BTreeMap::new();
    let mut align: BTreeMap<&str, Tally> = BTreeMap::new();
    let mut bound: BTreeMap<&str, Tally> = BTreeMap::new();
    let mut layouts: BTreeMap<Topology, (usize, usize)> = BTreeMap::new();
    let mut coord: BTreeMap<Topology, (usize, usize)> = BTreeMap::new();
    let mut sizes: BTreeMap<Topology, [usize; 3]> = BTreeMap::new();
    let (mut scored, mut failures, mut judged, mut unjudged, mut truncated) = (0, 0, 0, 0, 0);

    for r in records {
        let inst = by_id[r.instance_id.as_str()];
        truncated += r.truncated as usize;
        if let Some(m) = r.size_mention {
            let e = sizes.entry(inst.topology).or_default();
            e[m as usize] += 1;
        }
        if !r.mode.is_scored() {
            continue;
        }
        scored += 1;
        if r.parsed.answer().is_none() {
            failures += 1;
            if r.judge_answer.is_some() {
                judged += 1;
            }
        }
        if r.correct.is_none() {
            unjudged += 1;
        }
        let ok = r.correct == Some(true);
        if let Some(ci) = r.coordinate_invocation {
            let e = coord.entry(inst.topology).or_default();
            e.0 += 1;
            e.1 += ci as usize;
        }
        match inst.topology {
            Topology::Cartesian | Topology::Polar => {
                overall.add(inst.topology, ok);
                cats.entry(inst.category).or_default().add(inst.topology, ok);
                tasks.entry(inst.task_id.as_str()).or_default().add(inst.topology, ok);
                align.entry(inst.alignment.as_str()).or_default().add(inst.topology, ok);
                let b = match inst.boundary {
                    Boundary::Bounded => "bounded",
                    Boundary::Wrapping => "wrapping",
                };
                bound.entry(b).or_default().add(inst.topology, ok);
            }
            t => {
                let e = layouts.entry(t).or_default();
                e.0 += 1;
                e.1 += ok as usize;
            }
        }
    }

    let task_order: Vec<&str> = catalog().iter().map(|t| t.id).collect();
    let mut task_rows: Vec<Row> = tasks.iter().map(|(k, t)| t.row(*k)).collect();
    task_rows.sort_by_key(|r| task_order.iter().position(|t| *t == r.key).unwrap_or(usize::MAX));
    let rate = |t: Topology| coord.get(&t).map(|(n, k)| 100.0 * *k as f64 / *n as f64);
    Ok(AggregateReport {
        records: records.len(),
        scored,
        parse_failures: failures,
        judged,
        unjudged,
        truncated,
        overall: overall.row("overall"),
        categories: cats.iter().map(|(c, t)| t.row(c.title())).collect(),
        tasks: task_rows,
        alignment: align.iter().map(|(k, t)| t.row(*k)).collect(),
        boundary: bound.iter().map(|(k, t)| t.row(*k)).collect(),
        layouts: layouts
            .into_iter()
            .map(|(topology, (n, k))| LayoutRow {
                topology,
                n,
                correct: k,
                accuracy: 100.0 * k as f64 / n as f64,
            })
            .collect(),
        coordinate_invocation: (!coord.is_empty()).then(|| TopologyRates {
            cartesian: rate(Topology::Cartesian),
            polar: rate(Topology::Polar),
        }),
        size_mentions: sizes
            .into_iter()
            .map(|(topology, [c, i, u])| {
                let n = c + i + u;
                let pct = |x: usize| 100.0 * x as f64 / n as f64;
                SizeMentionRates {
                    topology,
                    n,
                    correct: pct(c),
                    incorrect: pct(i),
                    unmentioned: pct(u),
                }
            })
            .collect(),
        detector_note: DETECTOR_NOTE.to_string(),
    })
}

fn cell(v: Option<f64>) -> String {
    v.map_or_else(|| "-".to_string(), |x| format!("{x:.1}"))
}

fn table(out: &mut String, title: &str, rows: &[Row]) {
    let _ = writeln!(out, "\n{title}");
    let _ = writeln!(out, "{:<22} {:>7} {:>7} {:>7} {:>6} {:>6}", "", "C", "P", "delta", "n(C)", "n(P)");
    for r in rows {
        let _ = writeln!(
            out,
            "{:<22} {:>7} {:>7} {:>7} {:>6} {:>6}",
            r.key,
            cell(r.c_acc),
            cell(r.p_acc),
            cell(r.delta),
            r.c_n,
            r.p_n
        );
    }
}

impl AggregateReport {
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(
            out,
            "records {}  scored {}  parse failures {} (judged {}, unjudged {})  truncated {}",
            self.records, self.scored, self.parse_failures, self.judged, self.unjudged, self.truncated
        );
        table(&mut out, "Overall", std::slice::from_ref(&self.overall));
        table(&mut out, "By category", &self.categories);
        table(&mut out, "By task", &self.tasks);
        table(&mut out, "By alignment", &self.alignment);
        table(&mut out, "By boundary", &self.boundary);
        if !self.layouts.is_empty() {
            let _ = writeln!(out, "\nOther layouts");
            for l in &self.layouts {
                let _ = writeln!(out, "{:<22} {:>7.1} {:>6}", l.topology.as_str(), l.accuracy, l.n);
            }
        }
        if let Some(c) = &self.coordinate_invocation {
            let _ = writeln!(
                out,
                "\nCoordinate invocation rate: C {}  P {}\n({})",
                cell(c.cartesian),
                cell(c.polar),
                self.detector_note
            );
        }
        if !self.size_mentions.is_empty() {
            let _ = writeln!(out, "\nGrid size in captions (correct / incorrect / unmentioned)");
            for s in &self.size_mentions {
                let _ = writeln!(
                    out,
                    "{:<22} {:>6.1} {:>6.1} {:>6.1} {:>6}",
                    s.topology.as_str(),
                    s.correct,
                    s.incorrect,
                    s.unmentioned,
                    s.n
                );
            }
        }
        out
    }
}
