//! Human-baseline table computed from the rater log alone.

use super::store::{RaterResponse, Verdict};
use crate::taskgen::Category;
use crate::topology::Topology;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerdictCell {
    pub n: usize,
    pub correct_pct: f64,
    pub idk_pct: f64,
    pub incorrect_pct: f64,
    pub avg_minutes: f64,
}

impl VerdictCell {
    fn of(rs: &[&RaterResponse]) -> Option<VerdictCell> {
        if rs.is_empty() {
            return None;
        }
        let n = rs.len();
        let pct = |v: Verdict| 100.0 * rs.iter().filter(|r| r.verdict == v).count() as f64 / n as f64;
        Some(VerdictCell {
            n,
            correct_pct: pct(Verdict::Correct),
            idk_pct: pct(Verdict::IDontKnow),
            incorrect_pct: pct(Verdict::Incorrect),
            avg_minutes: rs.iter().map(|r| r.elapsed_s).sum::<f64>() / 60.0 / n as f64,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HumanRow {
    /// Category title, or "Overall".
    pub category: String,
    pub all: VerdictCell,
    pub cartesian: Option<VerdictCell>,
    pub polar: Option<VerdictCell>,
    /// Cartesian minus Polar correct percentage.
    pub delta_acc: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HumanReport {
    pub responses: usize,
    pub rows: Vec<HumanRow>,
}

fn row(category: String, rs: &[&RaterResponse]) -> Option<HumanRow> {
    let all = VerdictCell::of(rs)?;
    let side = |t: Topology| {
        let v: Vec<&RaterResponse> = rs.iter().copied().filter(|r| r.topology == t).collect();
        VerdictCell::of(&v)
    };
    let (cartesian, polar) = (side(Topology::Cartesian), side(Topology::Polar));
    let delta_acc = cartesian
        .as_ref()
        .zip(polar.as_ref())
        .map(|(c, p)| c.correct_pct - p.correct_pct);
    Some(HumanRow {
        category,
        all,
        cartesian,
        polar,
        delta_acc,
    })
}

/// Per-category verdict shares, mean time in minutes and the Cartesian vs
/// Polar split, followed by an overall row.
pub fn human_report(responses: &[RaterResponse]) -> HumanReport {
    let mut by_cat: BTreeMap<Category, Vec<&RaterResponse>> = BTreeMap::new();
    for r in responses {
        by_cat.entry(r.category).or_default().push(r);
    }
    let mut rows: Vec<HumanRow> = by_cat
        .iter()
        .filter_map(|(c, rs)| row(c.title().to_string(), rs))
        .collect();
    let all: Vec<&RaterResponse> = responses.iter().collect();
    rows.extend(row("Overall".to_string(), &all));
    HumanReport {
        responses: responses.len(),
        rows,
    }
}
