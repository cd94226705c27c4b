//! Prompting, querying, parsing, scoring and aggregation of model
//! evaluations over a generated dataset.

pub mod aggregate;
pub mod client;
pub mod detect;
pub mod parse;
pub mod prompt;
pub mod run;
pub mod stub;

pub use aggregate::{aggregate, AggregateReport, Row};
pub use client::{EndpointConfig, ModelClient, ModelReply, Reasoning};
pub use detect::{check_grid_size_mention, detect_coordinate_invocation, SizeMention};
pub use parse::{parse_answer, Parsed};
pub use prompt::{build_prompt, pick_exemplars, Message, Part, Prompt, PromptMode, Role};
pub use run::{read_records, run_eval, RunOptions, RunSummary, TopologyFilter};

use crate::taskgen::{Answer, Instance};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum EvalError {
    #[error("prompt: {0}")]
    Prompt(String),
    #[error("endpoint config {0}")]
    Config(String),
    #[error("transport: {0}")]
    Transport(String),
    #[error("endpoint returned HTTP {status}: {body}")]
    Http { status: u16, body: String },
    #[error("malformed endpoint response: {0}")]
    Response(String),
    #[error("{0}")]
    Io(String),
    #[error("records reference instances missing from the manifest: {}", .0.join(", "))]
    Orphans(Vec<String>),
}

/// One model answer to one instance under one prompt mode.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalRecord {
    pub instance_id: String,
    pub mode: PromptMode,
    #[serde(default)]
    pub repeat: u32,
    pub model: String,
    pub raw_response: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reasoning_trace: Option<String>,
    pub parsed: Parsed,
    /// `None` when the answer could not be parsed and no judge ruled on it.
    pub correct: Option<bool>,
    /// Answer supplied by the judge hook for an unparseable response.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub judge_answer: Option<Answer>,
    pub latency_ms: u64,
    #[serde(default)]
    pub truncated: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub coordinate_invocation: Option<bool>,
    /// Grid-size check of a caption (caption stage only).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub size_mention: Option<SizeMention>,
}

impl EvalRecord {
    pub fn key(&self) -> (String, PromptMode, u32) {
        (self.instance_id.clone(), self.mode, self.repeat)
    }
}

/// Fallback for responses whose format the parser cannot read. Consulted
/// only for `Parsed::Failed`.
pub trait Judge: Send + Sync {
    fn judge(&self, inst: &Instance, raw: &str) -> Option<Answer>;
}

/// Exact match on the answer union.
pub fn score(parsed: &Answer, truth: &Answer) -> bool {
    parsed.matches(truth)
}

/// Turn a model reply into a scored record.
pub fn make_record(
    inst: &Instance,
    mode: PromptMode,
    repeat: u32,
    model: &str,
    reply: ModelReply,
    judge: Option<&dyn Judge>,
) -> EvalRecord {
    let trace_text = reply.reasoning.clone().unwrap_or_else(|| reply.text.clone());
    let mut rec = EvalRecord {
        instance_id: inst.id.clone(),
        mode,
        repeat,
        model: model.to_string(),
        raw_response: reply.text,
        reasoning_trace: reply.reasoning,
        parsed: Parsed::Failed,
        correct: None,
        judge_answer: None,
        latency_ms: reply.latency_ms,
        truncated: reply.truncated,
        coordinate_invocation: None,
        size_mention: None,
    };
    if !mode.is_scored() {
        rec.size_mention = Some(check_grid_size_mention(&rec.raw_response, (inst.grid.major, inst.grid.minor)));
        return rec;
    }
    rec.coordinate_invocation = Some(detect_coordinate_invocation(&trace_text));
    rec.parsed = parse_answer(&rec.raw_response, inst.answer_type);
    match &rec.parsed {
        Parsed::Answer(a) => rec.correct = Some(score(a, &inst.ground_truth)),
        Parsed::Failed => {
            if let Some(a) = judge.and_then(|j| j.judge(inst, &rec.raw_response)) {
                rec.correct = Some(score(&a, &inst.ground_truth));
                rec.judge_answer = Some(a);
            }
        }
    }
    rec
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn list_order_matters_and_strings_fold_case() {
        assert!(score(&Answer::IntList(vec![5, 3]), &Answer::IntList(vec![5, 3])));
        assert!(!score(&Answer::IntList(vec![3, 5]), &Answer::IntList(vec![5, 3])));
        assert!(score(&Answer::Str(" cat ".into()), &Answer::Str("CAT".into())));
        assert!(score(&Answer::Coordinate(2, 5), &Answer::Coordinate(2, 5)));
        assert!(score(&Answer::OptionLabel("B".into()), &Answer::OptionLabel("B".into())));
    }
}
