use super::EvalError;
use crate::taskgen::{Answer, AnswerType, Instance};
use crate::topology::Topology;
use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;

pub const FEW_SHOT_K: usize = 5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PromptMode {
    Standard,
    ConversionHint,
    FewShot,
    TwoStageCaption,
    TwoStageAnswer,
}

impl PromptMode {
    pub const ALL: [PromptMode; 5] = [
        PromptMode::Standard,
        PromptMode::ConversionHint,
        PromptMode::FewShot,
        PromptMode::TwoStageCaption,
        PromptMode::TwoStageAnswer,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            PromptMode::Standard => "standard",
            PromptMode::ConversionHint => "conversion_hint",
            PromptMode::FewShot => "few_shot",
            PromptMode::TwoStageCaption => "two_stage_caption",
            PromptMode::TwoStageAnswer => "two_stage_answer",
        }
    }

    /// Whether records of this mode carry a scored answer.
    pub fn is_scored(self) -> bool {
        self != PromptMode::TwoStageCaption
    }
}

impl fmt::Display for PromptMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for PromptMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.replace('-', "_");
        PromptMode::ALL
            .into_iter()
            .find(|m| m.as_str() == s)
            .ok_or_else(|| format!("unknown prompt mode `{s}`"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Role {
    System,
    User,
    Assistant,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "type")]
pub enum Part {
    Text { text: String },
    /// Reference to an instance image; the client loads and encodes it.
    Image { instance_id: String },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Message {
    pub role: Role,
    pub parts: Vec<Part>,
}

impl Message {
    fn new(role: Role) -> Self {
        Message { role, parts: Vec::new() }
    }

    fn text(mut self, t: impl Into<String>) -> Self {
        self.parts.push(Part::Text { text: t.into() });
        self
    }

    fn image(mut self, inst: &Instance) -> Self {
        self.parts.push(Part::Image {
            instance_id: inst.id.clone(),
        });
        self
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Prompt {
    pub instance_id: String,
    pub mode: PromptMode,
    pub messages: Vec<Message>,
}

impl Prompt {
    /// Image references in message order.
    pub fn images(&self) -> Vec<&str> {
        self.messages
            .iter()
            .flat_map(|m| &m.parts)
            .filter_map(|p| match p {
                Part::Image { instance_id } => Some(instance_id.as_str()),
                Part::Text { .. } => None,
            })
            .collect()
    }

    pub fn text(&self) -> String {
        self.messages
            .iter()
            .flat_map(|m| &m.parts)
            .filter_map(|p| match p {
                Part::Text { text } => Some(text.as_str()),
                Part::Image { .. } => None,
            })
            .collect::<Vec<_>>()
            .join("\n")
    }
}

const SYSTEM: &str = "You are taking a visual reasoning test. Each question comes with an image of a grid puzzle.";

fn format_instruction(t: AnswerType, topology: Topology) -> String {
    let coord = match topology {
        Topology::Polar => "(ring, sector)",
        _ => "(row, column)",
    };
    let what = match t {
        AnswerType::OptionLabel => "the letter of the correct option, e.g. Answer: B".to_string(),
        AnswerType::Digit => "a single integer, e.g. Answer: 12".to_string(),
        AnswerType::Coordinate => format!("a {coord} pair of indices, e.g. Answer: (2, 5)"),
        AnswerType::Str => "the letters with no spaces, e.g. Answer: ABC".to_string(),
        AnswerType::IntList => "a bracketed list in descending order, e.g. Answer: [5, 3, 3]".to_string(),
    };
    format!("Think it through, then finish with a final line of the form \"Answer: ...\" containing {what}.")
}

fn question_block(inst: &Instance) -> String {
    let mut q = inst.question.clone();
    if let Some(opts) = &inst.options {
        q.push_str("\n\nOptions:");
        for o in opts {
            q.push_str(&format!("\n({}) {}", o.label, o.text));
        }
    }
    q
}

const CONVERSION_HINT: &str = "Hint: before solving, redraw the circular layout as an ordinary rectangular grid. \
Each ring becomes a row, with ring 0 (the innermost) as row 0. Each sector becomes a column, with sector 0 \
at 12 o'clock as column 0 and sector numbers increasing clockwise. When the puzzle says the first and last \
sectors are neighbours, treat the first and last columns as neighbours too. Then solve the puzzle on that grid.";

fn answer_line(a: &Answer) -> String {
    format!("Answer: {a}")
}

/// Build the message sequence for one instance. `exemplars` is required
/// for few-shot prompting and `caption` for the caption-only answer stage.
pub fn build_prompt(
    inst: &Instance,
    mode: PromptMode,
    exemplars: &[&Instance],
    caption: Option<&str>,
) -> Result<Prompt, EvalError> {
    let system = Message::new(Role::System).text(SYSTEM);
    let format = format_instruction(inst.answer_type, inst.topology);
    let mut messages = vec![system];
    match mode {
        PromptMode::Standard | PromptMode::ConversionHint => {
            let mut m = Message::new(Role::User).text("Look at the image and answer the question.").image(inst);
            if mode == PromptMode::ConversionHint && inst.topology == Topology::Polar {
                m = m.text(CONVERSION_HINT);
            }
            messages.push(m.text(question_block(inst)).text(format));
        }
        PromptMode::FewShot => {
            if exemplars.len() < FEW_SHOT_K {
                return Err(EvalError::Prompt(format!(
                    "few-shot needs {FEW_SHOT_K} exemplars, got {}",
                    exemplars.len()
                )));
            }
            for ex in &exemplars[..FEW_SHOT_K] {
                if ex.task_id != inst.task_id || ex.topology != Topology::Polar || ex.seed == inst.seed {
                    return Err(EvalError::Prompt(format!("{} is not a valid exemplar for {}", ex.id, inst.id)));
                }
                messages.push(
                    Message::new(Role::User)
                        .image(ex)
                        .text(question_block(ex))
                        .text(format_instruction(ex.answer_type, ex.topology)),
                );
                messages.push(Message::new(Role::Assistant).text(answer_line(&ex.ground_truth)));
            }
            messages.push(
                Message::new(Role::User)
                    .image(inst)
                    .text(question_block(inst))
                    .text(format),
            );
        }
        PromptMode::TwoStageCaption => {
            messages.push(Message::new(Role::User).image(inst).text(
                "Describe this image in as much detail as you can: the overall layout, how many rows/rings and \
columns/sectors it has, and the content of every cell that is marked, coloured or labelled. Your description \
will later be given, without the image, to someone who must answer a question about the picture.",
            ));
        }
        PromptMode::TwoStageAnswer => {
            let caption = caption.ok_or_else(|| EvalError::Prompt("caption-only answering needs a caption".into()))?;
            messages.push(
                Message::new(Role::User)
                    .text(format!(
                        "You cannot see the image. Here is a description of it:\n\n{caption}"
                    ))
                    .text(question_block(inst))
                    .text(format),
            );
        }
    }
    Ok(Prompt {
        instance_id: inst.id.clone(),
        mode,
        messages,
    })
}

/// Five Polar instances of the same task with the seeds closest above the
/// target's (wrapping around to the smallest), excluding the target seed.
pub fn pick_exemplars<'a>(inst: &Instance, pool: &'a [Instance]) -> Vec<&'a Instance> {
    let mut cands: Vec<&Instance> = pool
        .iter()
        .filter(|p| p.task_id == inst.task_id && p.topology == Topology::Polar && p.seed != inst.seed)
        .collect();
    cands.sort_by_key(|p| (p.seed < inst.seed, p.seed));
    cands.truncate(FEW_SHOT_K);
    cands
}
