use super::catalog::AnswerType;
use serde::{Deserialize, Serialize};
use std::fmt;

pub const OPTION_LABELS: [&str; 6] = ["A", "B", "C", "D", "E", "F"];

/// A ground truth or a parsed model answer.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Answer {
    OptionLabel(String),
    Digit(i64),
    /// (major, minor): (row, column) or (ring, sector).
    Coordinate(usize, usize),
    Str(String),
    IntList(Vec<i64>),
}

impl Answer {
    pub fn answer_type(&self) -> AnswerType {
        match self {
            Answer::OptionLabel(_) => AnswerType::OptionLabel,
            Answer::Digit(_) => AnswerType::Digit,
            Answer::Coordinate(..) => AnswerType::Coordinate,
            Answer::Str(_) => AnswerType::Str,
            Answer::IntList(_) => AnswerType::IntList,
        }
    }

    /// Check the value-level invariants of the variant.
    pub fn well_formed(&self) -> Result<(), String> {
        match self {
            Answer::OptionLabel(l) if !OPTION_LABELS.contains(&l.as_str()) => Err(format!("label {l:?} is not in A..F")),
            Answer::IntList(v) if v.windows(2).any(|w| w[0] < w[1]) => Err(format!("list {v:?} is not descending")),
            _ => Ok(()),
        }
    }

    /// Exact-match comparison; strings compare case-insensitively after
    /// trimming.
    pub fn matches(&self, other: &Answer) -> bool {
        match (self, other) {
            (Answer::Str(a), Answer::Str(b)) => a.trim().eq_ignore_ascii_case(b.trim()),
            (Answer::OptionLabel(a), Answer::OptionLabel(b)) => a.trim().eq_ignore_ascii_case(b.trim()),
            _ => self == other,
        }
    }
}

impl fmt::Display for Answer {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Answer::OptionLabel(l) => f.write_str(l),
            Answer::Digit(d) => write!(f, "{d}"),
            Answer::Coordinate(a, b) => write!(f, "({a}, {b})"),
            Answer::Str(s) => f.write_str(s),
            Answer::IntList(v) => {
                let parts: Vec<String> = v.iter().map(|x| x.to_string()).collect();
                write!(f, "[{}]", parts.join(", "))
            }
        }
    }
}

/// One labelled choice. `value` is the canonical content the oracle result
/// is matched against; `text` is what the prompt shows.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OptionEntry {
    pub label: String,
    pub text: String,
    pub value: String,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn external_tagging() {
        assert_eq!(serde_json::to_string(&Answer::OptionLabel("B".into())).unwrap(), r#"{"option_label":"B"}"#);
        assert_eq!(serde_json::to_string(&Answer::Coordinate(2, 5)).unwrap(), r#"{"coordinate":[2,5]}"#);
        assert_eq!(serde_json::to_string(&Answer::IntList(vec![5, 3])).unwrap(), r#"{"int_list":[5,3]}"#);
        let back: Answer = serde_json::from_str(r#"{"digit":13}"#).unwrap();
        assert_eq!(back, Answer::Digit(13));
    }

    #[test]
    fn invariants() {
        assert!(Answer::OptionLabel("G".into()).well_formed().is_err());
        assert!(Answer::IntList(vec![3, 5]).well_formed().is_err());
        assert!(Answer::IntList(vec![5, 3, 3]).well_formed().is_ok());
        assert!(Answer::Str("Cat ".into()).matches(&Answer::Str("cat".into())));
        assert!(!Answer::Digit(3).matches(&Answer::Digit(4)));
    }
}
