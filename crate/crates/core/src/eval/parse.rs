//! Final-answer extraction from free-form model output.

use crate::taskgen::{Answer, AnswerType};
use regex::Regex;
use serde::{Deserialize, Serialize};
use std::sync::LazyLock;

/// Result of parsing a response. Parsing never errors; unparseable text is
/// a `Failed` value that may be routed to a judge.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Parsed {
    Answer(Answer),
    Failed,
}

impl Parsed {
    pub fn answer(&self) -> Option<&Answer> {
        match self {
            Parsed::Answer(a) => Some(a),
            Parsed::Failed => None,
        }
    }
}

macro_rules! re {
    ($name:ident, $pat:expr) => {
        static $name: LazyLock<Regex> = LazyLock::new(|| Regex::new($pat).expect("valid regex"));
    };
}

re!(BOXED, r"\\boxed\{([^{}]*)\}");
re!(
    MARKER,
    r"(?i)\b(?:final\s+answer|answer|result|count|total|solution)\b(?:\s+(?:is|would\s+be|will\s+be|equals|=))?\s*[:=]?"
);
re!(LABEL_PAREN, r"(?i)\(\s*([a-f])\s*\)");
re!(LABEL_OPTION, r"(?i)\b(?:option|choice|panel|entrance|exit)\s+\(?([a-f])\b");
re!(LABEL_BARE, r"\b([A-F])\b");
re!(INTEGER, r"-?\d+(?:[.,/]\d+)?");
re!(TUPLE, r"\(\s*(\d+)\s*,\s*(\d+)\s*\)");
re!(
    AXIS_PAIR,
    r"(?i)\b(ring|row|sector|col|column)\s*(\d+)\s*(?:,|and|/)?\s*(ring|row|sector|col|column)\s*(\d+)"
);
re!(QUOTED, r#"["“'‘]([A-Za-z]+)["”'’]"#);
re!(LETTER_SEQ, r"^\s*([A-Za-z])(?:\s*[,\-–]\s*[A-Za-z])+\b");
re!(WORD, r"[A-Za-z]+");
re!(
    NUMBER_WORD,
    r"(?i)\b(zero|one|two|three|four|five|six|seven|eight|nine|ten|eleven|twelve|thirteen|fourteen|fifteen|sixteen|seventeen|eighteen|nineteen|twenty)\b"
);
re!(LIST, r"\[\s*(-?\d+(?:\s*,\s*-?\d+)*)\s*\]");
re!(BARE_LIST, r"^\s*(-?\d+(?:\s*,\s*-?\d+)+)");

fn clean(raw: &str) -> String {
    raw.replace("**", "").replace("__", "").replace('`', "")
}

/// Text following the last answer marker, up to the end of its line.
fn marker_region(text: &str) -> Option<&str> {
    if let Some(c) = BOXED.captures_iter(text).last() {
        return c.get(1).map(|m| m.as_str());
    }
    let m = MARKER.find_iter(text).last()?;
    let rest = &text[m.end()..];
    // "Answer:" alone on its line is followed by the answer on the next
    rest.split('\n').find(|l| !l.trim().is_empty())
}

fn label_in(region: &str, whole_region: bool) -> Option<String> {
    let mut found: Vec<(usize, String)> = Vec::new();
    for re in [&*LABEL_PAREN, &*LABEL_OPTION] {
        for c in re.captures_iter(region) {
            let m = c.get(1).unwrap();
            found.push((m.start(), m.as_str().to_ascii_uppercase()));
        }
    }
    if whole_region {
        for c in LABEL_BARE.captures_iter(region) {
            let m = c.get(1).unwrap();
            found.push((m.start(), m.as_str().to_string()));
        }
    }
    found.sort();
    // inside an answer region the first label is the answer; elsewhere the
    // last mention wins
    if whole_region {
        found.into_iter().next().map(|(_, l)| l)
    } else {
        found.into_iter().last().map(|(_, l)| l)
    }
}

fn parse_label(text: &str) -> Option<Answer> {
    if let Some(l) = marker_region(text).and_then(|r| label_in(r, true)) {
        return Some(Answer::OptionLabel(l));
    }
    let trimmed = text.trim().trim_matches(|c: char| !c.is_ascii_alphanumeric());
    if trimmed.len() == 1 && LABEL_BARE.is_match(trimmed) {
        return Some(Answer::OptionLabel(trimmed.to_string()));
    }
    label_in(text, false).map(Answer::OptionLabel)
}

fn integers(text: &str) -> Vec<i64> {
    INTEGER
        .find_iter(text)
        .filter(|m| !m.as_str().contains(['.', ',', '/']))
        .filter_map(|m| m.as_str().parse().ok())
        .collect()
}

const NUMBER_WORDS: [&str; 21] = [
    "zero", "one", "two", "three", "four", "five", "six", "seven", "eight", "nine", "ten", "eleven", "twelve",
    "thirteen", "fourteen", "fifteen", "sixteen", "seventeen", "eighteen", "nineteen", "twenty",
];

fn parse_digit(text: &str) -> Option<Answer> {
    if let Some(r) = marker_region(text) {
        if let Some(&n) = integers(r).first() {
            return Some(Answer::Digit(n));
        }
        if let Some(c) = NUMBER_WORD.captures(r) {
            let w = c[1].to_ascii_lowercase();
            return NUMBER_WORDS.iter().position(|x| *x == w).map(|n| Answer::Digit(n as i64));
        }
    }
    integers(text).last().map(|&n| Answer::Digit(n))
}

fn coordinate_in(text: &str) -> Option<(usize, usize, usize)> {
    let mut found = Vec::new();
    for c in TUPLE.captures_iter(text) {
        let (a, b) = (c[1].parse().ok()?, c[2].parse().ok()?);
        found.push((c.get(0).unwrap().start(), a, b));
    }
    for c in AXIS_PAIR.captures_iter(text) {
        let is_major = |s: &str| matches!(s.to_ascii_lowercase().as_str(), "ring" | "row");
        let (k1, k2) = (&c[1], &c[3]);
        if is_major(k1) == is_major(k2) {
            continue;
        }
        let (v1, v2): (usize, usize) = (c[2].parse().ok()?, c[4].parse().ok()?);
        let (a, b) = if is_major(k1) { (v1, v2) } else { (v2, v1) };
        found.push((c.get(0).unwrap().start(), a, b));
    }
    found.sort();
    found.into_iter().last()
}

fn parse_coordinate(text: &str) -> Option<Answer> {
    let region = marker_region(text).and_then(coordinate_in);
    region
        .or_else(|| coordinate_in(text))
        .map(|(_, a, b)| Answer::Coordinate(a, b))
}

fn str_in(region: &str) -> Option<String> {
    if let Some(c) = QUOTED.captures_iter(region).last() {
        return Some(c[1].to_string());
    }
    if let Some(m) = LETTER_SEQ.find(region) {
        return Some(m.as_str().chars().filter(char::is_ascii_alphabetic).collect());
    }
    let words: Vec<&str> = WORD.find_iter(region).map(|m| m.as_str()).collect();
    words
        .iter()
        .find(|w| w.len() > 1 && w.chars().all(|c| c.is_ascii_uppercase()))
        .or(words.first())
        .map(|w| w.to_string())
}

fn parse_str(text: &str) -> Option<Answer> {
    if let Some(s) = marker_region(text).and_then(str_in) {
        return Some(Answer::Str(s.to_ascii_uppercase()));
    }
    let last = text.lines().rev().find(|l| !l.trim().is_empty())?;
    if let Some(c) = QUOTED.captures_iter(last).last() {
        return Some(Answer::Str(c[1].to_ascii_uppercase()));
    }
    WORD.find_iter(last).last().map(|m| Answer::Str(m.as_str().to_ascii_uppercase()))
}

fn list_of(body: &str) -> Option<Vec<i64>> {
    body.split(',').map(|s| s.trim().parse().ok()).collect()
}

fn parse_list(text: &str) -> Option<Answer> {
    if let Some(r) = marker_region(text) {
        if let Some(c) = LIST.captures_iter(r).next() {
            return list_of(&c[1]).map(Answer::IntList);
        }
        if let Some(c) = BARE_LIST.captures(r) {
            return list_of(&c[1]).map(Answer::IntList);
        }
    }
    LIST.captures_iter(text)
        .last()
        .and_then(|c| list_of(&c[1]))
        .map(Answer::IntList)
}

/// Extract the final answer of the given format from a model response.
pub fn parse_answer(raw: &str, answer_type: AnswerType) -> Parsed {
    let text = clean(raw);
    let found = match answer_type {
        AnswerType::OptionLabel => parse_label(&text),
        AnswerType::Digit => parse_digit(&text),
        AnswerType::Coordinate => parse_coordinate(&text),
        AnswerType::Str => parse_str(&text),
        AnswerType::IntList => parse_list(&text),
    };
    found.map_or(Parsed::Failed, Parsed::Answer)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(raw: &str, t: AnswerType) -> Option<Answer> {
        parse_answer(raw, t).answer().cloned()
    }

    #[test]
    fn documented_examples() {
        assert_eq!(p("The answer is (B).", AnswerType::OptionLabel), Some(Answer::OptionLabel("B".into())));
        assert_eq!(p("… so the count is 13.", AnswerType::Digit), Some(Answer::Digit(13)));
        assert_eq!(p("lands at ring 2, sector 5", AnswerType::Coordinate), Some(Answer::Coordinate(2, 5)));
    }

    #[test]
    fn last_marker_wins() {
        let raw = "Answer: A? No wait.\nFinal answer: C";
        assert_eq!(p(raw, AnswerType::OptionLabel), Some(Answer::OptionLabel("C".into())));
    }

    #[test]
    fn empty_text_fails() {
        for t in [AnswerType::OptionLabel, AnswerType::Digit, AnswerType::Coordinate, AnswerType::Str, AnswerType::IntList] {
            assert_eq!(parse_answer("", t), Parsed::Failed);
        }
    }
}
