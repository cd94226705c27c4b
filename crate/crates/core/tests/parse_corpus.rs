use polarbench::eval::{parse_answer, Parsed};
use polarbench::taskgen::{Answer, AnswerType};
use serde::Deserialize;

#[derive(Deserialize)]
struct Case {
    answer_type: AnswerType,
    response: String,
    expected: Option<Answer>,
}

fn corpus() -> Vec<Case> {
    let text = include_str!("data/parse_corpus.jsonl");
    text.lines()
        .filter(|l| !l.trim().is_empty())
        .map(|l| serde_json::from_str(l).unwrap())
        .collect()
}

#[test]
fn golden_corpus_parses_exactly() {
    let cases = corpus();
    assert!(cases.len() >= 50);
    let mut failures = Vec::new();
    for c in &cases {
        let want = c.expected.clone().map_or(Parsed::Failed, Parsed::Answer);
        let got = parse_answer(&c.response, c.answer_type);
        if got != want {
            failures.push(format!("{:?}: expected {want:?}, got {got:?}", c.response));
        }
    }
    assert!(failures.is_empty(), "{}", failures.join("\n"));
}

#[test]
fn corpus_covers_every_answer_type() {
    let cases = corpus();
    for t in [
        AnswerType::OptionLabel,
        AnswerType::Digit,
        AnswerType::Coordinate,
        AnswerType::Str,
        AnswerType::IntList,
    ] {
        assert!(cases.iter().filter(|c| c.answer_type == t).count() >= 5, "{t:?}");
        assert!(cases.iter().any(|c| c.answer_type == t && c.expected.is_none()), "{t:?} has no failure case");
    }
}
