//! Lexical probes over reasoning traces and captions.
//!
//! The coordinate detector is a pattern match, an approximation of a
//! judge-model reading of the trace.

use regex::Regex;
use serde::{Deserialize, Serialize};
use std::sync::LazyLock;

static COORD_TUPLE: LazyLock<Regex> = LazyLock::new(|| Regex::new(r"\(\s*-?\d+\s*,\s*-?\d+\s*\)").unwrap());
static AXIS_INDEX: LazyLock<Regex> = LazyLock::new(|| Regex::new(r"(?i)\b(?:row|column|col)\s*#?\s*\d+").unwrap());

/// Does the trace address cells by Cartesian-style coordinates: an
/// `(int, int)` tuple or `row N` / `column N` / `col N`?
pub fn detect_coordinate_invocation(trace: &str) -> bool {
    COORD_TUPLE.is_match(trace) || AXIS_INDEX.is_match(trace)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SizeMention {
    Correct,
    Incorrect,
    Unmentioned,
}

static PAIR: LazyLock<Regex> = LazyLock::new(|| Regex::new(r"(?i)\b(\d+)\s*(?:x|×|by)\s*(\d+)\b").unwrap());
static MAJOR: LazyLock<Regex> = LazyLock::new(|| Regex::new(r"(?i)\b(\d+)\s+(?:concentric\s+)?(?:rings?|rows?)\b").unwrap());
static MINOR: LazyLock<Regex> =
    LazyLock::new(|| Regex::new(r"(?i)\b(\d+)\s+(?:angular\s+)?(?:sectors?|columns?|cols?|wedges?)\b").unwrap());

/// Compare grid dimensions stated in a caption with the true
/// `(major, minor)` size. `A x B` mentions may come in either order; counts
/// named by axis ("4 rings", "6 columns") are checked against that axis.
/// Only explicit contradictions count as incorrect.
pub fn check_grid_size_mention(caption: &str, expected: (usize, usize)) -> SizeMention {
    let (mut matches, mut contradictions) = (0, 0);
    let mut tally = |ok: bool| if ok { matches += 1 } else { contradictions += 1 };
    for c in PAIR.captures_iter(caption) {
        let (Ok(a), Ok(b)) = (c[1].parse::<usize>(), c[2].parse::<usize>()) else { continue };
        tally((a, b) == expected || (b, a) == expected);
    }
    for c in MAJOR.captures_iter(caption) {
        if let Ok(n) = c[1].parse::<usize>() {
            tally(n == expected.0);
        }
    }
    for c in MINOR.captures_iter(caption) {
        if let Ok(n) = c[1].parse::<usize>() {
            tally(n == expected.1);
        }
    }
    match (matches, contradictions) {
        (_, c) if c > 0 => SizeMention::Incorrect,
        (m, _) if m > 0 => SizeMention::Correct,
        _ => SizeMention::Unmentioned,
    }
}
