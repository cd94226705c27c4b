use super::{OracleError, OracleResult};
use crate::topology::{Boundary, CellRef, GridSpec};
use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Move {
    pub d_major: isize,
    pub d_minor: isize,
    /// Whether the move may cross the minor-axis seam on a wrapping grid.
    pub wraps: bool,
}

impl Move {
    pub const fn new(d_major: isize, d_minor: isize, wraps: bool) -> Self {
        Move { d_major, d_minor, wraps }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MoveSet {
    pub moves: Vec<Move>,
}

impl MoveSet {
    pub fn new(moves: Vec<Move>) -> OracleResult<Self> {
        if moves.is_empty() {
            return Err(OracleError::Precondition("empty move set".into()));
        }
        if moves.iter().any(|m| m.d_major == 0 && m.d_minor == 0) {
            return Err(OracleError::Precondition("zero move".into()));
        }
        Ok(MoveSet { moves })
    }

    /// Down (major+1) and right (minor+1).
    pub fn right_down() -> Self {
        MoveSet {
            moves: vec![Move::new(0, 1, false), Move::new(1, 0, false)],
        }
    }

    /// Right, down and the down-right diagonal.
    pub fn lattice() -> Self {
        MoveSet {
            moves: vec![Move::new(0, 1, false), Move::new(1, 0, false), Move::new(1, 1, false)],
        }
    }

    /// The eight knight jumps, all eligible to wrap the minor axis.
    pub fn knight() -> Self {
        let mut moves = Vec::new();
        for (a, b) in [(1, 2), (2, 1)] {
            for sa in [-1, 1] {
                for sb in [-1, 1] {
                    moves.push(Move::new(a * sa, b * sb, true));
                }
            }
        }
        MoveSet { moves }
    }

    /// Direction along which every move strictly increases, if one exists
    /// and no move can wrap along it.
    fn potential(&self, spec: &GridSpec) -> Option<(isize, isize)> {
        const CANDIDATES: [(isize, isize); 8] = [(1, 0), (0, 1), (1, 1), (-1, 0), (0, -1), (-1, -1), (1, -1), (-1, 1)];
        CANDIDATES.into_iter().find(|&(a, b)| {
            self.moves.iter().all(|m| {
                let wraps = m.wraps && spec.boundary == Boundary::Wrapping;
                a * m.d_major + b * m.d_minor > 0 && !(wraps && b != 0)
            })
        })
    }
}

/// Number of move sequences from `start` to `end` avoiding `blocked`,
/// optionally required to pass through `checkpoint`.
pub fn count_monotone_paths(
    spec: &GridSpec,
    moves: &MoveSet,
    start: CellRef,
    end: CellRef,
    blocked: &BTreeSet<CellRef>,
    checkpoint: Option<CellRef>,
) -> OracleResult<u128> {
    spec.check(start)?;
    spec.check(end)?;
    if let Some(cp) = checkpoint {
        spec.check(cp)?;
    }
    if blocked.contains(&start) || blocked.contains(&end) {
        return Err(OracleError::Precondition("start or end is blocked".into()));
    }
    if moves.potential(spec).is_none() {
        return Err(OracleError::NonMonotone);
    }
    // memo[(cell, passed)] = paths from this state to `end`
    let n = spec.major * spec.minor;
    let mut memo: Vec<Option<u128>> = vec![None; n * 2];
    fn go(
        spec: &GridSpec,
        moves: &MoveSet,
        cell: CellRef,
        passed: bool,
        end: CellRef,
        blocked: &BTreeSet<CellRef>,
        checkpoint: Option<CellRef>,
        memo: &mut Vec<Option<u128>>,
    ) -> OracleResult<u128> {
        let passed = passed || checkpoint == Some(cell);
        let key = spec.index(cell) * 2 + passed as usize;
        if let Some(v) = memo[key] {
            return Ok(v);
        }
        let mut total: u128 = if cell == end && (checkpoint.is_none() || passed) { 1 } else { 0 };
        for m in &moves.moves {
            if let Some(next) = spec.offset(cell, m.d_major, m.d_minor, m.wraps) {
                if blocked.contains(&next) {
                    continue;
                }
                let sub = go(spec, moves, next, passed, end, blocked, checkpoint, memo)?;
                total = total.checked_add(sub).ok_or(OracleError::Overflow)?;
            }
        }
        memo[key] = Some(total);
        Ok(total)
    }
    go(spec, moves, start, false, end, blocked, checkpoint, &mut memo)
}

/// Number of length-`k` walks from `start` ending at `target`.
pub fn count_fixed_length_walks(
    spec: &GridSpec,
    moves: &MoveSet,
    start: CellRef,
    target: CellRef,
    k: usize,
) -> OracleResult<u128> {
    spec.check(start)?;
    spec.check(target)?;
    let n = spec.major * spec.minor;
    let mut counts = vec![0u128; n];
    counts[spec.index(start)] = 1;
    for _ in 0..k {
        let mut next = vec![0u128; n];
        for cell in spec.cells() {
            let c = counts[spec.index(cell)];
            if c == 0 {
                continue;
            }
            for m in &moves.moves {
                if let Some(to) = spec.offset(cell, m.d_major, m.d_minor, m.wraps) {
                    let slot = &mut next[spec.index(to)];
                    *slot = slot.checked_add(c).ok_or(OracleError::Overflow)?;
                }
            }
        }
        counts = next;
    }
    Ok(counts[spec.index(target)])
}
