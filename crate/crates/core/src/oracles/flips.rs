use super::{OracleError, OracleResult};
use crate::topology::Boundary;
use std::collections::VecDeque;

pub const MAX_FLIP_CELLS: usize = 14;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FlipOutcome {
    Moves(u32),
    Unreachable,
}

impl FlipOutcome {
    pub fn moves(self) -> Option<u32> {
        match self {
            FlipOutcome::Moves(n) => Some(n),
            FlipOutcome::Unreachable => None,
        }
    }
}

/// Alternating pattern of length `n` whose first cell is `first`.
pub fn alternating(n: usize, first: bool) -> Vec<bool> {
    (0..n).map(|i| (i % 2 == 0) == first).collect()
}

fn to_mask(bits: &[bool]) -> u32 {
    bits.iter().enumerate().fold(0, |m, (i, &b)| if b { m | (1 << i) } else { m })
}

/// Minimum number of contiguous `strip_len` flips turning `cells` into
/// `target`, by BFS over all 2^n states. Under `Wrapping` strips may cross
/// the seam between the last and first cell.
pub fn min_flip_moves(cells: &[bool], strip_len: usize, target: &[bool], boundary: Boundary) -> OracleResult<FlipOutcome> {
    let n = cells.len();
    if n > MAX_FLIP_CELLS {
        return Err(OracleError::TooLarge {
            size: n,
            limit: MAX_FLIP_CELLS,
        });
    }
    if target.len() != n {
        return Err(OracleError::Precondition("target length differs from pattern".into()));
    }
    if strip_len == 0 || strip_len > n {
        return Err(OracleError::Precondition(format!("strip length {strip_len} invalid for {n} cells")));
    }
    let starts = match boundary {
        Boundary::Bounded => n - strip_len + 1,
        Boundary::Wrapping => n,
    };
    let strips: Vec<u32> = (0..starts)
        .map(|s| (0..strip_len).fold(0u32, |m, k| m | (1 << ((s + k) % n))))
        .collect();
    let from = to_mask(cells);
    let goal = to_mask(target);
    let mut dist = vec![u32::MAX; 1 << n];
    dist[from as usize] = 0;
    let mut queue = VecDeque::from([from]);
    while let Some(s) = queue.pop_front() {
        let d = dist[s as usize];
        if s == goal {
            return Ok(FlipOutcome::Moves(d));
        }
        for &strip in &strips {
            let t = s ^ strip;
            if dist[t as usize] == u32::MAX {
                dist[t as usize] = d + 1;
                queue.push_back(t);
            }
        }
    }
    Ok(FlipOutcome::Unreachable)
}
