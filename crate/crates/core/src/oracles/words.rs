use super::{OracleError, OracleResult};
use crate::topology::{neighbor_vec, CellRef, GridSpec};
use std::collections::BTreeMap;

/// Number of neighbour walks from `start` whose letters spell `word`.
/// Cells may be revisited.
pub fn count_word_paths(
    spec: &GridSpec,
    letters: &BTreeMap<CellRef, char>,
    word: &str,
    start: CellRef,
) -> OracleResult<u128> {
    spec.check(start)?;
    let chars: Vec<char> = word.chars().collect();
    let Some(&first) = chars.first() else {
        return Err(OracleError::Precondition("empty word".into()));
    };
    if letters.get(&start) != Some(&first) {
        return Err(OracleError::Precondition(format!("start {start} does not hold {first:?}")));
    }
    let mut ways: BTreeMap<CellRef, u128> = BTreeMap::from([(start, 1)]);
    for &ch in &chars[1..] {
        let mut next: BTreeMap<CellRef, u128> = BTreeMap::new();
        for (&cell, &w) in &ways {
            for n in neighbor_vec(cell, spec) {
                if letters.get(&n) == Some(&ch) {
                    let slot = next.entry(n).or_default();
                    *slot = slot.checked_add(w).ok_or(OracleError::Overflow)?;
                }
            }
        }
        ways = next;
    }
    ways.values().try_fold(0u128, |acc, &w| acc.checked_add(w).ok_or(OracleError::Overflow))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::topology::{Boundary, Topology};

    fn filled(spec: &GridSpec, ch: char) -> BTreeMap<CellRef, char> {
        spec.cells().map(|c| (c, ch)).collect()
    }

    #[test]
    fn single_letter() {
        let spec = GridSpec::cartesian(2, 2, Boundary::Bounded);
        assert_eq!(count_word_paths(&spec, &filled(&spec, 'A'), "A", CellRef::new(0, 0)).unwrap(), 1);
    }

    #[test]
    fn center_degree() {
        let spec = GridSpec::cartesian(3, 3, Boundary::Bounded);
        assert_eq!(count_word_paths(&spec, &filled(&spec, 'A'), "AA", CellRef::new(1, 1)).unwrap(), 4);
        // walks may come back: A-A-A from the centre is 4 * (deg of edge cells = 3)
        assert_eq!(count_word_paths(&spec, &filled(&spec, 'A'), "AAA", CellRef::new(1, 1)).unwrap(), 12);
    }

    #[test]
    fn hex_flower_degree() {
        let spec = GridSpec::new(Topology::Hexagonal, 3, 3, Boundary::Bounded).unwrap();
        let mut letters = filled(&spec, 'B');
        letters.insert(CellRef::new(1, 1), 'A');
        assert_eq!(count_word_paths(&spec, &letters, "AB", CellRef::new(1, 1)).unwrap(), 6);
    }

    #[test]
    fn start_mismatch() {
        let spec = GridSpec::cartesian(2, 2, Boundary::Bounded);
        assert!(count_word_paths(&spec, &filled(&spec, 'A'), "BA", CellRef::new(0, 0)).is_err());
    }
}
