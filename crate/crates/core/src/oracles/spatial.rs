use super::{OracleError, OracleResult};
use crate::topology::{neighbor_vec, CellRef, GridSpec, Topology};
use std::collections::{BTreeMap, BTreeSet, VecDeque};

fn component(spec: &GridSpec, members: &BTreeSet<CellRef>, seed: CellRef) -> BTreeSet<CellRef> {
    let mut seen = BTreeSet::from([seed]);
    let mut queue = VecDeque::from([seed]);
    while let Some(u) = queue.pop_front() {
        for v in neighbor_vec(u, spec) {
            if members.contains(&v) && seen.insert(v) {
                queue.push_back(v);
            }
        }
    }
    seen
}

/// Size of the shaded component containing `seed`.
pub fn connected_region_size(spec: &GridSpec, shaded: &BTreeSet<CellRef>, seed: CellRef) -> OracleResult<usize> {
    spec.check(seed)?;
    if !shaded.contains(&seed) {
        return Err(OracleError::Precondition(format!("seed {seed} is not shaded")));
    }
    Ok(component(spec, shaded, seed).len())
}

fn has_hamiltonian_path(spec: &GridSpec, cells: &BTreeSet<CellRef>) -> bool {
    fn extend(spec: &GridSpec, cells: &BTreeSet<CellRef>, at: CellRef, used: &mut BTreeSet<CellRef>) -> bool {
        if used.len() == cells.len() {
            return true;
        }
        for v in neighbor_vec(at, spec) {
            if cells.contains(&v) && !used.contains(&v) {
                used.insert(v);
                if extend(spec, cells, v, used) {
                    return true;
                }
                used.remove(&v);
            }
        }
        false
    }
    cells.iter().any(|&s| {
        let mut used = BTreeSet::from([s]);
        extend(spec, cells, s, &mut used)
    })
}

/// Sizes of the colour classes, largest first. Every cell must be coloured
/// and every class must be traversable as a single simple path.
pub fn pipe_lengths<C: Ord + Clone>(spec: &GridSpec, coloring: &BTreeMap<CellRef, C>) -> OracleResult<Vec<usize>> {
    let mut classes: BTreeMap<C, BTreeSet<CellRef>> = BTreeMap::new();
    for cell in spec.cells() {
        let color = coloring
            .get(&cell)
            .ok_or_else(|| OracleError::Precondition(format!("cell {cell} has no colour")))?;
        classes.entry(color.clone()).or_default().insert(cell);
    }
    if coloring.len() != spec.cell_count() {
        return Err(OracleError::Precondition("colouring names cells outside the grid".into()));
    }
    let mut out = Vec::with_capacity(classes.len());
    for cells in classes.values() {
        let first = *cells.iter().next().expect("classes are non-empty");
        if component(spec, cells, first).len() != cells.len() {
            return Err(OracleError::Precondition(format!("pipe through {first} is disconnected")));
        }
        if !has_hamiltonian_path(spec, cells) {
            return Err(OracleError::Precondition(format!("pipe through {first} is not a simple path")));
        }
        out.push(cells.len());
    }
    out.sort_unstable_by(|a, b| b.cmp(a));
    Ok(out)
}

/// Rotate a fill map clockwise by `quarter_turns` quarter turns.
pub fn rotate_grid<V: Clone>(
    spec: &GridSpec,
    fills: &BTreeMap<CellRef, V>,
    quarter_turns: usize,
) -> OracleResult<BTreeMap<CellRef, V>> {
    let q = quarter_turns % 4;
    match spec.topology {
        Topology::Cartesian => {
            if spec.major != spec.minor {
                return Err(OracleError::Precondition("cartesian rotation needs a square grid".into()));
            }
        }
        Topology::Polar => {
            if spec.minor % 4 != 0 {
                return Err(OracleError::Precondition("polar rotation needs a sector count divisible by 4".into()));
            }
        }
        other => return Err(OracleError::Precondition(format!("cannot rotate a {} grid", other.as_str()))),
    }
    let mut out = BTreeMap::new();
    for (&cell, v) in fills {
        spec.check(cell)?;
        let mut at = cell;
        for _ in 0..q {
            at = match spec.topology {
                Topology::Polar => CellRef::new(at.major, (at.minor + spec.minor / 4) % spec.minor),
                _ => CellRef::new(at.minor, spec.major - 1 - at.major),
            };
        }
        out.insert(at, v.clone());
    }
    Ok(out)
}
