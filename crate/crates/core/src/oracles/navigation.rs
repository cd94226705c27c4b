use super::{OracleError, OracleResult};
use crate::topology::{neighbor_vec, step, CellEdge, CellRef, GridSpec, Heading, Step};
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet, VecDeque};

/// Wall segments keyed by [`CellEdge::normalized`].
pub type Walls = BTreeSet<CellEdge>;

/// The cell reached by leaving `cell` through its `heading` side, if that
/// side is neither the grid border nor a wall.
pub fn is_open(spec: &GridSpec, walls: &Walls, cell: CellRef, heading: Heading) -> Option<CellRef> {
    match step(cell, heading, spec) {
        Ok(Step::Moved(next)) if !walls.contains(&CellEdge::normalized(cell, heading, spec)) => Some(next),
        _ => None,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FollowerOutcome {
    Stopped,
    Loop,
}

/// Walk forward while the front side is open, rotating clockwise at walls.
pub fn simulate_wall_follower(
    spec: &GridSpec,
    walls: &Walls,
    start: CellRef,
    heading: Heading,
) -> OracleResult<(FollowerOutcome, CellRef)> {
    spec.check(start)?;
    let mut seen = BTreeSet::from([(start, heading)]);
    let (mut cell, mut heading) = (start, heading);
    let mut rotations = 0;
    loop {
        match is_open(spec, walls, cell, heading) {
            Some(next) => {
                cell = next;
                rotations = 0;
            }
            None => {
                heading = heading.turn_right();
                rotations += 1;
                if rotations == 4 {
                    return Ok((FollowerOutcome::Stopped, cell));
                }
            }
        }
        if !seen.insert((cell, heading)) {
            return Ok((FollowerOutcome::Loop, cell));
        }
    }
}

fn reachable_from(spec: &GridSpec, walls: &Walls, from: CellRef) -> BTreeSet<CellRef> {
    let mut seen = BTreeSet::from([from]);
    let mut queue = VecDeque::from([from]);
    while let Some(u) = queue.pop_front() {
        for h in Heading::ALL {
            if let Some(v) = is_open(spec, walls, u, h) {
                if seen.insert(v) {
                    queue.push_back(v);
                }
            }
        }
    }
    seen
}

/// Label of the only entrance connected to `exit` through open edges.
pub fn solve_maze_entrance(
    spec: &GridSpec,
    walls: &Walls,
    entrances: &[(String, CellRef)],
    exit: CellRef,
) -> OracleResult<String> {
    spec.check(exit)?;
    if entrances.len() < 2 {
        return Err(OracleError::Precondition("a maze needs at least two entrances".into()));
    }
    for (_, cell) in entrances {
        spec.check(*cell)?;
    }
    let reach = reachable_from(spec, walls, exit);
    let hits: Vec<&String> = entrances
        .iter()
        .filter(|(_, c)| reach.contains(c))
        .map(|(l, _)| l)
        .collect();
    match hits.as_slice() {
        [one] => Ok((*one).clone()),
        _ => Err(OracleError::Ambiguous(format!("{} entrances reach the exit", hits.len()))),
    }
}

/// Label of the only exit reachable from `start` by stepping to neighbours
/// with strictly larger values. Cells without a value cannot be entered.
pub fn solve_monotonic_exit(
    spec: &GridSpec,
    values: &BTreeMap<CellRef, i64>,
    start: CellRef,
    exits: &[(String, CellRef)],
) -> OracleResult<String> {
    spec.check(start)?;
    if !values.contains_key(&start) {
        return Err(OracleError::Precondition(format!("start {start} has no value")));
    }
    let mut seen = BTreeSet::from([start]);
    let mut stack = vec![start];
    while let Some(u) = stack.pop() {
        let vu = values[&u];
        for v in neighbor_vec(u, spec) {
            if values.get(&v).is_some_and(|&vv| vv > vu) && seen.insert(v) {
                stack.push(v);
            }
        }
    }
    let hits: Vec<&String> = exits.iter().filter(|(_, c)| seen.contains(c)).map(|(l, _)| l).collect();
    match hits.as_slice() {
        [one] => Ok((*one).clone()),
        _ => Err(OracleError::Ambiguous(format!("{} exits reachable", hits.len()))),
    }
}

/// Letters found immediately to the right of the walker at each path cell.
pub fn collect_right_hand_letters(
    spec: &GridSpec,
    path: &[(CellRef, Heading)],
    letters: &BTreeMap<CellRef, char>,
) -> OracleResult<String> {
    for pair in path.windows(2) {
        let ((a, h), (b, _)) = (pair[0], pair[1]);
        spec.check(a)?;
        if !neighbor_vec(a, spec).contains(&b) {
            return Err(OracleError::Precondition(format!("{a} and {b} are not adjacent")));
        }
        if step(a, h, spec)?.cell() != Some(b) {
            return Err(OracleError::Precondition(format!("heading at {a} does not lead to {b}")));
        }
    }
    let mut out = String::new();
    for &(cell, heading) in path {
        if let Step::Moved(right) = step(cell, heading.turn_right(), spec)? {
            if let Some(&ch) = letters.get(&right) {
                out.push(ch);
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::topology::Boundary;

    fn c(r: usize, m: usize) -> CellRef {
        CellRef::new(r, m)
    }

    fn all_walls(spec: &GridSpec) -> Walls {
        let mut w = Walls::new();
        for cell in spec.cells() {
            for h in Heading::ALL {
                w.insert(CellEdge::normalized(cell, h, spec));
            }
        }
        w
    }

    #[test]
    fn walled_cell_stops() {
        let spec = GridSpec::cartesian(1, 1, Boundary::Bounded);
        let out = simulate_wall_follower(&spec, &Walls::new(), c(0, 0), Heading::MinorPlus).unwrap();
        assert_eq!(out, (FollowerOutcome::Stopped, c(0, 0)));
    }

    #[test]
    fn corridor_ping_pong_loops() {
        let spec = GridSpec::cartesian(1, 3, Boundary::Bounded);
        let (outcome, cell) = simulate_wall_follower(&spec, &Walls::new(), c(0, 0), Heading::MinorPlus).unwrap();
        assert_eq!(outcome, FollowerOutcome::Loop);
        assert_eq!(cell, c(0, 0));
    }

    #[test]
    fn wrapping_ring_loops_forever_forward() {
        let spec = GridSpec::polar(1, 5, Boundary::Wrapping);
        let (outcome, cell) = simulate_wall_follower(&spec, &Walls::new(), c(0, 2), Heading::MinorPlus).unwrap();
        assert_eq!((outcome, cell), (FollowerOutcome::Loop, c(0, 2)));
    }

    #[test]
    fn maze_single_corridor() {
        let spec = GridSpec::cartesian(2, 3, Boundary::Bounded);
        let mut walls = all_walls(&spec);
        // open (0,0)-(1,0)-(1,1)
        walls.remove(&CellEdge::normalized(c(0, 0), Heading::MajorPlus, &spec));
        walls.remove(&CellEdge::normalized(c(1, 0), Heading::MinorPlus, &spec));
        let entrances = vec![("A".to_string(), c(1, 1)), ("B".to_string(), c(1, 2)), ("C".to_string(), c(0, 2))];
        assert_eq!(solve_maze_entrance(&spec, &walls, &entrances, c(0, 0)).unwrap(), "A");
        let relabeled: Vec<_> = entrances
            .iter()
            .zip(["Z", "Y", "X"])
            .map(|((_, cell), l)| (l.to_string(), *cell))
            .collect();
        assert_eq!(solve_maze_entrance(&spec, &walls, &relabeled, c(0, 0)).unwrap(), "Z");
        assert!(solve_maze_entrance(&spec, &Walls::new(), &entrances, c(0, 0)).is_err());
    }

    #[test]
    fn monotone_exit() {
        let spec = GridSpec::cartesian(2, 2, Boundary::Bounded);
        let values: BTreeMap<_, _> = [(c(0, 0), 5), (c(0, 1), 6), (c(1, 0), 1), (c(1, 1), 2)].into_iter().collect();
        let exits = vec![("A".to_string(), c(1, 0)), ("B".to_string(), c(0, 1))];
        assert_eq!(solve_monotonic_exit(&spec, &values, c(0, 0), &exits).unwrap(), "B");
    }

    #[test]
    fn right_hand_letters() {
        let spec = GridSpec::cartesian(2, 3, Boundary::Bounded);
        let path: Vec<_> = (0..3).map(|m| (c(0, m), Heading::MinorPlus)).collect();
        let none = BTreeMap::new();
        assert_eq!(collect_right_hand_letters(&spec, &path, &none).unwrap(), "");
        let letters: BTreeMap<_, _> = [(c(1, 0), 'C'), (c(1, 1), 'A'), (c(1, 2), 'T')].into_iter().collect();
        assert_eq!(collect_right_hand_letters(&spec, &path, &letters).unwrap(), "CAT");
        let broken = vec![(c(0, 0), Heading::MinorPlus), (c(1, 2), Heading::MinorPlus)];
        assert!(collect_right_hand_letters(&spec, &broken, &letters).is_err());
    }
}
