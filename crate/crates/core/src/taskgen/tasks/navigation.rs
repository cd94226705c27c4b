use super::{draft, draw, random_cell, seam_note, turn_rule, Draft, GenRng, Layout};
use crate::oracles::{
    count_word_paths, is_open, simulate_wall_follower, solve_maze_entrance, solve_monotonic_exit, FollowerOutcome,
    OracleError, Walls,
};
use crate::render::{Glyph, MarkerKind, Overlay, SceneSpec};
use crate::taskgen::answer::{Answer, OPTION_LABELS};
use crate::taskgen::catalog::Ranges;
use crate::taskgen::puzzle::{base_scene, Choice, Puzzle, Solution, TaskPuzzle, Vocab, EXIT, HIGHLIGHT, INK, START};
use crate::topology::{neighbor_vec, step, Boundary, CellEdge, CellRef, GridSpec, Heading, Step, Topology};
use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet};

/// Heading leading from `a` to the adjacent cell `b`.
fn heading_between(grid: &GridSpec, a: CellRef, b: CellRef) -> Option<Heading> {
    Heading::ALL.into_iter().find(|&h| step(a, h, grid).ok() == Some(Step::Moved(b)))
}

fn wall_overlays(scene: &mut SceneSpec, walls: &Walls) {
    for w in walls {
        scene.overlays.push(Overlay::Wall {
            cell: w.cell,
            side: w.side,
        });
    }
}

// ------------------------------------------------------------------ maze

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Maze {
    pub walls: Walls,
    /// Labelled entrance cells on the outermost row or ring.
    pub entrances: Vec<(String, CellRef)>,
    pub exit: CellRef,
    /// Entrance whose tree path was left intact during carving.
    pub carved: String,
}

impl TaskPuzzle for Maze {
    fn solve(&self, grid: &GridSpec) -> Result<Solution, OracleError> {
        Ok(Solution::Choice(solve_maze_entrance(grid, &self.walls, &self.entrances, self.exit)?))
    }

    fn choices(&self, _grid: &GridSpec) -> Option<Vec<Choice>> {
        Some(
            self.entrances
                .iter()
                .map(|(l, _)| Choice {
                    text: format!("entrance {l}"),
                    value: l.clone(),
                })
                .collect(),
        )
    }

    fn scene(&self, grid: &GridSpec) -> SceneSpec {
        let mut scene = base_scene(grid);
        wall_overlays(&mut scene, &self.walls);
        for (label, cell) in &self.entrances {
            scene.overlays.push(Overlay::EdgeLabel {
                cell: *cell,
                side: Heading::MajorPlus,
                text: label.clone(),
            });
        }
        scene.cell_fills.insert(self.exit, EXIT.into());
        scene.overlays.push(Overlay::Marker {
            cell: self.exit,
            marker: MarkerKind::Square,
            color: INK.into(),
        });
        scene
    }

    fn question(&self, grid: &GridSpec) -> String {
        let v = Vocab::of(grid.topology);
        let edge = match grid.topology {
            Topology::Polar => "outer rim",
            _ => "bottom edge",
        };
        format!(
            "The maze has {} {} and {} {}. The entrances are labelled along the {edge}, and the exit is the marked cell in {} 0. Which entrance is connected to the exit?",
            grid.major, v.rows, grid.minor, v.cols, v.row
        )
    }

    fn planted(&self) -> Option<Answer> {
        Some(Answer::OptionLabel(self.carved.clone()))
    }
}

/// Random depth-first spanning tree; returns the parent map rooted at `root`.
fn spanning_tree(rng: &mut GenRng, grid: &GridSpec, root: CellRef) -> BTreeMap<CellRef, CellRef> {
    let mut parent = BTreeMap::new();
    let mut seen = BTreeSet::from([root]);
    let mut stack = vec![root];
    while let Some(&top) = stack.last() {
        let mut options: Vec<CellRef> = neighbor_vec(top, grid).into_iter().filter(|n| !seen.contains(n)).collect();
        if options.is_empty() {
            stack.pop();
            continue;
        }
        options.shuffle(rng);
        let next = options[0];
        seen.insert(next);
        parent.insert(next, top);
        stack.push(next);
    }
    parent
}

fn tree_path(parent: &BTreeMap<CellRef, CellRef>, from: CellRef) -> Vec<CellRef> {
    let mut path = vec![from];
    let mut at = from;
    while let Some(&p) = parent.get(&at) {
        path.push(p);
        at = p;
    }
    path
}

fn edge_key(grid: &GridSpec, a: CellRef, b: CellRef) -> Option<CellEdge> {
    heading_between(grid, a, b).map(|h| CellEdge::normalized(a, h, grid))
}

pub(super) fn build_maze(rng: &mut GenRng, ranges: &Ranges, layout: &Layout) -> Result<Draft, String> {
    let (major, minor) = (draw(rng, ranges.major), draw(rng, ranges.minor));
    let [grid, _] = layout.grids(major, minor);
    let exit = CellRef::new(0, rng.gen_range(0..minor));
    let parent = spanning_tree(rng, &grid, exit);
    let tree: BTreeSet<CellEdge> = parent.iter().filter_map(|(&c, &p)| edge_key(&grid, c, p)).collect();
    let mut walls: Walls = BTreeSet::new();
    for c in grid.cells() {
        for n in neighbor_vec(c, &grid) {
            if let Some(e) = edge_key(&grid, c, n) {
                if !tree.contains(&e) {
                    walls.insert(e);
                }
            }
        }
    }
    let k = rng.gen_range(2..=5usize).min(minor);
    let mut outer: Vec<usize> = (0..minor).collect();
    outer.shuffle(rng);
    let mut cols: Vec<usize> = outer.into_iter().take(k).collect();
    cols.sort_unstable();
    let entrances: Vec<(String, CellRef)> = cols
        .iter()
        .enumerate()
        .map(|(i, &c)| (OPTION_LABELS[i].to_string(), CellRef::new(major - 1, c)))
        .collect();
    let right = rng.gen_range(0..k);
    let keep: BTreeSet<CellEdge> = tree_path(&parent, entrances[right].1)
        .windows(2)
        .filter_map(|w| edge_key(&grid, w[0], w[1]))
        .collect();
    for (i, (_, cell)) in entrances.iter().enumerate() {
        if i == right {
            continue;
        }
        let cuttable: Vec<CellEdge> = tree_path(&parent, *cell)
            .windows(2)
            .filter_map(|w| edge_key(&grid, w[0], w[1]))
            .filter(|e| !keep.contains(e))
            .collect();
        let cut = cuttable.choose(rng).ok_or("wrong entrance lies on the solution path")?;
        walls.insert(*cut);
    }
    let puzzle = Maze {
        walls,
        entrances,
        exit,
        carved: OPTION_LABELS[right].to_string(),
    };
    draft(Puzzle::Maze(puzzle), major, minor)
}

// -------------------------------------------------------- monotonic path

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MonotonicPath {
    pub values: BTreeMap<CellRef, i64>,
    pub start: CellRef,
    pub exits: Vec<(String, CellRef)>,
    /// Exit at the end of the planted increasing path.
    pub planted_exit: String,
}

impl TaskPuzzle for MonotonicPath {
    fn solve(&self, grid: &GridSpec) -> Result<Solution, OracleError> {
        Ok(Solution::Choice(solve_monotonic_exit(grid, &self.values, self.start, &self.exits)?))
    }

    fn choices(&self, _grid: &GridSpec) -> Option<Vec<Choice>> {
        Some(
            self.exits
                .iter()
                .map(|(l, _)| Choice {
                    text: format!("exit {l}"),
                    value: l.clone(),
                })
                .collect(),
        )
    }

    fn scene(&self, grid: &GridSpec) -> SceneSpec {
        let mut scene = base_scene(grid);
        scene.font_px = 14.0;
        for (&cell, &v) in &self.values {
            scene.cell_glyphs.insert(cell, Glyph::new(v.to_string()));
        }
        scene.cell_fills.insert(self.start, START.into());
        for (label, cell) in &self.exits {
            scene.overlays.push(Overlay::EdgeLabel {
                cell: *cell,
                side: Heading::MajorPlus,
                text: label.clone(),
            });
        }
        scene
    }

    fn question(&self, grid: &GridSpec) -> String {
        let v = Vocab::of(grid.topology);
        format!(
            "The building has {} {} and {} {} of rooms. You start in the green room in {} 0 at ({}, {}). The exits A to F lead out of rooms in the outermost {}. From a room you may only move into a neighbouring room with a larger number.{} Which exit can you reach?",
            grid.major,
            v.rows,
            grid.minor,
            v.cols,
            v.row,
            self.start.major,
            self.start.minor,
            v.row,
            seam_note(grid)
        )
    }

    fn planted(&self) -> Option<Answer> {
        Some(Answer::OptionLabel(self.planted_exit.clone()))
    }
}

/// Random simple path from `from` to `to` by randomized depth-first search.
fn random_simple_path(rng: &mut GenRng, grid: &GridSpec, from: CellRef, to: CellRef, max_len: usize) -> Option<Vec<CellRef>> {
    fn go(
        rng: &mut GenRng,
        grid: &GridSpec,
        to: CellRef,
        max_len: usize,
        path: &mut Vec<CellRef>,
        on: &mut BTreeSet<CellRef>,
        budget: &mut usize,
    ) -> bool {
        let at = *path.last().unwrap();
        if at == to {
            return true;
        }
        if path.len() >= max_len || *budget == 0 {
            return false;
        }
        *budget -= 1;
        let mut next = neighbor_vec(at, grid);
        next.shuffle(rng);
        for n in next {
            if on.insert(n) {
                path.push(n);
                if go(rng, grid, to, max_len, path, on, budget) {
                    return true;
                }
                path.pop();
                on.remove(&n);
            }
        }
        false
    }
    let mut path = vec![from];
    let mut on = BTreeSet::from([from]);
    let mut budget = 20_000;
    go(rng, grid, to, max_len, &mut path, &mut on, &mut budget).then_some(path)
}

pub(super) fn build_monotonic(rng: &mut GenRng, ranges: &Ranges, layout: &Layout) -> Result<Draft, String> {
    let (major, minor) = (draw(rng, ranges.major).max(2), draw(rng, ranges.minor).max(6));
    let [grid, _] = layout.grids(major, minor);
    let n = grid.cell_count();
    if n > 99 {
        return Err("grid too large for two-digit rooms".into());
    }
    let start = CellRef::new(0, rng.gen_range(0..minor));
    let mut exit_cols: Vec<usize> = (0..minor).collect();
    exit_cols.shuffle(rng);
    exit_cols.truncate(6);
    exit_cols.sort_unstable();
    let exits: Vec<(String, CellRef)> = exit_cols
        .iter()
        .enumerate()
        .map(|(i, &c)| (OPTION_LABELS[i].to_string(), CellRef::new(major - 1, c)))
        .collect();
    let right = rng.gen_range(0..exits.len());
    let path = random_simple_path(rng, &grid, start, exits[right].1, n / 2).ok_or("no planted path")?;
    let exit_cells: BTreeSet<CellRef> = exits.iter().map(|(_, c)| *c).collect();
    if path[1..path.len() - 1].iter().any(|c| exit_cells.contains(c)) {
        return Err("planted path crosses another exit".into());
    }
    // distinct room numbers, ranked: wrong exits below the start, the path
    // strictly above it in order
    let mut pool: Vec<i64> = (1..=99).collect();
    pool.shuffle(rng);
    pool.truncate(n);
    pool.sort_unstable();
    let wrong = exits.len() - 1;
    let l = path.len();
    if n < wrong + l + 1 {
        return Err("not enough rooms".into());
    }
    let start_rank = rng.gen_range(wrong..=n - l);
    let mut free_ranks: Vec<usize> = (0..n).filter(|&r| r != start_rank).collect();
    let mut values = BTreeMap::new();
    values.insert(start, pool[start_rank]);
    let mut above: Vec<usize> = free_ranks.iter().copied().filter(|&r| r > start_rank).collect();
    above.shuffle(rng);
    let mut path_ranks: Vec<usize> = above.into_iter().take(l - 1).collect();
    path_ranks.sort_unstable();
    for (cell, &r) in path[1..].iter().zip(&path_ranks) {
        values.insert(*cell, pool[r]);
    }
    free_ranks.retain(|r| !path_ranks.contains(r));
    let mut below: Vec<usize> = free_ranks.iter().copied().filter(|&r| r < start_rank).collect();
    below.shuffle(rng);
    for ((_, cell), &r) in exits.iter().enumerate().filter(|(i, _)| *i != right).map(|(_, e)| e).zip(&below) {
        values.insert(*cell, pool[r]);
    }
    let used: BTreeSet<i64> = values.values().copied().collect();
    let mut rest: Vec<i64> = pool.iter().copied().filter(|v| !used.contains(v)).collect();
    rest.shuffle(rng);
    let empty: Vec<CellRef> = grid.cells().filter(|c| !values.contains_key(c)).collect();
    for (cell, v) in empty.into_iter().zip(rest) {
        values.insert(cell, v);
    }
    if values.len() != n {
        return Err("room numbering incomplete".into());
    }
    let puzzle = MonotonicPath {
        values,
        start,
        exits,
        planted_exit: OPTION_LABELS[right].to_string(),
    };
    draft(Puzzle::MonotonicPath(puzzle), major, minor)
}

// ----------------------------------------------------------- word search

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WordSearch {
    pub letters: BTreeMap<CellRef, char>,
    pub word: String,
    pub start: CellRef,
}

impl TaskPuzzle for WordSearch {
    fn solve(&self, grid: &GridSpec) -> Result<Solution, OracleError> {
        let n = count_word_paths(grid, &self.letters, &self.word, self.start)?;
        Ok(Solution::Answer(Answer::Digit(i64::try_from(n).map_err(|_| OracleError::Overflow)?)))
    }

    fn scene(&self, grid: &GridSpec) -> SceneSpec {
        let mut scene = base_scene(grid);
        for (&cell, &ch) in &self.letters {
            scene.cell_glyphs.insert(cell, Glyph::new(ch.to_string()));
        }
        scene.cell_fills.insert(self.start, HIGHLIGHT.into());
        scene
    }

    fn question(&self, grid: &GridSpec) -> String {
        let cells = match grid.topology {
            Topology::Hexagonal => "hexagonal cells, each touching up to six others",
            Topology::Octagonal => "octagonal cells, each touching up to eight others (including diagonal neighbours)",
            Topology::Polar => "ring-sector cells, each touching up to four others",
            Topology::Cartesian => "square cells, each touching up to four others",
        };
        format!(
            "The board is made of {cells}. Starting from the highlighted cell, how many different paths spell the word {}?",
            self.word
        )
    }
}

fn word_puzzle(rng: &mut GenRng, grid: &GridSpec, start: CellRef) -> Result<WordSearch, String> {
    let mut alphabet: Vec<char> = ('A'..='Z').collect();
    alphabet.shuffle(rng);
    alphabet.truncate(rng.gen_range(3..=4));
    let len = rng.gen_range(3..=4);
    let word: String = (0..len).map(|_| *alphabet.choose(rng).unwrap()).collect();
    let mut letters: BTreeMap<CellRef, char> = grid.cells().map(|c| (c, *alphabet.choose(rng).unwrap())).collect();
    letters.insert(start, word.chars().next().unwrap());
    let puzzle = WordSearch { letters, word, start };
    let n = count_word_paths(grid, &puzzle.letters, &puzzle.word, start).map_err(|e| e.to_string())?;
    if n == 0 || n > 60 {
        return Err(format!("word path count {n} out of range"));
    }
    Ok(puzzle)
}

pub(super) fn build_word_search(rng: &mut GenRng, ranges: &Ranges, layout: &Layout) -> Result<Draft, String> {
    let (major, minor) = (draw(rng, ranges.major), draw(rng, ranges.minor));
    let [grid, _] = layout.grids(major, minor);
    let start = random_cell(rng, &grid);
    let puzzle = word_puzzle(rng, &grid, start)?;
    draft(Puzzle::WordSearch(puzzle), major, minor)
}

pub(super) fn build_word_search_tiling(rng: &mut GenRng, topology: Topology) -> Result<(Puzzle, GridSpec), String> {
    let grid = match topology {
        Topology::Hexagonal => {
            let n = *[5usize, 7].choose(rng).unwrap();
            GridSpec::new(topology, n, n, Boundary::Bounded)
        }
        Topology::Octagonal => GridSpec::new(topology, rng.gen_range(4..=6), rng.gen_range(4..=6), Boundary::Bounded),
        other => return Err(format!("{other} is not a tiling layout")),
    }
    .map_err(|e| e.to_string())?;
    let start = if topology == Topology::Hexagonal {
        CellRef::new(grid.major / 2, grid.minor / 2)
    } else {
        random_cell(rng, &grid)
    };
    Ok((Puzzle::WordSearch(word_puzzle(rng, &grid, start)?), grid))
}

// --------------------------------------------------------- wall follower

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WallFollower {
    pub walls: Walls,
    pub start: CellRef,
    pub heading: Heading,
    /// Candidate answer cells listed in the question.
    pub candidates: Vec<CellRef>,
}

impl TaskPuzzle for WallFollower {
    fn solve(&self, grid: &GridSpec) -> Result<Solution, OracleError> {
        let (_, cell) = simulate_wall_follower(grid, &self.walls, self.start, self.heading)?;
        if !self.candidates.contains(&cell) {
            return Err(OracleError::Precondition(format!("{cell} is not among the candidates")));
        }
        Ok(Solution::Answer(Answer::Coordinate(cell.major, cell.minor)))
    }

    fn answer_candidates(&self, _grid: &GridSpec) -> Option<Vec<Answer>> {
        Some(self.candidates.iter().map(|c| Answer::Coordinate(c.major, c.minor)).collect())
    }

    fn scene(&self, grid: &GridSpec) -> SceneSpec {
        let mut scene = base_scene(grid);
        scene.axis_labels = true;
        wall_overlays(&mut scene, &self.walls);
        let (dr, dc) = self.heading.delta();
        scene.overlays.push(Overlay::Marker {
            cell: self.start,
            marker: MarkerKind::Dot,
            color: INK.into(),
        });
        scene.overlays.push(Overlay::Arrow {
            cell: self.start,
            d_major: dr,
            d_minor: dc,
            color: INK.into(),
        });
        scene
    }

    fn question(&self, grid: &GridSpec) -> String {
        let v = Vocab::of(grid.topology);
        let list: Vec<String> = self.candidates.iter().map(|c| format!("({}, {})", c.major, c.minor)).collect();
        format!(
            "The grid has {} {} and {} {}. The robot starts at ({}, {}) facing {}, as the arrow shows. {} If it stops, where does it stop? If it loops, in which cell does it first repeat an earlier position and direction? Answer with a {} coordinate; it is one of {}.",
            grid.major,
            v.rows,
            grid.minor,
            v.cols,
            self.start.major,
            self.start.minor,
            self.heading.describe(grid.topology),
            turn_rule(grid.topology),
            v.coord,
            list.join(", ")
        )
    }
}

pub(super) fn build_wall_follower(rng: &mut GenRng, ranges: &Ranges, layout: &Layout) -> Result<Draft, String> {
    let (major, minor) = (draw(rng, ranges.major), draw(rng, ranges.minor));
    let [grid, _] = layout.grids(major, minor);
    let p = rng.gen_range(0.15..0.35);
    let mut walls = Walls::new();
    for c in grid.cells() {
        for h in [Heading::MajorPlus, Heading::MinorPlus] {
            if matches!(step(c, h, &grid), Ok(Step::Moved(_))) && rng.gen_bool(p) {
                walls.insert(CellEdge::normalized(c, h, &grid));
            }
        }
    }
    let start = random_cell(rng, &grid);
    let heading = *Heading::ALL.choose(rng).unwrap();
    let (outcome, end) = simulate_wall_follower(&grid, &walls, start, heading).map_err(|e| e.to_string())?;
    // replay to collect visited cells
    let mut visited = Vec::new();
    let (mut cell, mut h) = (start, heading);
    let mut moves = 0;
    for _ in 0..4 * grid.cell_count() * 4 {
        match is_open(&grid, &walls, cell, h) {
            Some(next) => {
                cell = next;
                moves += 1;
                if !visited.contains(&cell) {
                    visited.push(cell);
                }
            }
            None => h = h.turn_right(),
        }
    }
    if moves < 4 && outcome == FollowerOutcome::Loop {
        return Err("trajectory too short".into());
    }
    let mut pool: Vec<CellRef> = visited.into_iter().filter(|&c| c != end).collect();
    pool.shuffle(rng);
    let mut candidates = vec![end];
    candidates.extend(pool.into_iter().take(4));
    while candidates.len() < 5 {
        let c = random_cell(rng, &grid);
        if !candidates.contains(&c) {
            candidates.push(c);
        }
    }
    candidates.shuffle(rng);
    let puzzle = WallFollower {
        walls,
        start,
        heading,
        candidates,
    };
    draft(Puzzle::WallFollower(puzzle), major, minor)
}
