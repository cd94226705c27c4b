use super::{draft, draw, fill_choices, random_cell, seam_note, Draft, GenRng, Layout};
use crate::oracles::{count_fixed_length_walks, count_monotone_paths, walk_pass_probability, MoveSet, OracleError, Rational};
use crate::render::{Glyph, MarkerKind, Overlay, SceneSpec};
use crate::taskgen::answer::Answer;
use crate::taskgen::catalog::Ranges;
use crate::taskgen::puzzle::{base_scene, Choice, Puzzle, Solution, TaskPuzzle, Vocab, HIGHLIGHT, INK, OBSTACLE};
use crate::topology::{CellRef, GridSpec, Topology};
use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;

const MAX_PATH_COUNT: u128 = 1_000_000;
const MAX_WALK_COUNT: u128 = 10_000;

fn to_digit(n: u128) -> Result<Answer, OracleError> {
    i64::try_from(n).map(Answer::Digit).map_err(|_| OracleError::Overflow)
}

// --------------------------------------------------------- lattice paths

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LatticePaths {
    pub start: CellRef,
    pub end: CellRef,
    pub blocked: BTreeSet<CellRef>,
    #[serde(default)]
    pub checkpoint: Option<CellRef>,
}

impl TaskPuzzle for LatticePaths {
    fn solve(&self, grid: &GridSpec) -> Result<Solution, OracleError> {
        let n = count_monotone_paths(grid, &MoveSet::lattice(), self.start, self.end, &self.blocked, self.checkpoint)?;
        Ok(Solution::Answer(to_digit(n)?))
    }

    fn scene(&self, grid: &GridSpec) -> SceneSpec {
        let mut scene = base_scene(grid);
        for &b in &self.blocked {
            scene.cell_fills.insert(b, OBSTACLE.into());
        }
        scene.cell_glyphs.insert(self.start, Glyph::colored("S", INK));
        scene.cell_glyphs.insert(self.end, Glyph::colored("E", INK));
        if let Some(cp) = self.checkpoint {
            scene.cell_fills.insert(cp, HIGHLIGHT.into());
            scene.cell_glyphs.insert(cp, Glyph::colored("C", INK));
        }
        scene
    }

    fn question(&self, grid: &GridSpec) -> String {
        let v = Vocab::of(grid.topology);
        let (fwd, down) = match grid.topology {
            Topology::Polar => ("clockwise", "outward"),
            _ => ("right", "down"),
        };
        let cp = if self.checkpoint.is_some() {
            " Count only the paths that pass through the checkpoint C."
        } else {
            ""
        };
        format!(
            "The grid has {} {} and {} {}. Each step moves one {} {fwd}, one {} {down}, or one of each at once (diagonally {down} and {fwd}). How many different paths lead from S to E without entering a dark cell?{cp}",
            grid.major, v.rows, grid.minor, v.cols, v.col, v.row
        )
    }
}

pub(super) fn build_lattice(rng: &mut GenRng, ranges: &Ranges, layout: &Layout) -> Result<Draft, String> {
    let (major, minor) = (draw(rng, ranges.major), draw(rng, ranges.minor));
    let [grid, _] = layout.grids(major, minor);
    let start = CellRef::new(0, 0);
    let end = CellRef::new(major - 1, minor - 1);
    if start == end {
        return Err("grid too small".into());
    }
    let checkpoint = if rng.gen_bool(0.35) {
        let c = random_cell(rng, &grid);
        (c != start && c != end).then_some(c)
    } else {
        None
    };
    let density = rng.gen_range(0.1..0.3);
    let blocked: BTreeSet<CellRef> = grid
        .cells()
        .filter(|&c| c != start && c != end && Some(c) != checkpoint)
        .filter(|_| rng.gen_bool(density))
        .collect();
    let puzzle = LatticePaths {
        start,
        end,
        blocked,
        checkpoint,
    };
    let n = count_monotone_paths(&grid, &MoveSet::lattice(), start, end, &puzzle.blocked, checkpoint)
        .map_err(|e| e.to_string())?;
    if n == 0 || n > MAX_PATH_COUNT {
        return Err(format!("path count {n} out of range"));
    }
    draft(Puzzle::LatticePaths(puzzle), major, minor)
}

// ---------------------------------------------------------- knight paths

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KnightPaths {
    pub start: CellRef,
    pub target: CellRef,
    pub k: usize,
}

impl TaskPuzzle for KnightPaths {
    fn solve(&self, grid: &GridSpec) -> Result<Solution, OracleError> {
        let n = count_fixed_length_walks(grid, &MoveSet::knight(), self.start, self.target, self.k)?;
        Ok(Solution::Answer(to_digit(n)?))
    }

    fn scene(&self, grid: &GridSpec) -> SceneSpec {
        let mut scene = base_scene(grid);
        scene.axis_labels = true;
        scene.cell_glyphs.insert(self.start, Glyph::colored("S", INK));
        scene.cell_glyphs.insert(self.target, Glyph::colored("T", INK));
        scene
    }

    fn question(&self, grid: &GridSpec) -> String {
        let v = Vocab::of(grid.topology);
        format!(
            "The grid has {} {} and {} {}. A knight move changes one index by 2 and the other by 1 ({} and {}).{} How many sequences of exactly {} knight moves take the knight from S at ({}, {}) to T at ({}, {})?",
            grid.major,
            v.rows,
            grid.minor,
            v.cols,
            v.row,
            v.col,
            seam_note(grid),
            self.k,
            self.start.major,
            self.start.minor,
            self.target.major,
            self.target.minor
        )
    }
}

pub(super) fn build_knight(rng: &mut GenRng, ranges: &Ranges, layout: &Layout) -> Result<Draft, String> {
    let (major, minor) = (draw(rng, ranges.major), draw(rng, ranges.minor));
    let [cart, polar] = layout.grids(major, minor);
    let start = random_cell(rng, &cart);
    let target = random_cell(rng, &cart);
    if start == target {
        return Err("start equals target".into());
    }
    let k = rng.gen_range(2..=4);
    let count = |g: &GridSpec| count_fixed_length_walks(g, &MoveSet::knight(), start, target, k).map_err(|e| e.to_string());
    let (c, p) = (count(&cart)?, count(&polar)?);
    if c.max(p) == 0 || c.max(p) > MAX_WALK_COUNT {
        return Err(format!("walk counts {c}/{p} out of range"));
    }
    draft(Puzzle::KnightPaths(KnightPaths { start, target, k }), major, minor)
}

// ----------------------------------------------------------- random walk

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RandomWalk {
    pub a: CellRef,
    pub b: CellRef,
    pub c: CellRef,
    /// Option probabilities in label order.
    pub probabilities: Vec<Rational>,
}

impl TaskPuzzle for RandomWalk {
    fn solve(&self, grid: &GridSpec) -> Result<Solution, OracleError> {
        Ok(Solution::Choice(walk_pass_probability(grid, self.a, self.b, self.c)?.to_string()))
    }

    fn choices(&self, _grid: &GridSpec) -> Option<Vec<Choice>> {
        Some(self.probabilities.iter().map(|p| Choice::plain(p.to_string())).collect())
    }

    fn scene(&self, grid: &GridSpec) -> SceneSpec {
        let mut scene = base_scene(grid);
        for (cell, label) in [(self.a, "A"), (self.b, "B"), (self.c, "C")] {
            scene.cell_glyphs.insert(cell, Glyph::colored(label, INK));
        }
        scene.overlays.push(Overlay::Marker {
            cell: self.b,
            marker: MarkerKind::Ring,
            color: INK.into(),
        });
        scene
    }

    fn question(&self, grid: &GridSpec) -> String {
        let v = Vocab::of(grid.topology);
        format!(
            "The grid has {} {} and {} {}; neighbouring cells share an edge.{} What is the probability that the walker visits C before it stops at B?",
            grid.major,
            v.rows,
            grid.minor,
            v.cols,
            seam_note(grid)
        )
    }
}

fn rational_distractors(truths: &[Rational]) -> Vec<Rational> {
    let mut out = Vec::new();
    for t in truths {
        let num: i64 = t.numerator().try_into().unwrap_or(1);
        let den: i64 = t.denominator().try_into().unwrap_or(2);
        for d in [-2, -1, 1, 2] {
            if num + d > 0 && num + d < den {
                out.push(Rational::new(num + d, den));
            }
        }
        out.push(Rational::new(den - num, den));
    }
    for (n, d) in [(1, 2), (1, 3), (2, 3), (1, 4), (3, 4), (2, 5), (3, 5), (1, 6), (5, 6)] {
        out.push(Rational::new(n, d));
    }
    out.retain(|r| !truths.contains(r));
    out.sort();
    out.dedup();
    out
}

pub(super) fn build_walk(rng: &mut GenRng, ranges: &Ranges, layout: &Layout) -> Result<Draft, String> {
    let (major, minor) = (draw(rng, ranges.major), draw(rng, ranges.minor));
    let [cart, polar] = layout.grids(major, minor);
    let mut cells: Vec<CellRef> = cart.cells().collect();
    if cells.len() < 3 {
        return Err("grid too small".into());
    }
    cells.shuffle(rng);
    let (a, b, c) = (cells[0], cells[1], cells[2]);
    let solve = |g: &GridSpec| walk_pass_probability(g, a, b, c).map_err(|e| e.to_string());
    let (pc, pp) = (solve(&cart)?, solve(&polar)?);
    for p in [&pc, &pp] {
        if *p == Rational::zero() || *p == Rational::one() {
            return Err("degenerate probability".into());
        }
    }
    let mut truths = vec![pc.clone()];
    if pp != pc {
        truths.push(pp);
    }
    let pool = rational_distractors(&truths);
    let probabilities = fill_choices(rng, truths, &pool, 5)?;
    draft(Puzzle::RandomWalk(RandomWalk { a, b, c, probabilities }), major, minor)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::topology::Boundary;
    use rand::SeedableRng;

    #[test]
    fn lattice_draft_is_countable() {
        let mut rng = GenRng::seed_from_u64(5);
        let layout = Layout {
            cartesian: Boundary::Bounded,
            polar: Boundary::Bounded,
            ratio: 0.25,
        };
        for _ in 0..10 {
            if let Ok(d) = build_lattice(&mut rng, &Ranges::new((3, 6), (3, 7)), &layout) {
                let [g, _] = layout.grids(d.major, d.minor);
                let Solution::Answer(Answer::Digit(n)) = d.puzzle.solve(&g).unwrap() else { panic!() };
                assert!(n >= 1);
            }
        }
    }

    #[test]
    fn distractors_exclude_truth() {
        let t = vec![Rational::new(1, 2)];
        let d = rational_distractors(&t);
        assert!(!d.contains(&t[0]));
        assert!(d.len() >= 4);
    }
}
