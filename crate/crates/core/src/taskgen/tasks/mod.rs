//! Per-task puzzles and their seeded builders.

mod algorithmic;
mod combinatorics;
mod navigation;
mod spatial;
mod visual;

pub use algorithmic::{BouncingPoint, MinimumFlips, NQueens, Sudoku};
pub use combinatorics::{KnightPaths, LatticePaths, RandomWalk};
pub use navigation::{Maze, MonotonicPath, WallFollower, WordSearch};
pub use spatial::{AreaCounting, GridRotation, PanelKind, PipeLengths};
pub use visual::LetterCollection;

use super::catalog::Ranges;
use super::puzzle::{Puzzle, Vocab};
use crate::topology::{Boundary, GridSpec, Heading, Topology};
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub type GenRng = ChaCha8Rng;

/// Boundaries of the two sides of a pair and the shared annulus ratio.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Layout {
    pub cartesian: Boundary,
    pub polar: Boundary,
    pub ratio: f64,
}

impl Layout {
    pub fn grids(&self, major: usize, minor: usize) -> [GridSpec; 2] {
        [
            GridSpec::cartesian(major, minor, self.cartesian).with_inner_radius_ratio(self.ratio),
            GridSpec::polar(major, minor, self.polar).with_inner_radius_ratio(self.ratio),
        ]
    }
}

/// A built puzzle and the grid dimensions it lives on.
#[derive(Debug, Clone)]
pub struct Draft {
    pub puzzle: Puzzle,
    pub major: usize,
    pub minor: usize,
}

pub(crate) fn draft(puzzle: Puzzle, major: usize, minor: usize) -> Result<Draft, String> {
    Ok(Draft { puzzle, major, minor })
}

/// Fill a choice list up to `k` entries from `pool`, skipping values
/// already present, then shuffle.
pub(crate) fn fill_choices<T: Clone + PartialEq>(rng: &mut GenRng, mut chosen: Vec<T>, pool: &[T], k: usize) -> Result<Vec<T>, String> {
    let mut pool: Vec<T> = pool.iter().filter(|v| !chosen.contains(v)).cloned().collect();
    pool.shuffle(rng);
    for v in pool {
        if chosen.len() == k {
            break;
        }
        if !chosen.contains(&v) {
            chosen.push(v);
        }
    }
    if chosen.len() < k {
        return Err(format!("only {} distinct options available", chosen.len()));
    }
    chosen.shuffle(rng);
    Ok(chosen)
}

pub(crate) fn draw(rng: &mut GenRng, (lo, hi): (usize, usize)) -> usize {
    rng.gen_range(lo..=hi.max(lo))
}

pub(crate) fn random_cell(rng: &mut GenRng, grid: &GridSpec) -> crate::topology::CellRef {
    let cells: Vec<_> = grid.cells().collect();
    *cells.choose(rng).expect("grid has cells")
}

/// Heading names plus the quarter-turn cycle, so "turn right" is defined
/// in index terms on every layout.
pub(crate) fn turn_rule(topology: Topology) -> String {
    let mut h = Heading::MajorPlus;
    let mut names = Vec::new();
    for _ in 0..5 {
        names.push(h.describe(topology));
        h = h.turn_right();
    }
    format!("A right turn changes the facing direction {}.", names.join(" -> "))
}

/// Sentence telling the reader the minor axis wraps, or nothing.
pub(crate) fn seam_note(grid: &GridSpec) -> String {
    let v = Vocab::of(grid.topology);
    match grid.boundary {
        Boundary::Wrapping => format!(
            " {col} {last} and {col} 0 are adjacent, so moves may cross between them.",
            col = capitalize(v.col),
            last = grid.minor - 1
        ),
        Boundary::Bounded => String::new(),
    }
}

pub(crate) fn capitalize(s: &str) -> String {
    let mut c = s.chars();
    match c.next() {
        Some(f) => f.to_uppercase().chain(c).collect(),
        None => String::new(),
    }
}

/// Build the puzzle for one pair of `task_id`.
pub fn build(task_id: &str, rng: &mut GenRng, ranges: &Ranges, layout: &Layout) -> Result<Draft, String> {
    match task_id {
        "sudoku" => algorithmic::build_sudoku(rng, ranges),
        "n_queens" => algorithmic::build_queens(rng, ranges),
        "minimum_flips" => algorithmic::build_flips(rng, ranges, layout),
        "bouncing_point" => algorithmic::build_bounce(rng, ranges, layout),
        "lattice_paths" => combinatorics::build_lattice(rng, ranges, layout),
        "knight_paths" => combinatorics::build_knight(rng, ranges, layout),
        "random_walk" => combinatorics::build_walk(rng, ranges, layout),
        "maze" => navigation::build_maze(rng, ranges, layout),
        "monotonic_path" => navigation::build_monotonic(rng, ranges, layout),
        "word_search" => navigation::build_word_search(rng, ranges, layout),
        "wall_follower" => navigation::build_wall_follower(rng, ranges, layout),
        "grid_rotation" => spatial::build_rotation(rng, ranges, layout),
        "area_counting" => spatial::build_area(rng, ranges, layout),
        "pipe_lengths" => spatial::build_pipes(rng, ranges, layout),
        "letter_collection" => visual::build_letters(rng, ranges, layout),
        other => Err(format!("no builder for task {other}")),
    }
}

/// Word-search puzzle on a hexagonal or octagonal layout.
pub fn build_tiling_variant(rng: &mut GenRng, topology: Topology) -> Result<(Puzzle, GridSpec), String> {
    navigation::build_word_search_tiling(rng, topology)
}
