use super::answer::Answer;
use super::tasks::{
    AreaCounting, BouncingPoint, GridRotation, KnightPaths, LatticePaths, LetterCollection, Maze, MinimumFlips,
    MonotonicPath, NQueens, PipeLengths, RandomWalk, Sudoku, WallFollower, WordSearch,
};
use crate::oracles::OracleError;
use crate::render::{Calibration, SceneSpec, DEFAULT_FONT_PX};
use crate::topology::{Boundary, GridSpec, Topology};
use serde::{Deserialize, Serialize};

/// What an oracle produces for an instance: either the answer itself or
/// the canonical value of the correct option.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Solution {
    Answer(Answer),
    Choice(String),
}

/// An option before labelling.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Choice {
    pub text: String,
    pub value: String,
}

impl Choice {
    pub fn plain(value: impl Into<String>) -> Self {
        let value = value.into();
        Choice {
            text: value.clone(),
            value,
        }
    }
}

/// Behaviour shared by every task's logical puzzle. Everything here is a
/// pure function of the puzzle and the grid it is placed on.
pub trait TaskPuzzle {
    fn solve(&self, grid: &GridSpec) -> Result<Solution, OracleError>;
    fn choices(&self, _grid: &GridSpec) -> Option<Vec<Choice>> {
        None
    }
    /// Every admissible answer, for open formats with a finite domain.
    fn answer_candidates(&self, _grid: &GridSpec) -> Option<Vec<Answer>> {
        None
    }
    fn scene(&self, grid: &GridSpec) -> SceneSpec;
    fn question(&self, grid: &GridSpec) -> String;
    /// The answer the construction intended, kept for cross-checks.
    fn planted(&self) -> Option<Answer> {
        None
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "task", rename_all = "snake_case")]
pub enum Puzzle {
    Sudoku(Sudoku),
    NQueens(NQueens),
    MinimumFlips(MinimumFlips),
    BouncingPoint(BouncingPoint),
    LatticePaths(LatticePaths),
    KnightPaths(KnightPaths),
    RandomWalk(RandomWalk),
    Maze(Maze),
    MonotonicPath(MonotonicPath),
    WordSearch(WordSearch),
    WallFollower(WallFollower),
    GridRotation(GridRotation),
    AreaCounting(AreaCounting),
    PipeLengths(PipeLengths),
    LetterCollection(LetterCollection),
}

macro_rules! dispatch {
    ($self:ident, $p:ident => $e:expr) => {
        match $self {
            Puzzle::Sudoku($p) => $e,
            Puzzle::NQueens($p) => $e,
            Puzzle::MinimumFlips($p) => $e,
            Puzzle::BouncingPoint($p) => $e,
            Puzzle::LatticePaths($p) => $e,
            Puzzle::KnightPaths($p) => $e,
            Puzzle::RandomWalk($p) => $e,
            Puzzle::Maze($p) => $e,
            Puzzle::MonotonicPath($p) => $e,
            Puzzle::WordSearch($p) => $e,
            Puzzle::WallFollower($p) => $e,
            Puzzle::GridRotation($p) => $e,
            Puzzle::AreaCounting($p) => $e,
            Puzzle::PipeLengths($p) => $e,
            Puzzle::LetterCollection($p) => $e,
        }
    };
}

impl Puzzle {
    pub fn task_id(&self) -> &'static str {
        match self {
            Puzzle::Sudoku(_) => "sudoku",
            Puzzle::NQueens(_) => "n_queens",
            Puzzle::MinimumFlips(_) => "minimum_flips",
            Puzzle::BouncingPoint(_) => "bouncing_point",
            Puzzle::LatticePaths(_) => "lattice_paths",
            Puzzle::KnightPaths(_) => "knight_paths",
            Puzzle::RandomWalk(_) => "random_walk",
            Puzzle::Maze(_) => "maze",
            Puzzle::MonotonicPath(_) => "monotonic_path",
            Puzzle::WordSearch(_) => "word_search",
            Puzzle::WallFollower(_) => "wall_follower",
            Puzzle::GridRotation(_) => "grid_rotation",
            Puzzle::AreaCounting(_) => "area_counting",
            Puzzle::PipeLengths(_) => "pipe_lengths",
            Puzzle::LetterCollection(_) => "letter_collection",
        }
    }
}

impl TaskPuzzle for Puzzle {
    fn solve(&self, grid: &GridSpec) -> Result<Solution, OracleError> {
        dispatch!(self, p => p.solve(grid))
    }
    fn choices(&self, grid: &GridSpec) -> Option<Vec<Choice>> {
        dispatch!(self, p => p.choices(grid))
    }
    fn answer_candidates(&self, grid: &GridSpec) -> Option<Vec<Answer>> {
        dispatch!(self, p => p.answer_candidates(grid))
    }
    fn scene(&self, grid: &GridSpec) -> SceneSpec {
        let mut scene = dispatch!(self, p => p.scene(grid));
        scene.task = Some(self.task_id().to_string());
        scene
    }
    fn question(&self, grid: &GridSpec) -> String {
        dispatch!(self, p => p.question(grid))
    }
    fn planted(&self) -> Option<Answer> {
        dispatch!(self, p => p.planted())
    }
}

/// Topology-specific nouns for question text.
#[derive(Debug, Clone, Copy)]
pub struct Vocab {
    pub row: &'static str,
    pub col: &'static str,
    pub rows: &'static str,
    pub cols: &'static str,
    pub coord: &'static str,
}

impl Vocab {
    pub fn of(topology: Topology) -> Vocab {
        match topology {
            Topology::Polar => Vocab {
                row: "ring",
                col: "sector",
                rows: "rings",
                cols: "sectors",
                coord: "(ring, sector)",
            },
            _ => Vocab {
                row: "row",
                col: "column",
                rows: "rows",
                cols: "columns",
                coord: "(row, column)",
            },
        }
    }
}

/// A fresh scene for `grid`. Cartesian grids are shrunk to the area of the
/// matching Polar annulus so both renders cover comparable ink.
pub fn base_scene(grid: &GridSpec) -> SceneSpec {
    let mut scene = SceneSpec::new(*grid);
    scene.font_px = DEFAULT_FONT_PX;
    match grid.topology {
        Topology::Cartesian => {
            scene.calibration = Calibration::MatchPolar {
                inner_radius_ratio: grid.inner_radius_ratio,
            }
        }
        Topology::Polar => scene.draw_seam = grid.boundary == Boundary::Bounded,
        _ => {}
    }
    scene
}

pub const SHADE: &str = "#9e9e9e";
pub const OBSTACLE: &str = "#424242";
pub const HIGHLIGHT: &str = "#ffe082";
pub const START: &str = "#a5d6a7";
pub const EXIT: &str = "#ef9a9a";
pub const INK: &str = "#1565c0";
pub const BLACK: &str = "#212121";
pub const WHITE: &str = "#ffffff";
pub const PALETTE: [&str; 12] = [
    "#e53935", "#1e88e5", "#43a047", "#fdd835", "#8e24aa", "#fb8c00", "#00acc1", "#6d4c41", "#d81b60", "#7cb342",
    "#3949ab", "#546e7a",
];
