//! Ground-truth solvers. Every task family's answer is recomputed here by
//! brute force, dynamic programming or exact linear algebra, independently
//! of how the generator built the instance.

mod flips;
mod navigation;
mod paths;
mod queens;
mod simulation;
mod spatial;
mod sudoku;
mod walk;
mod words;

pub use flips::{alternating, min_flip_moves, FlipOutcome, MAX_FLIP_CELLS};
pub use navigation::{
    collect_right_hand_letters, is_open, simulate_wall_follower, solve_maze_entrance, solve_monotonic_exit,
    FollowerOutcome, Walls,
};
pub use paths::{count_fixed_length_walks, count_monotone_paths, Move, MoveSet};
pub use queens::{count_queen_completions, QueenCount, MAX_QUEENS};
pub use simulation::simulate_bouncing_point;
pub use spatial::{connected_region_size, pipe_lengths, rotate_grid};
pub use sudoku::{solve_sudoku_cell, SudokuBoard};
pub use walk::{walk_pass_probability, Rational};
pub use words::count_word_paths;

use crate::topology::TopologyError;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error(transparent)]
    Topology(#[from] TopologyError),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("move set is not monotone; use count_fixed_length_walks")]
    NonMonotone,
    #[error("target is unreachable: {0}")]
    Unreachable(String),
    #[error("instance too large: {size} exceeds the limit of {limit}")]
    TooLarge { size: usize, limit: usize },
    #[error("answer is not unique: {0}")]
    Ambiguous(String),
    #[error("no solution exists")]
    Unsolvable,
    #[error("count overflowed")]
    Overflow,
}

pub type OracleResult<T> = Result<T, OracleError>;
