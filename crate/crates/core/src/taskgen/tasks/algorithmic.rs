use super::{draft, draw, fill_choices, random_cell, Draft, GenRng, Layout};
use crate::oracles::{
    alternating, count_queen_completions, min_flip_moves, simulate_bouncing_point, solve_sudoku_cell, FlipOutcome,
    OracleError, SudokuBoard,
};
use crate::render::{Glyph, MarkerKind, Overlay, SceneSpec};
use crate::taskgen::answer::Answer;
use crate::taskgen::catalog::Ranges;
use crate::taskgen::puzzle::{base_scene, Choice, Puzzle, Solution, TaskPuzzle, Vocab, BLACK, HIGHLIGHT, INK, WHITE};
use crate::topology::{Boundary, CellRef, GridSpec};
use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

fn check_dims(grid: &GridSpec, major: usize, minor: usize) -> Result<(), OracleError> {
    if grid.major != major || grid.minor != minor {
        return Err(OracleError::Precondition(format!(
            "puzzle expects a {major}x{minor} grid, got {}x{}",
            grid.major, grid.minor
        )));
    }
    Ok(())
}

// ---------------------------------------------------------------- sudoku

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Sudoku {
    pub board: SudokuBoard,
    pub cell: CellRef,
    /// Option digits in label order.
    pub digits: Vec<u8>,
    /// Digit of the full solution the clues were cut from.
    pub source_value: u8,
}

impl TaskPuzzle for Sudoku {
    fn solve(&self, grid: &GridSpec) -> Result<Solution, OracleError> {
        check_dims(grid, self.board.n, self.board.n)?;
        let d = solve_sudoku_cell(&self.board, self.cell)?;
        Ok(Solution::Choice(d.to_string()))
    }

    fn choices(&self, _grid: &GridSpec) -> Option<Vec<Choice>> {
        Some(self.digits.iter().map(|d| Choice::plain(d.to_string())).collect())
    }

    fn scene(&self, grid: &GridSpec) -> SceneSpec {
        let mut scene = base_scene(grid);
        for r in 0..self.board.n {
            for c in 0..self.board.n {
                let v = self.board.get(r, c);
                if v != 0 {
                    scene.cell_glyphs.insert(CellRef::new(r, c), Glyph::new(v.to_string()));
                }
            }
        }
        scene.cell_fills.insert(self.cell, HIGHLIGHT.into());
        scene.cell_glyphs.insert(self.cell, Glyph::colored("?", INK));
        scene.overlays.push(Overlay::BoxLines {
            box_major: self.board.box_rows,
            box_minor: self.board.box_cols,
        });
        scene
    }

    fn question(&self, grid: &GridSpec) -> String {
        let v = Vocab::of(grid.topology);
        format!(
            "The puzzle has {n} {rows} and {n} {cols}, divided into boxes of {br} {rows} by {bc} {cols}. Which digit belongs in the highlighted cell at {coord} = ({r}, {c})?",
            n = self.board.n,
            rows = v.rows,
            cols = v.cols,
            br = self.board.box_rows,
            bc = self.board.box_cols,
            coord = v.coord,
            r = self.cell.major,
            c = self.cell.minor,
        )
    }

    fn planted(&self) -> Option<Answer> {
        Some(Answer::Digit(self.source_value as i64))
    }
}

fn shuffled_solution(rng: &mut GenRng, n: usize) -> Result<SudokuBoard, String> {
    let empty = SudokuBoard::empty(n).map_err(|e| e.to_string())?;
    let mut order: Vec<u8> = (1..=n as u8).collect();
    order.shuffle(rng);
    let base = empty.solutions(1, &order).pop().ok_or("no sudoku solution")?;
    // relabel digits and permute rows inside bands and bands themselves
    let mut relabel: Vec<u8> = (1..=n as u8).collect();
    relabel.shuffle(rng);
    let (br, bc) = (base.box_rows, base.box_cols);
    let mut rows: Vec<usize> = Vec::new();
    let mut bands: Vec<usize> = (0..n / br).collect();
    bands.shuffle(rng);
    for b in bands {
        let mut inner: Vec<usize> = (0..br).collect();
        inner.shuffle(rng);
        rows.extend(inner.into_iter().map(|i| b * br + i));
    }
    let mut cols: Vec<usize> = Vec::new();
    let mut stacks: Vec<usize> = (0..n / bc).collect();
    stacks.shuffle(rng);
    for s in stacks {
        let mut inner: Vec<usize> = (0..bc).collect();
        inner.shuffle(rng);
        cols.extend(inner.into_iter().map(|i| s * bc + i));
    }
    let mut out = base.clone();
    for r in 0..n {
        for c in 0..n {
            out.set(r, c, relabel[base.get(rows[r], cols[c]) as usize - 1]);
        }
    }
    Ok(out)
}

pub(super) fn build_sudoku(rng: &mut GenRng, ranges: &Ranges) -> Result<Draft, String> {
    let sizes: Vec<usize> = [6, 9].into_iter().filter(|n| (ranges.major.0..=ranges.major.1).contains(n)).collect();
    let n = *sizes.choose(rng).ok_or("sudoku needs a size of 6 or 9 in range")?;
    let solution = shuffled_solution(rng, n)?;
    let cell = CellRef::new(rng.gen_range(0..n), rng.gen_range(0..n));
    let source_value = solution.get(cell.major, cell.minor);
    let mut board = solution.clone();
    board.set(cell.major, cell.minor, 0);
    let target_clues = if n == 9 { rng.gen_range(28..=36) } else { rng.gen_range(12..=18) };
    let mut order: Vec<CellRef> = (0..n * n).map(|i| CellRef::new(i / n, i % n)).filter(|&c| c != cell).collect();
    order.shuffle(rng);
    let mut clues = n * n - 1;
    for c in order {
        if clues <= target_clues {
            break;
        }
        let keep = board.get(c.major, c.minor);
        board.set(c.major, c.minor, 0);
        if solve_sudoku_cell(&board, cell).is_ok() {
            clues -= 1;
        } else {
            board.set(c.major, c.minor, keep);
        }
    }
    let pool: Vec<u8> = (1..=n as u8).collect();
    let digits = fill_choices(rng, vec![source_value], &pool, 5)?;
    draft(
        Puzzle::Sudoku(Sudoku {
            board,
            cell,
            digits,
            source_value,
        }),
        n,
        n,
    )
}

// --------------------------------------------------------------- n-queens

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NQueens {
    pub n: usize,
    pub fixed: Vec<CellRef>,
    /// The row (or ring) whose queen is asked for.
    pub row: usize,
    /// Option columns in label order.
    pub columns: Vec<usize>,
}

impl TaskPuzzle for NQueens {
    fn solve(&self, grid: &GridSpec) -> Result<Solution, OracleError> {
        check_dims(grid, self.n, self.n)?;
        let res = count_queen_completions(self.n, &self.fixed, grid.boundary)?;
        match (res.count, res.example) {
            (1, Some(cols)) => Ok(Solution::Choice(format!("{},{}", self.row, cols[self.row]))),
            (0, _) => Err(OracleError::Unsolvable),
            (k, _) => Err(OracleError::Ambiguous(format!("{k} completions"))),
        }
    }

    fn choices(&self, _grid: &GridSpec) -> Option<Vec<Choice>> {
        Some(
            self.columns
                .iter()
                .map(|&c| Choice {
                    text: format!("({}, {})", self.row, c),
                    value: format!("{},{}", self.row, c),
                })
                .collect(),
        )
    }

    fn scene(&self, grid: &GridSpec) -> SceneSpec {
        let mut scene = base_scene(grid);
        scene.axis_labels = true;
        for c in 0..self.n {
            scene.cell_fills.insert(CellRef::new(self.row, c), HIGHLIGHT.into());
        }
        for &q in &self.fixed {
            scene.cell_glyphs.insert(q, Glyph::new("Q"));
        }
        scene
    }

    fn question(&self, grid: &GridSpec) -> String {
        let v = Vocab::of(grid.topology);
        format!(
            "The board has {n} {rows} and {n} {cols}; {k} queens are already placed and no queen may be moved. Exactly one way exists to complete the board. In the highlighted {row} {r}, which cell {coord} must hold a queen?",
            n = self.n,
            rows = v.rows,
            cols = v.cols,
            k = self.fixed.len(),
            row = v.row,
            r = self.row,
            coord = v.coord,
        )
    }
}

fn random_queens(rng: &mut GenRng, n: usize) -> Option<Vec<usize>> {
    fn go(rng: &mut GenRng, n: usize, placed: &mut Vec<usize>) -> bool {
        let r = placed.len();
        if r == n {
            return true;
        }
        let mut cols: Vec<usize> = (0..n).collect();
        cols.shuffle(rng);
        for c in cols {
            let ok = placed
                .iter()
                .enumerate()
                .all(|(pr, &pc)| pc != c && pr.abs_diff(r) != pc.abs_diff(c));
            if ok {
                placed.push(c);
                if go(rng, n, placed) {
                    return true;
                }
                placed.pop();
            }
        }
        false
    }
    let mut placed = Vec::new();
    go(rng, n, &mut placed).then_some(placed)
}

pub(super) fn build_queens(rng: &mut GenRng, ranges: &Ranges) -> Result<Draft, String> {
    let n = draw(rng, ranges.major).max(5);
    let solution = random_queens(rng, n).ok_or("no queen solution")?;
    let row = rng.gen_range(0..n);
    let mut fixed: Vec<CellRef> = (0..n).filter(|&r| r != row).map(|r| CellRef::new(r, solution[r])).collect();
    fixed.shuffle(rng);
    // drop further queens while the completion stays unique
    let mut i = 0;
    while i < fixed.len() {
        let mut trial = fixed.clone();
        trial.remove(i);
        let count = count_queen_completions(n, &trial, Boundary::Bounded)
            .map_err(|e| e.to_string())?
            .count;
        if count == 1 {
            fixed = trial;
        } else {
            i += 1;
        }
    }
    if fixed.len() + 2 > n {
        return Err("too few queens removed".into());
    }
    fixed.sort();
    let pool: Vec<usize> = (0..n).collect();
    let columns = fill_choices(rng, vec![solution[row]], &pool, 5)?;
    draft(Puzzle::NQueens(NQueens { n, fixed, row, columns }), n, n)
}

// ---------------------------------------------------------- minimum flips

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MinimumFlips {
    pub cells: Vec<bool>,
    pub strip_len: usize,
    /// Option move counts in label order.
    pub counts: Vec<u32>,
}

impl MinimumFlips {
    fn minimum(&self, boundary: Boundary) -> Result<u32, OracleError> {
        let n = self.cells.len();
        let mut best: Option<u32> = None;
        for first in [true, false] {
            if let FlipOutcome::Moves(m) = min_flip_moves(&self.cells, self.strip_len, &alternating(n, first), boundary)? {
                best = Some(best.map_or(m, |b| b.min(m)));
            }
        }
        best.ok_or_else(|| OracleError::Unreachable("no alternating pattern is reachable".into()))
    }
}

impl TaskPuzzle for MinimumFlips {
    fn solve(&self, grid: &GridSpec) -> Result<Solution, OracleError> {
        check_dims(grid, 1, self.cells.len())?;
        Ok(Solution::Choice(self.minimum(grid.boundary)?.to_string()))
    }

    fn choices(&self, _grid: &GridSpec) -> Option<Vec<Choice>> {
        Some(self.counts.iter().map(|c| Choice::plain(c.to_string())).collect())
    }

    fn scene(&self, grid: &GridSpec) -> SceneSpec {
        let mut scene = base_scene(grid);
        for (i, &b) in self.cells.iter().enumerate() {
            scene.cell_fills.insert(CellRef::new(0, i), if b { BLACK } else { WHITE }.into());
        }
        scene
    }

    fn question(&self, grid: &GridSpec) -> String {
        let v = Vocab::of(grid.topology);
        let n = self.cells.len();
        let seam = match grid.boundary {
            Boundary::Wrapping => format!(
                " The {cols} wrap around: {col} {last} and {col} 0 are consecutive, so a strip may run across them.",
                cols = v.cols,
                col = v.col,
                last = n - 1
            ),
            Boundary::Bounded => format!(" A strip may not run past {col} 0 or {col} {}.", n - 1, col = v.col),
        };
        format!(
            "The strip holds {n} {cols}, each black or white.{seam} What is the minimum number of {k}-cell flips needed to reach an alternating colouring?",
            cols = v.cols,
            k = self.strip_len,
        )
    }
}

pub(super) fn build_flips(rng: &mut GenRng, ranges: &Ranges, layout: &Layout) -> Result<Draft, String> {
    let n = draw(rng, ranges.minor).clamp(3, crate::oracles::MAX_FLIP_CELLS);
    let cells: Vec<bool> = (0..n).map(|_| rng.gen_bool(0.5)).collect();
    let mut puzzle = MinimumFlips {
        cells,
        strip_len: 3,
        counts: Vec::new(),
    };
    let c = puzzle.minimum(layout.cartesian).map_err(|e| e.to_string())?;
    let p = puzzle.minimum(layout.polar).map_err(|e| e.to_string())?;
    if c == 0 || p == 0 {
        return Err("pattern already alternates".into());
    }
    let mut truths = vec![c];
    if p != c {
        truths.push(p);
    }
    let hi = c.max(p) + 4;
    let pool: Vec<u32> = (1..=hi).collect();
    puzzle.counts = fill_choices(rng, truths, &pool, 5)?;
    draft(Puzzle::MinimumFlips(puzzle), 1, n)
}

// --------------------------------------------------------- bouncing point

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BouncingPoint {
    pub start: CellRef,
    pub velocity: (isize, isize),
    pub steps: usize,
}

impl TaskPuzzle for BouncingPoint {
    fn solve(&self, grid: &GridSpec) -> Result<Solution, OracleError> {
        let end = simulate_bouncing_point(grid, self.start, self.velocity, self.steps)?;
        Ok(Solution::Answer(Answer::Coordinate(end.major, end.minor)))
    }

    fn answer_candidates(&self, grid: &GridSpec) -> Option<Vec<Answer>> {
        Some(grid.cells().map(|c| Answer::Coordinate(c.major, c.minor)).collect())
    }

    fn scene(&self, grid: &GridSpec) -> SceneSpec {
        let mut scene = base_scene(grid);
        scene.axis_labels = true;
        scene.overlays.push(Overlay::Marker {
            cell: self.start,
            marker: MarkerKind::Dot,
            color: INK.into(),
        });
        scene.overlays.push(Overlay::Arrow {
            cell: self.start,
            d_major: self.velocity.0,
            d_minor: self.velocity.1,
            color: INK.into(),
        });
        scene
    }

    fn question(&self, grid: &GridSpec) -> String {
        let v = Vocab::of(grid.topology);
        let edges = match grid.boundary {
            Boundary::Wrapping => format!(
                "The {cols} wrap around ({col} {} is next to {col} 0); the innermost and outermost {rows} reflect.",
                grid.minor - 1,
                cols = v.cols,
                col = v.col,
                rows = v.rows
            ),
            Boundary::Bounded => "Every edge of the grid reflects.".to_string(),
        };
        format!(
            "The grid has {} {} and {} {}. The dot starts at {} = ({}, {}) and each step moves it by {} {} and {} {}, as the arrow shows. {edges} Which cell does it occupy after {} steps? Answer with its {} coordinate.",
            grid.major,
            v.rows,
            grid.minor,
            v.cols,
            v.coord,
            self.start.major,
            self.start.minor,
            self.velocity.0,
            v.row,
            self.velocity.1,
            v.col,
            self.steps,
            v.coord,
        )
    }
}

pub(super) fn build_bounce(rng: &mut GenRng, ranges: &Ranges, layout: &Layout) -> Result<Draft, String> {
    let (major, minor) = (draw(rng, ranges.major), draw(rng, ranges.minor));
    let [grid, _] = layout.grids(major, minor);
    let start = random_cell(rng, &grid);
    let velocities: Vec<(isize, isize)> = [-1, 0, 1]
        .into_iter()
        .flat_map(|a| [-1, 0, 1].map(move |b| (a, b)))
        .filter(|&(a, b)| (a, b) != (0, 0) && !(major == 1 && a != 0))
        .collect();
    let velocity = *velocities.choose(rng).ok_or("no velocity")?;
    let steps = rng.gen_range(4..=16);
    draft(Puzzle::BouncingPoint(BouncingPoint { start, velocity, steps }), major, minor)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;

    #[test]
    fn sudoku_source_value_is_forced() {
        let mut rng = GenRng::seed_from_u64(3);
        let d = build_sudoku(&mut rng, &Ranges::new((9, 9), (9, 9))).unwrap();
        let Puzzle::Sudoku(s) = &d.puzzle else { panic!() };
        let grid = GridSpec::cartesian(9, 9, Boundary::Bounded);
        assert_eq!(s.solve(&grid).unwrap(), Solution::Choice(s.source_value.to_string()));
        assert!(s.board.cells.iter().filter(|&&v| v != 0).count() >= 28);
    }

    #[test]
    fn queens_have_unique_completion() {
        let mut rng = GenRng::seed_from_u64(11);
        for _ in 0..5 {
            let d = build_queens(&mut rng, &Ranges::new((5, 8), (5, 8))).unwrap();
            let Puzzle::NQueens(q) = &d.puzzle else { panic!() };
            let grid = GridSpec::cartesian(q.n, q.n, Boundary::Bounded);
            let Solution::Choice(v) = q.solve(&grid).unwrap() else { panic!() };
            assert!(q.choices(&grid).unwrap().iter().filter(|c| c.value == v).count() == 1);
        }
    }
}
