use super::{OracleError, OracleResult};
use crate::topology::CellRef;
use serde::{Deserialize, Serialize};

/// N x N board with rectangular boxes; 0 marks an empty cell.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SudokuBoard {
    pub n: usize,
    pub box_rows: usize,
    pub box_cols: usize,
    pub cells: Vec<u8>,
}

impl SudokuBoard {
    pub fn empty(n: usize) -> OracleResult<Self> {
        let (box_rows, box_cols) = match n {
            4 => (2, 2),
            6 => (2, 3),
            9 => (3, 3),
            _ => return Err(OracleError::Precondition(format!("unsupported sudoku size {n}"))),
        };
        Ok(SudokuBoard {
            n,
            box_rows,
            box_cols,
            cells: vec![0; n * n],
        })
    }

    pub fn get(&self, r: usize, c: usize) -> u8 {
        self.cells[r * self.n + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: u8) {
        self.cells[r * self.n + c] = v;
    }

    /// Bitmask of digits (bit d for digit d) that may go in an empty cell.
    pub fn candidates(&self, r: usize, c: usize) -> u16 {
        let full: u16 = ((1u32 << (self.n + 1)) - 2) as u16;
        let mut used = 0u16;
        for k in 0..self.n {
            used |= 1 << self.get(r, k);
            used |= 1 << self.get(k, c);
        }
        let (br, bc) = (r / self.box_rows * self.box_rows, c / self.box_cols * self.box_cols);
        for i in br..br + self.box_rows {
            for j in bc..bc + self.box_cols {
                used |= 1 << self.get(i, j);
            }
        }
        full & !used
    }

    /// No digit repeats in any row, column or box.
    pub fn is_consistent(&self) -> bool {
        for r in 0..self.n {
            for c in 0..self.n {
                let v = self.get(r, c);
                if v == 0 {
                    continue;
                }
                if v as usize > self.n {
                    return false;
                }
                let mut probe = self.clone();
                probe.set(r, c, 0);
                if probe.candidates(r, c) & (1 << v) == 0 {
                    return false;
                }
            }
        }
        true
    }

    /// Up to `limit` completions, trying digits in `order` at each branch.
    pub fn solutions(&self, limit: usize, order: &[u8]) -> Vec<SudokuBoard> {
        let mut out = Vec::new();
        if self.is_consistent() {
            let mut work = self.clone();
            work.search(limit, order, &mut out);
        }
        out
    }

    pub fn count_solutions(&self, limit: usize) -> usize {
        let order: Vec<u8> = (1..=self.n as u8).collect();
        self.solutions(limit, &order).len()
    }

    fn search(&mut self, limit: usize, order: &[u8], out: &mut Vec<SudokuBoard>) {
        if out.len() >= limit {
            return;
        }
        // most constrained empty cell
        let mut best: Option<(usize, usize, u16)> = None;
        for r in 0..self.n {
            for c in 0..self.n {
                if self.get(r, c) != 0 {
                    continue;
                }
                let cand = self.candidates(r, c);
                if best.is_none_or(|(_, _, b)| cand.count_ones() < b.count_ones()) {
                    best = Some((r, c, cand));
                    if cand.count_ones() <= 1 {
                        break;
                    }
                }
            }
        }
        let Some((r, c, cand)) = best else {
            out.push(self.clone());
            return;
        };
        for &d in order {
            if cand & (1 << d) != 0 {
                self.set(r, c, d);
                self.search(limit, order, out);
                self.set(r, c, 0);
                if out.len() >= limit {
                    return;
                }
            }
        }
    }
}

/// Value of `cell` shared by every completion of `board`.
pub fn solve_sudoku_cell(board: &SudokuBoard, cell: CellRef) -> OracleResult<u8> {
    if cell.major >= board.n || cell.minor >= board.n {
        return Err(OracleError::Precondition(format!("cell {cell} is off the board")));
    }
    if !board.is_consistent() {
        return Err(OracleError::Unsolvable);
    }
    let given = board.get(cell.major, cell.minor);
    let digits: Vec<u8> = if given != 0 {
        vec![given]
    } else {
        (1..=board.n as u8)
            .filter(|&d| board.candidates(cell.major, cell.minor) & (1 << d) != 0)
            .collect()
    };
    let mut feasible = Vec::new();
    for d in digits {
        let mut probe = board.clone();
        probe.set(cell.major, cell.minor, d);
        if probe.count_solutions(1) > 0 {
            feasible.push(d);
        }
    }
    match feasible.as_slice() {
        [] => Err(OracleError::Unsolvable),
        [d] => Ok(*d),
        many => Err(OracleError::Ambiguous(format!("cell {cell} admits {many:?}"))),
    }
}
