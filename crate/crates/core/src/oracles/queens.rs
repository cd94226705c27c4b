use super::{OracleError, OracleResult};
use crate::topology::{Boundary, CellRef};

pub const MAX_QUEENS: usize = 12;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QueenCount {
    pub count: u64,
    /// Column of the queen in each row for the first completion found.
    pub example: Option<Vec<usize>>,
}

struct Search {
    n: usize,
    torus: bool,
    fixed: Vec<Option<usize>>,
    cols: u32,
    diag: u64,
    anti: u64,
    placed: Vec<usize>,
    count: u64,
    example: Option<Vec<usize>>,
}

impl Search {
    fn keys(&self, r: usize, c: usize) -> (usize, usize) {
        let n = self.n;
        if self.torus {
            ((r + c) % n, (r + n - c) % n)
        } else {
            (r + c, r + n - 1 - c)
        }
    }

    fn free(&self, r: usize, c: usize) -> bool {
        let (d, a) = self.keys(r, c);
        self.cols & (1 << c) == 0 && self.diag & (1 << d) == 0 && self.anti & (1 << a) == 0
    }

    fn toggle(&mut self, r: usize, c: usize) {
        let (d, a) = self.keys(r, c);
        self.cols ^= 1 << c;
        self.diag ^= 1 << d;
        self.anti ^= 1 << a;
    }

    fn run(&mut self, r: usize) {
        if r == self.n {
            self.count += 1;
            if self.example.is_none() {
                self.example = Some(self.placed.clone());
            }
            return;
        }
        let choices: Vec<usize> = match self.fixed[r] {
            Some(c) => vec![c],
            None => (0..self.n).collect(),
        };
        for c in choices {
            if self.free(r, c) {
                self.toggle(r, c);
                self.placed.push(c);
                self.run(r + 1);
                self.placed.pop();
                self.toggle(r, c);
            }
        }
    }
}

fn attacks(a: CellRef, b: CellRef, n: usize, torus: bool) -> bool {
    let (r1, c1, r2, c2) = (a.major as isize, a.minor as isize, b.major as isize, b.minor as isize);
    if r1 == r2 || c1 == c2 {
        return true;
    }
    if torus {
        let n = n as isize;
        (r1 + c1).rem_euclid(n) == (r2 + c2).rem_euclid(n) || (r1 - c1).rem_euclid(n) == (r2 - c2).rem_euclid(n)
    } else {
        (r1 - r2).abs() == (c1 - c2).abs()
    }
}

/// Count non-attacking completions of an N x N board containing the
/// `fixed` queens. `Wrapping` evaluates attacks on the torus.
pub fn count_queen_completions(n: usize, fixed: &[CellRef], boundary: Boundary) -> OracleResult<QueenCount> {
    if n == 0 || n > MAX_QUEENS {
        return Err(OracleError::TooLarge { size: n, limit: MAX_QUEENS });
    }
    let torus = boundary == Boundary::Wrapping;
    let mut rows = vec![None; n];
    for (i, &q) in fixed.iter().enumerate() {
        if q.major >= n || q.minor >= n {
            return Err(OracleError::Precondition(format!("queen {q} is off the {n}x{n} board")));
        }
        if fixed[..i].iter().any(|&p| p == q || attacks(p, q, n, torus)) {
            return Err(OracleError::Precondition(format!("fixed queen {q} is attacked")));
        }
        rows[q.major] = Some(q.minor);
    }
    let mut search = Search {
        n,
        torus,
        fixed: rows,
        cols: 0,
        diag: 0,
        anti: 0,
        placed: Vec::with_capacity(n),
        count: 0,
        example: None,
    };
    search.run(0);
    Ok(QueenCount {
        count: search.count,
        example: search.example,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn four_queens() {
        assert_eq!(count_queen_completions(4, &[], Boundary::Bounded).unwrap().count, 2);
        let one = count_queen_completions(4, &[CellRef::new(0, 1)], Boundary::Bounded).unwrap();
        assert_eq!(one.count, 1);
        assert_eq!(one.example, Some(vec![1, 3, 0, 2]));
    }

    #[test]
    fn classic_counts() {
        let expected = [1, 0, 0, 2, 10, 4, 40, 92];
        for (i, &e) in expected.iter().enumerate() {
            assert_eq!(count_queen_completions(i + 1, &[], Boundary::Bounded).unwrap().count, e);
        }
    }

    #[test]
    fn torus_needs_coprime_six() {
        assert_eq!(count_queen_completions(6, &[], Boundary::Wrapping).unwrap().count, 0);
        assert_eq!(count_queen_completions(8, &[], Boundary::Wrapping).unwrap().count, 0);
        assert!(count_queen_completions(5, &[], Boundary::Wrapping).unwrap().count > 0);
    }

    #[test]
    fn attacking_fixed_set_rejected() {
        let err = count_queen_completions(5, &[CellRef::new(0, 0), CellRef::new(2, 2)], Boundary::Bounded);
        assert!(matches!(err, Err(OracleError::Precondition(_))));
        assert!(count_queen_completions(13, &[], Boundary::Bounded).is_err());
    }
}
