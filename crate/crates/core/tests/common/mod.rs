//! Brute-force reference implementations and random case generators for
//! checking the oracles. Adjacency is rebuilt here from first principles
//! rather than taken from the topology module.

#![allow(dead_code)]

use polarbench::oracles::{
    connected_region_size, count_fixed_length_walks, count_monotone_paths, count_queen_completions,
    count_word_paths, min_flip_moves, pipe_lengths, solve_sudoku_cell, walk_pass_probability, FlipOutcome, Move,
    MoveSet, OracleError, SudokuBoard,
};
use polarbench::topology::{Boundary, CellRef, GridSpec, Topology};
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use std::collections::{BTreeMap, BTreeSet};

pub type Pos = (usize, usize);

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Shape {
    /// Four-neighbour rectangle (Cartesian or Polar).
    Square,
    Hex,
    /// Eight-neighbour rectangle.
    Oct,
}

#[derive(Debug, Clone, Copy)]
pub struct Board {
    pub rows: usize,
    pub cols: usize,
    pub wrap: bool,
    pub shape: Shape,
}

impl Board {
    pub fn of(spec: &GridSpec) -> Board {
        let shape = match spec.topology {
            Topology::Cartesian | Topology::Polar => Shape::Square,
            Topology::Hexagonal => Shape::Hex,
            Topology::Octagonal => Shape::Oct,
        };
        Board {
            rows: spec.major,
            cols: spec.minor,
            wrap: spec.boundary == Boundary::Wrapping && shape == Shape::Square,
            shape,
        }
    }

    fn cube(&self, (r, c): Pos) -> (isize, isize, isize) {
        let k = (self.rows / 2) as isize;
        let x = c as isize - k;
        let z = r as isize - k;
        (x, -x - z, z)
    }

    pub fn contains(&self, p: Pos) -> bool {
        if p.0 >= self.rows || p.1 >= self.cols {
            return false;
        }
        match self.shape {
            Shape::Hex => {
                let (x, y, z) = self.cube(p);
                x.abs().max(y.abs()).max(z.abs()) <= (self.rows / 2) as isize
            }
            _ => true,
        }
    }

    pub fn cells(&self) -> Vec<Pos> {
        let mut out = Vec::new();
        for r in 0..self.rows {
            for c in 0..self.cols {
                if self.contains((r, c)) {
                    out.push((r, c));
                }
            }
        }
        out
    }

    /// Translate by a vector; the column wraps only when `may_wrap`.
    pub fn shift(&self, (r, c): Pos, dr: isize, dc: isize, may_wrap: bool) -> Option<Pos> {
        let r2 = r as isize + dr;
        let mut c2 = c as isize + dc;
        if r2 < 0 || r2 >= self.rows as isize {
            return None;
        }
        if may_wrap && self.wrap {
            c2 = ((c2 % self.cols as isize) + self.cols as isize) % self.cols as isize;
        }
        if c2 < 0 || c2 >= self.cols as isize {
            return None;
        }
        let p = (r2 as usize, c2 as usize);
        self.contains(p).then_some(p)
    }

    pub fn adjacent(&self, p: Pos) -> Vec<Pos> {
        let mut out: Vec<Pos> = match self.shape {
            Shape::Square => [(1, 0), (-1, 0), (0, 1), (0, -1)]
                .iter()
                .filter_map(|&(dr, dc)| self.shift(p, dr, dc, true))
                .collect(),
            Shape::Oct => (-1..=1)
                .flat_map(|dr| (-1..=1).map(move |dc| (dr, dc)))
                .filter_map(|(dr, dc)| self.shift(p, dr, dc, false))
                .collect(),
            Shape::Hex => {
                let a = self.cube(p);
                self.cells()
                    .into_iter()
                    .filter(|&q| {
                        let b = self.cube(q);
                        (a.0 - b.0).abs() + (a.1 - b.1).abs() + (a.2 - b.2).abs() == 2
                    })
                    .collect()
            }
        };
        out.sort();
        out.dedup();
        out.retain(|&q| q != p);
        out
    }
}

fn cell(p: Pos) -> CellRef {
    CellRef::new(p.0, p.1)
}

fn pos(c: CellRef) -> Pos {
    (c.major, c.minor)
}

/// A random Cartesian or Polar grid of at most `max_cells` cells.
pub fn small_grid(rng: &mut ChaCha8Rng, max_cells: usize) -> GridSpec {
    let polar = rng.gen_bool(0.5);
    let boundary = if rng.gen_bool(0.5) { Boundary::Wrapping } else { Boundary::Bounded };
    loop {
        let rows = rng.gen_range(1..=max_cells.min(6));
        let cols = rng.gen_range(if polar { 3 } else { 1 }..=max_cells.min(8));
        if rows * cols <= max_cells {
            return if polar {
                GridSpec::polar(rows, cols, boundary)
            } else {
                GridSpec::cartesian(rows, cols, boundary)
            };
        }
    }
}

fn pick(rng: &mut ChaCha8Rng, cells: &[Pos]) -> Pos {
    *cells.choose(rng).expect("non-empty grid")
}

/// Agreement of a library result with a brute-force value. Errors must
/// coincide with the reference rejecting the case.
fn agree<T: PartialEq + std::fmt::Debug>(what: &str, got: Result<T, OracleError>, want: Option<T>) -> Result<(), String> {
    match (got, want) {
        (Ok(g), Some(w)) if g == w => Ok(()),
        (Err(_), None) => Ok(()),
        (g, w) => Err(format!("{what}: oracle {g:?}, brute force {w:?}")),
    }
}

// ---- monotone paths ----

pub fn naive_monotone_paths(
    b: &Board,
    moves: &[Move],
    at: Pos,
    end: Pos,
    blocked: &BTreeSet<Pos>,
    checkpoint: Option<Pos>,
    passed: bool,
) -> u128 {
    let passed = passed || checkpoint == Some(at);
    let mut total = u128::from(at == end && (checkpoint.is_none() || passed));
    for m in moves {
        if let Some(next) = b.shift(at, m.d_major, m.d_minor, m.wraps) {
            if !blocked.contains(&next) {
                total += naive_monotone_paths(b, moves, next, end, blocked, checkpoint, passed);
            }
        }
    }
    total
}

pub fn check_monotone_case(rng: &mut ChaCha8Rng) -> Result<(), String> {
    let spec = small_grid(rng, 16);
    let b = Board::of(&spec);
    let moves = match rng.gen_range(0..3) {
        0 => MoveSet::right_down(),
        1 => MoveSet::lattice(),
        _ => MoveSet::new(vec![Move::new(1, -1, true), Move::new(1, 0, false), Move::new(1, 1, true)]).unwrap(),
    };
    let cells = b.cells();
    let blocked: BTreeSet<Pos> = cells.iter().copied().filter(|_| rng.gen_bool(0.2)).collect();
    let (start, end) = (pick(rng, &cells), pick(rng, &cells));
    let checkpoint = rng.gen_bool(0.3).then(|| pick(rng, &cells));
    let got = count_monotone_paths(
        &spec,
        &moves,
        cell(start),
        cell(end),
        &blocked.iter().map(|&p| cell(p)).collect(),
        checkpoint.map(cell),
    );
    let want = (!blocked.contains(&start) && !blocked.contains(&end))
        .then(|| naive_monotone_paths(&b, &moves.moves, start, end, &blocked, checkpoint, false));
    agree(&format!("monotone paths on {spec:?}"), got, want)
}

// ---- fixed-length walks ----

pub fn naive_walks(b: &Board, moves: &[Move], at: Pos, target: Pos, k: usize) -> u128 {
    if k == 0 {
        return u128::from(at == target);
    }
    moves
        .iter()
        .filter_map(|m| b.shift(at, m.d_major, m.d_minor, m.wraps))
        .map(|next| naive_walks(b, moves, next, target, k - 1))
        .sum()
}

pub fn check_walks_case(rng: &mut ChaCha8Rng) -> Result<(), String> {
    let spec = small_grid(rng, 16);
    let b = Board::of(&spec);
    let cells = b.cells();
    let k = rng.gen_range(0..=4);
    let (start, target) = (pick(rng, &cells), pick(rng, &cells));
    let moves = MoveSet::knight();
    let got = count_fixed_length_walks(&spec, &moves, cell(start), cell(target), k);
    agree(
        &format!("knight walks k={k} on {spec:?}"),
        got,
        Some(naive_walks(&b, &moves.moves, start, target, k)),
    )
}

// ---- word paths ----

pub fn naive_word_paths(b: &Board, letters: &BTreeMap<Pos, char>, word: &[char], at: Pos) -> u128 {
    if letters.get(&at) != Some(&word[0]) {
        return 0;
    }
    if word.len() == 1 {
        return 1;
    }
    b.adjacent(at)
        .into_iter()
        .map(|n| naive_word_paths(b, letters, &word[1..], n))
        .sum()
}

pub fn check_word_case(rng: &mut ChaCha8Rng) -> Result<(), String> {
    let spec = match rng.gen_range(0..4) {
        0 => GridSpec::new(Topology::Hexagonal, 5, 5, Boundary::Bounded).unwrap(),
        1 => GridSpec::new(Topology::Octagonal, rng.gen_range(2..=4), rng.gen_range(2..=4), Boundary::Bounded).unwrap(),
        _ => small_grid(rng, 16),
    };
    let b = Board::of(&spec);
    let alphabet = ['A', 'B', 'C'];
    let k = rng.gen_range(2..=3);
    let letters: BTreeMap<Pos, char> = b.cells().into_iter().map(|p| (p, alphabet[rng.gen_range(0..k)])).collect();
    let len = rng.gen_range(1..=4);
    let word: Vec<char> = (0..len).map(|_| alphabet[rng.gen_range(0..k)]).collect();
    let start = pick(rng, &b.cells());
    let got = count_word_paths(
        &spec,
        &letters.iter().map(|(&p, &ch)| (cell(p), ch)).collect(),
        &word.iter().collect::<String>(),
        cell(start),
    );
    let want = (letters[&start] == word[0]).then(|| naive_word_paths(&b, &letters, &word, start));
    agree(&format!("word paths {word:?} on {spec:?}"), got, want)
}

// ---- queens ----

pub fn queens_attack(a: Pos, b: Pos, n: usize, torus: bool) -> bool {
    let (r1, c1, r2, c2) = (a.0 as i64, a.1 as i64, b.0 as i64, b.1 as i64);
    let n = n as i64;
    if r1 == r2 || c1 == c2 {
        return true;
    }
    if torus {
        (r1 + c1 - r2 - c2).rem_euclid(n) == 0 || (r1 - c1 - r2 + c2).rem_euclid(n) == 0
    } else {
        (r1 - r2).abs() == (c1 - c2).abs()
    }
}

/// Count `n`-subsets of the board that are pairwise non-attacking and
/// contain every fixed queen.
pub fn naive_queens(n: usize, fixed: &[Pos], torus: bool) -> u64 {
    let cells: Vec<Pos> = (0..n).flat_map(|r| (0..n).map(move |c| (r, c))).collect();
    fn rec(cells: &[Pos], from: usize, chosen: &mut Vec<Pos>, n: usize, fixed: &[Pos], torus: bool) -> u64 {
        if chosen.len() == n {
            return u64::from(fixed.iter().all(|f| chosen.contains(f)));
        }
        let mut total = 0;
        for i in from..cells.len() {
            let p = cells[i];
            if chosen.iter().all(|&q| !queens_attack(p, q, n, torus)) {
                chosen.push(p);
                total += rec(cells, i + 1, chosen, n, fixed, torus);
                chosen.pop();
            }
        }
        total
    }
    rec(&cells, 0, &mut Vec::new(), n, fixed, torus)
}

pub fn check_queens_case(rng: &mut ChaCha8Rng) -> Result<(), String> {
    let n = rng.gen_range(1..=4);
    let torus = rng.gen_bool(0.5);
    let boundary = if torus { Boundary::Wrapping } else { Boundary::Bounded };
    let k = rng.gen_range(0..=2.min(n));
    let mut fixed: Vec<Pos> = Vec::new();
    for _ in 0..k {
        fixed.push((rng.gen_range(0..n), rng.gen_range(0..n)));
    }
    let legal = fixed
        .iter()
        .enumerate()
        .all(|(i, &a)| fixed[..i].iter().all(|&b| a != b && !queens_attack(a, b, n, torus)));
    let got = count_queen_completions(n, &fixed.iter().map(|&p| cell(p)).collect::<Vec<_>>(), boundary)
        .map(|q| q.count);
    let want = legal.then(|| naive_queens(n, &fixed, torus));
    agree(&format!("queens n={n} torus={torus} fixed={fixed:?}"), got, want)
}

// ---- connected region ----

pub fn naive_region(b: &Board, shaded: &BTreeSet<Pos>, seed: Pos) -> usize {
    let mut reach = BTreeSet::from([seed]);
    loop {
        let grown: BTreeSet<Pos> = reach
            .iter()
            .flat_map(|&p| b.adjacent(p))
            .filter(|q| shaded.contains(q))
            .chain(reach.iter().copied())
            .collect();
        if grown.len() == reach.len() {
            return reach.len();
        }
        reach = grown;
    }
}

pub fn check_region_case(rng: &mut ChaCha8Rng) -> Result<(), String> {
    let spec = small_grid(rng, 16);
    let b = Board::of(&spec);
    let p = rng.gen_range(0.2..0.8);
    let shaded: BTreeSet<Pos> = b.cells().into_iter().filter(|_| rng.gen_bool(p)).collect();
    let seed = pick(rng, &b.cells());
    let got = connected_region_size(&spec, &shaded.iter().map(|&p| cell(p)).collect(), cell(seed));
    let want = shaded.contains(&seed).then(|| naive_region(&b, &shaded, seed));
    agree(&format!("region on {spec:?}"), got, want)
}

// ---- pipes ----

/// Held-Karp reachability: is there a simple path visiting every cell of
/// `class` using only adjacencies inside it?
pub fn naive_has_path(b: &Board, class: &[Pos]) -> bool {
    let k = class.len();
    let idx = |p: Pos| class.iter().position(|&q| q == p);
    let adj: Vec<u32> = class
        .iter()
        .map(|&p| b.adjacent(p).into_iter().filter_map(idx).fold(0, |m, j| m | (1 << j)))
        .collect();
    let mut dp = vec![0u32; 1 << k];
    for v in 0..k {
        dp[1 << v] |= 1 << v;
    }
    for mask in 1..(1usize << k) {
        for v in 0..k {
            if dp[mask] & (1 << v) == 0 {
                continue;
            }
            let mut nexts = adj[v] & !(mask as u32);
            while nexts != 0 {
                let w = nexts.trailing_zeros() as usize;
                nexts &= nexts - 1;
                dp[mask | (1 << w)] |= 1 << w;
            }
        }
    }
    dp[(1 << k) - 1] != 0
}

pub fn check_pipes_case(rng: &mut ChaCha8Rng) -> Result<(), String> {
    let spec = small_grid(rng, 12);
    let b = Board::of(&spec);
    let cells = b.cells();
    // Grow classes by random walks so that many colourings are valid.
    let mut coloring: BTreeMap<Pos, usize> = BTreeMap::new();
    let mut color = 0;
    let mut order = cells.clone();
    order.shuffle(rng);
    for start in order {
        if coloring.contains_key(&start) {
            continue;
        }
        let mut at = start;
        coloring.insert(at, color);
        for _ in 0..rng.gen_range(0..5) {
            let free: Vec<Pos> = b.adjacent(at).into_iter().filter(|q| !coloring.contains_key(q)).collect();
            let Some(&next) = free.choose(rng) else { break };
            coloring.insert(next, color);
            at = next;
        }
        color += 1;
    }
    if rng.gen_bool(0.3) {
        let p = pick(rng, &cells);
        coloring.insert(p, rng.gen_range(0..color));
    }
    let mut classes: BTreeMap<usize, Vec<Pos>> = BTreeMap::new();
    for (&p, &c) in &coloring {
        classes.entry(c).or_default().push(p);
    }
    let valid = classes.values().all(|cl| naive_has_path(&b, cl));
    let mut sizes: Vec<usize> = classes.values().map(Vec::len).collect();
    sizes.sort_unstable_by(|a, b| b.cmp(a));
    let got = pipe_lengths(&spec, &coloring.iter().map(|(&p, &c)| (cell(p), c)).collect());
    agree(&format!("pipes on {spec:?}"), got, valid.then_some(sizes))
}

// ---- flips ----

/// Flips commute and are involutions, so an optimal plan uses each strip at
/// most once: search all subsets of strips.
pub fn naive_flips(cells: &[bool], strip: usize, target: &[bool], wrap: bool) -> Option<u32> {
    let n = cells.len();
    let starts = if wrap { n } else { n + 1 - strip };
    let strips: Vec<Vec<usize>> = (0..starts).map(|s| (0..strip).map(|k| (s + k) % n).collect()).collect();
    let mut best: Option<u32> = None;
    for subset in 0u32..(1 << starts) {
        let mut state = cells.to_vec();
        for (i, s) in strips.iter().enumerate() {
            if subset & (1 << i) != 0 {
                for &j in s {
                    state[j] = !state[j];
                }
            }
        }
        if state == target {
            let used = subset.count_ones();
            best = Some(best.map_or(used, |b| b.min(used)));
        }
    }
    best
}

pub fn check_flips_case(rng: &mut ChaCha8Rng) -> Result<(), String> {
    let n = rng.gen_range(1..=14);
    let strip = rng.gen_range(1..=n.min(4));
    let wrap = rng.gen_bool(0.5);
    let cells: Vec<bool> = (0..n).map(|_| rng.gen_bool(0.5)).collect();
    let target: Vec<bool> = if rng.gen_bool(0.5) {
        (0..n).map(|i| i % 2 == 0).collect()
    } else {
        (0..n).map(|_| rng.gen_bool(0.5)).collect()
    };
    let boundary = if wrap { Boundary::Wrapping } else { Boundary::Bounded };
    let got = min_flip_moves(&cells, strip, &target, boundary).map(FlipOutcome::moves);
    agree(
        &format!("flips n={n} strip={strip} wrap={wrap}"),
        got,
        Some(naive_flips(&cells, strip, &target, wrap)),
    )
}

// ---- sudoku ----

/// Every valid 4x4 grid with 2x2 boxes.
pub fn all_sudoku4() -> Vec<[u8; 16]> {
    let perms: Vec<[u8; 4]> = {
        let mut out = Vec::new();
        for a in 1..=4u8 {
            for b in 1..=4u8 {
                for c in 1..=4u8 {
                    for d in 1..=4u8 {
                        let row = [a, b, c, d];
                        let mut s = row.to_vec();
                        s.sort();
                        if s == [1, 2, 3, 4] {
                            out.push(row);
                        }
                    }
                }
            }
        }
        out
    };
    let mut grids = Vec::new();
    for r0 in &perms {
        for r1 in &perms {
            for r2 in &perms {
                for r3 in &perms {
                    let rows = [r0, r1, r2, r3];
                    let mut g = [0u8; 16];
                    for r in 0..4 {
                        g[r * 4..r * 4 + 4].copy_from_slice(rows[r]);
                    }
                    let col_ok = (0..4).all(|c| {
                        let mut v: Vec<u8> = (0..4).map(|r| g[r * 4 + c]).collect();
                        v.sort();
                        v == [1, 2, 3, 4]
                    });
                    let box_ok = (0..4).all(|bx| {
                        let (br, bc) = (bx / 2 * 2, bx % 2 * 2);
                        let mut v: Vec<u8> = (0..4).map(|k| g[(br + k / 2) * 4 + bc + k % 2]).collect();
                        v.sort();
                        v == [1, 2, 3, 4]
                    });
                    if col_ok && box_ok {
                        grids.push(g);
                    }
                }
            }
        }
    }
    grids
}

pub fn check_sudoku_case(rng: &mut ChaCha8Rng, all: &[[u8; 16]]) -> Result<(), String> {
    let solution = all.choose(rng).unwrap();
    let keep = rng.gen_range(0.1..0.8);
    let givens: Vec<u8> = solution.iter().map(|&v| if rng.gen_bool(keep) { v } else { 0 }).collect();
    let target = rng.gen_range(0..16);
    let mut board = SudokuBoard::empty(4).unwrap();
    for (i, &v) in givens.iter().enumerate() {
        if v != 0 {
            board.set(i / 4, i % 4, v);
        }
    }
    let values: BTreeSet<u8> = all
        .iter()
        .filter(|g| givens.iter().zip(g.iter()).all(|(&a, &b)| a == 0 || a == b))
        .map(|g| g[target])
        .collect();
    let want = (values.len() == 1).then(|| *values.iter().next().unwrap());
    let got = solve_sudoku_cell(&board, CellRef::new(target / 4, target % 4));
    agree(&format!("sudoku cell {target} of {givens:?}"), got, want)
}

// ---- random walk ----

/// Fraction of `trials` uniform neighbour walks from `a`, stopped at `b`,
/// that visit `c`.
pub fn monte_carlo_pass(b: &Board, a: Pos, stop: Pos, c: Pos, trials: u32, rng: &mut ChaCha8Rng) -> f64 {
    let adj: BTreeMap<Pos, Vec<Pos>> = b.cells().into_iter().map(|p| (p, b.adjacent(p))).collect();
    let mut hits = 0u32;
    for _ in 0..trials {
        let mut at = a;
        loop {
            if at == c {
                hits += 1;
                break;
            }
            if at == stop {
                break;
            }
            let next = &adj[&at];
            at = next[rng.gen_range(0..next.len())];
        }
    }
    hits as f64 / trials as f64
}

/// A small connected-enough walk case: distinct `a`, `b`, `c` on a grid of
/// at most 16 cells.
pub fn walk_case(rng: &mut ChaCha8Rng) -> (GridSpec, Pos, Pos, Pos) {
    loop {
        let spec = small_grid(rng, 16);
        let b = Board::of(&spec);
        let cells = b.cells();
        if cells.len() < 3 {
            continue;
        }
        let mut picks = cells.clone();
        picks.shuffle(rng);
        let (a, stop, c) = (picks[0], picks[1], picks[2]);
        return (spec, a, stop, c);
    }
}

pub fn check_walk_case(rng: &mut ChaCha8Rng, trials: u32, tol: f64) -> Result<(f64, f64), String> {
    let (spec, a, stop, c) = walk_case(rng);
    let exact = walk_pass_probability(&spec, cell(a), cell(stop), cell(c))
        .map_err(|e| format!("oracle failed on {spec:?}: {e}"))?
        .to_f64();
    let est = monte_carlo_pass(&Board::of(&spec), a, stop, c, trials, rng);
    if (exact - est).abs() <= tol {
        Ok((exact, est))
    } else {
        Err(format!("walk on {spec:?} a={a:?} b={stop:?} c={c:?}: exact {exact}, simulated {est}"))
    }
}

pub fn adjacency_matches_library(spec: &GridSpec) -> Result<(), String> {
    let b = Board::of(spec);
    for p in b.cells() {
        let mine: BTreeSet<Pos> = b.adjacent(p).into_iter().collect();
        let lib: BTreeSet<Pos> = polarbench::topology::neighbors(cell(p), spec)
            .map_err(|e| e.to_string())?
            .into_iter()
            .map(pos)
            .collect();
        if mine != lib {
            return Err(format!("{spec:?} at {p:?}: expected {mine:?}, library {lib:?}"));
        }
    }
    Ok(())
}
