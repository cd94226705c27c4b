use super::{draft, draw, random_cell, seam_note, turn_rule, Draft, GenRng, Layout};
use crate::oracles::{collect_right_hand_letters, OracleError};
use crate::render::{Glyph, MarkerKind, Overlay, SceneSpec};
use crate::taskgen::answer::Answer;
use crate::taskgen::catalog::Ranges;
use crate::taskgen::puzzle::{base_scene, Puzzle, Solution, TaskPuzzle, Vocab, BLACK, INK};
use crate::topology::{step, CellRef, GridSpec, Heading, Step, Topology};
use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LetterCollection {
    /// Walked cells with the facing direction held in each.
    pub path: Vec<(CellRef, Heading)>,
    pub letters: BTreeMap<CellRef, char>,
    /// Letters placed on the right-hand side, in walk order.
    pub planted: String,
}

impl TaskPuzzle for LetterCollection {
    fn solve(&self, grid: &GridSpec) -> Result<Solution, OracleError> {
        Ok(Solution::Answer(Answer::Str(collect_right_hand_letters(grid, &self.path, &self.letters)?)))
    }

    fn scene(&self, grid: &GridSpec) -> SceneSpec {
        let mut scene = base_scene(grid);
        for (&c, &ch) in &self.letters {
            scene.cell_glyphs.insert(c, Glyph::new(ch.to_string()));
        }
        scene.overlays.push(Overlay::Path {
            cells: self.path.iter().map(|(c, _)| *c).collect(),
            color: INK.into(),
            arrow: true,
        });
        scene.overlays.push(Overlay::Marker {
            cell: self.path[0].0,
            marker: MarkerKind::Square,
            color: BLACK.into(),
        });
        scene
    }

    fn question(&self, grid: &GridSpec) -> String {
        let v = Vocab::of(grid.topology);
        let hand = match grid.topology {
            Topology::Polar => format!(
                " Here directions are named by index: {} The cell on your right is the neighbour you would face after one right turn.",
                turn_rule(grid.topology)
            ),
            _ => String::new(),
        };
        format!(
            "The grid has {} {} and {} {}. You walk along the blue arrow from the black square to its tip. At every cell of the walk, including the first and the last, you pick up the letter in the cell directly on your right-hand side, if there is one.{}{} Which letters do you collect, in order?",
            grid.major,
            v.rows,
            grid.minor,
            v.cols,
            seam_note(grid),
            hand
        )
    }

    fn planted(&self) -> Option<Answer> {
        Some(Answer::Str(self.planted.clone()))
    }
}

fn side_cell(grid: &GridSpec, cell: CellRef, h: Heading) -> Option<CellRef> {
    match step(cell, h, grid) {
        Ok(Step::Moved(c)) => Some(c),
        _ => None,
    }
}

pub(super) fn build_letters(rng: &mut GenRng, ranges: &Ranges, layout: &Layout) -> Result<Draft, String> {
    let (major, minor) = (draw(rng, ranges.major), draw(rng, ranges.minor));
    let [grid, _] = layout.grids(major, minor);
    let len = rng.gen_range(6..=12);
    let start = random_cell(rng, &grid);
    let mut cells = vec![start];
    let mut headings = Vec::new();
    let mut heading = *Heading::ALL.choose(rng).unwrap();
    while cells.len() < len {
        let at = *cells.last().unwrap();
        // prefer going straight so the walk reads as a path, not a scribble
        let mut options = vec![heading, heading, heading.turn_right(), heading.turn_left()];
        options.shuffle(rng);
        let Some((h, next)) = options
            .into_iter()
            .filter_map(|h| side_cell(&grid, at, h).map(|c| (h, c)))
            .find(|(_, c)| !cells.contains(c))
        else {
            break;
        };
        headings.push(h);
        heading = h;
        cells.push(next);
    }
    if cells.len() < 6 {
        return Err("walk got stuck".into());
    }
    headings.push(heading);
    let path: Vec<(CellRef, Heading)> = cells.iter().copied().zip(headings).collect();
    let on_path: BTreeSet<CellRef> = cells.iter().copied().collect();
    let rights: Vec<Option<CellRef>> = path.iter().map(|&(c, h)| side_cell(&grid, c, h.turn_right())).collect();
    let lefts: BTreeSet<CellRef> = path.iter().filter_map(|&(c, h)| side_cell(&grid, c, h.turn_left())).collect();
    let right_count = |c: CellRef| rights.iter().filter(|r| **r == Some(c)).count();
    // right-hand slots seen exactly once and never from the left
    let mut slots: Vec<usize> = (0..path.len())
        .filter(|&i| {
            rights[i].is_some_and(|c| !on_path.contains(&c) && right_count(c) == 1 && !lefts.contains(&c))
        })
        .collect();
    let want = rng.gen_range(3..=5);
    if slots.len() < want {
        return Err("not enough right-hand cells".into());
    }
    slots.shuffle(rng);
    slots.truncate(want);
    slots.sort_unstable();
    let mut alphabet: Vec<char> = ('A'..='Z').collect();
    alphabet.shuffle(rng);
    let mut letters = BTreeMap::new();
    let mut planted = String::new();
    for (&i, &ch) in slots.iter().zip(&alphabet) {
        letters.insert(rights[i].unwrap(), ch);
        planted.push(ch);
    }
    let mut decoys: Vec<CellRef> = lefts
        .iter()
        .copied()
        .filter(|c| !on_path.contains(c) && right_count(*c) == 0)
        .collect();
    decoys.shuffle(rng);
    let n_decoys = rng.gen_range(2..=3);
    for (&c, &ch) in decoys.iter().take(n_decoys).zip(&alphabet[want..]) {
        letters.insert(c, ch);
    }
    let puzzle = LetterCollection { path, letters, planted };
    draft(Puzzle::LetterCollection(puzzle), major, minor)
}
