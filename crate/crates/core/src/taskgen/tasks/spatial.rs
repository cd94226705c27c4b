use super::{draft, draw, random_cell, Draft, GenRng, Layout};
use crate::oracles::{connected_region_size, pipe_lengths, rotate_grid, OracleError};
use crate::render::{MarkerKind, Overlay, Panel, SceneSpec, PANEL_STRIP};
use crate::taskgen::answer::{Answer, OPTION_LABELS};
use crate::taskgen::catalog::Ranges;
use crate::taskgen::puzzle::{base_scene, Choice, Puzzle, Solution, TaskPuzzle, Vocab, BLACK, INK, PALETTE, SHADE};
use crate::topology::{neighbor_vec, Boundary, CellRef, GridSpec, Topology};
use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet};

// ---------------------------------------------------------- grid rotation

/// How a candidate panel is derived from the source pattern.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PanelKind {
    Rotated(usize),
    Mirrored,
    /// The correct rotation with one cell recoloured.
    Altered { cell: CellRef, color: String },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridRotation {
    pub fills: BTreeMap<CellRef, String>,
    pub quarter_turns: usize,
    pub panels: Vec<PanelKind>,
}

fn canonical(fills: &BTreeMap<CellRef, String>) -> String {
    fills.iter().map(|(c, v)| format!("{},{}={v}", c.major, c.minor)).collect::<Vec<_>>().join(";")
}

fn mirror(grid: &GridSpec, fills: &BTreeMap<CellRef, String>) -> BTreeMap<CellRef, String> {
    fills
        .iter()
        .map(|(c, v)| (CellRef::new(c.major, grid.minor - 1 - c.minor), v.clone()))
        .collect()
}

impl GridRotation {
    fn panel_fills(&self, grid: &GridSpec, kind: &PanelKind) -> Result<BTreeMap<CellRef, String>, OracleError> {
        Ok(match kind {
            PanelKind::Rotated(q) => rotate_grid(grid, &self.fills, *q)?,
            PanelKind::Mirrored => mirror(grid, &rotate_grid(grid, &self.fills, self.quarter_turns)?),
            PanelKind::Altered { cell, color } => {
                let mut m = rotate_grid(grid, &self.fills, self.quarter_turns)?;
                m.insert(*cell, color.clone());
                m
            }
        })
    }
}

impl TaskPuzzle for GridRotation {
    fn solve(&self, grid: &GridSpec) -> Result<Solution, OracleError> {
        Ok(Solution::Choice(canonical(&rotate_grid(grid, &self.fills, self.quarter_turns)?)))
    }

    fn choices(&self, grid: &GridSpec) -> Option<Vec<Choice>> {
        self.panels
            .iter()
            .enumerate()
            .map(|(i, k)| {
                self.panel_fills(grid, k).ok().map(|m| Choice {
                    text: format!("panel {}", OPTION_LABELS[i]),
                    value: canonical(&m),
                })
            })
            .collect()
    }

    fn scene(&self, grid: &GridSpec) -> SceneSpec {
        let mut scene = base_scene(grid);
        scene.height = scene.width + PANEL_STRIP;
        scene.cell_fills = self.fills.clone();
        for (i, kind) in self.panels.iter().enumerate() {
            scene.panels.push(Panel {
                label: OPTION_LABELS[i].to_string(),
                grid: *grid,
                fills: self.panel_fills(grid, kind).unwrap_or_default(),
            });
        }
        scene
    }

    fn question(&self, grid: &GridSpec) -> String {
        let turn = if self.quarter_turns == 1 { "90 degrees clockwise" } else { "90 degrees counterclockwise" };
        let what = match grid.topology {
            Topology::Polar => "the disc",
            _ => "the square grid",
        };
        format!(
            "The large pattern at the top is rotated {turn} as a whole ({what} turns about its centre). Which of the panels A to E below shows the result?"
        )
    }
}

pub(super) fn build_rotation(rng: &mut GenRng, ranges: &Ranges, layout: &Layout) -> Result<Draft, String> {
    let (major, minor) = (draw(rng, ranges.major), draw(rng, ranges.minor));
    let grids = layout.grids(major, minor);
    let colors: Vec<&str> = PALETTE.choose_multiple(rng, 3).copied().collect();
    let k = rng.gen_range(5..=8).min(grids[0].cell_count());
    let mut cells: Vec<CellRef> = grids[0].cells().collect();
    cells.shuffle(rng);
    let fills: BTreeMap<CellRef, String> =
        cells.iter().take(k).map(|&c| (c, colors.choose(rng).unwrap().to_string())).collect();
    let quarter_turns = if rng.gen_bool(0.5) { 1 } else { 3 };
    let cell = random_cell(rng, &grids[0]);
    let rotated = rotate_grid(&grids[0], &fills, quarter_turns).map_err(|e| e.to_string())?;
    let color = PALETTE
        .iter()
        .find(|p| !colors.contains(p) && rotated.get(&cell).map(String::as_str) != Some(**p))
        .unwrap()
        .to_string();
    let mut panels = vec![
        PanelKind::Rotated(quarter_turns),
        PanelKind::Rotated(4 - quarter_turns),
        PanelKind::Rotated(2),
        PanelKind::Mirrored,
        PanelKind::Altered { cell, color },
    ];
    panels.shuffle(rng);
    let puzzle = GridRotation {
        fills,
        quarter_turns,
        panels,
    };
    for g in &grids {
        let values: BTreeSet<String> = puzzle
            .choices(g)
            .ok_or("rotation panels failed")?
            .into_iter()
            .map(|c| c.value)
            .collect();
        if values.len() != puzzle.panels.len() {
            return Err("pattern is symmetric; panels coincide".into());
        }
    }
    draft(Puzzle::GridRotation(puzzle), major, minor)
}

// ---------------------------------------------------------- area counting

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AreaCounting {
    pub shaded: BTreeSet<CellRef>,
    pub seed: CellRef,
    /// Number of cells painted into the seed's region.
    pub painted: usize,
}

impl TaskPuzzle for AreaCounting {
    fn solve(&self, grid: &GridSpec) -> Result<Solution, OracleError> {
        let n = connected_region_size(grid, &self.shaded, self.seed)?;
        Ok(Solution::Answer(Answer::Digit(n as i64)))
    }

    fn scene(&self, grid: &GridSpec) -> SceneSpec {
        let mut scene = base_scene(grid);
        for &c in &self.shaded {
            scene.cell_fills.insert(c, SHADE.into());
        }
        scene.overlays.push(Overlay::Marker {
            cell: self.seed,
            marker: MarkerKind::Dot,
            color: INK.into(),
        });
        scene
    }

    fn question(&self, grid: &GridSpec) -> String {
        let v = Vocab::of(grid.topology);
        format!(
            "The grid has {} {} and {} {}. Gray cells that share an edge belong to the same shape. How many cells make up the gray shape containing the blue dot?",
            grid.major, v.rows, grid.minor, v.cols
        )
    }

    fn planted(&self) -> Option<Answer> {
        Some(Answer::Digit(self.painted as i64))
    }
}

pub(super) fn build_area(rng: &mut GenRng, ranges: &Ranges, layout: &Layout) -> Result<Draft, String> {
    let (major, minor) = (draw(rng, ranges.major), draw(rng, ranges.minor));
    let [grid, _] = layout.grids(major, minor);
    // adjacency is checked on the wrapped grid too, so no reading of the
    // seam can merge a distractor into the region
    let wrapped = grid.with_boundary(Boundary::Wrapping);
    let target = rng.gen_range(3..=12).min(grid.cell_count() / 2);
    let seed = random_cell(rng, &grid);
    let mut region = BTreeSet::from([seed]);
    while region.len() < target {
        let frontier: Vec<CellRef> = region
            .iter()
            .flat_map(|&c| neighbor_vec(c, &grid))
            .filter(|n| !region.contains(n))
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect();
        let Some(&next) = frontier.choose(rng) else { break };
        region.insert(next);
    }
    let near: BTreeSet<CellRef> = region
        .iter()
        .flat_map(|&c| neighbor_vec(c, &grid).into_iter().chain(neighbor_vec(c, &wrapped)))
        .chain(region.iter().copied())
        .collect();
    let mut far: Vec<CellRef> = grid.cells().filter(|c| !near.contains(c)).collect();
    far.shuffle(rng);
    let extra = rng.gen_range(2..=6).min(far.len());
    let mut shaded = region.clone();
    shaded.extend(far.into_iter().take(extra));
    let puzzle = AreaCounting {
        shaded,
        seed,
        painted: region.len(),
    };
    draft(Puzzle::AreaCounting(puzzle), major, minor)
}

// ----------------------------------------------------------- pipe lengths

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PipeLengths {
    /// Pipe index per cell; every cell belongs to exactly one pipe.
    pub coloring: BTreeMap<CellRef, usize>,
    /// Cells of each pipe in path order.
    pub pipes: Vec<Vec<CellRef>>,
}

impl TaskPuzzle for PipeLengths {
    fn solve(&self, grid: &GridSpec) -> Result<Solution, OracleError> {
        let lengths = pipe_lengths(grid, &self.coloring)?;
        Ok(Solution::Answer(Answer::IntList(lengths.into_iter().map(|n| n as i64).collect())))
    }

    fn scene(&self, grid: &GridSpec) -> SceneSpec {
        let mut scene = base_scene(grid);
        for (&c, &p) in &self.coloring {
            scene.cell_fills.insert(c, PALETTE[p % PALETTE.len()].into());
        }
        for pipe in &self.pipes {
            scene.overlays.push(Overlay::Path {
                cells: pipe.clone(),
                color: BLACK.into(),
                arrow: false,
            });
        }
        scene
    }

    fn question(&self, grid: &GridSpec) -> String {
        let v = Vocab::of(grid.topology);
        format!(
            "The grid has {} {} and {} {}, and every cell is part of exactly one coloured pipe. Count the cells in each pipe and list the counts from largest to smallest, for example [5, 3, 3].",
            grid.major, v.rows, grid.minor, v.cols
        )
    }

    fn planted(&self) -> Option<Answer> {
        let mut lengths: Vec<i64> = self.pipes.iter().map(|p| p.len() as i64).collect();
        lengths.sort_unstable_by(|a, b| b.cmp(a));
        Some(Answer::IntList(lengths))
    }
}

/// Partition the grid into simple paths of 2..=6 cells.
fn partition_paths(rng: &mut GenRng, grid: &GridSpec) -> Option<Vec<Vec<CellRef>>> {
    let mut free: BTreeSet<CellRef> = grid.cells().collect();
    let mut pipes: Vec<Vec<CellRef>> = Vec::new();
    let free_degree = |c: CellRef, free: &BTreeSet<CellRef>| neighbor_vec(c, grid).into_iter().filter(|n| free.contains(n)).count();
    while !free.is_empty() {
        // start from the most constrained free cell
        let min = free.iter().map(|&c| free_degree(c, &free)).min()?;
        let starts: Vec<CellRef> = free.iter().copied().filter(|&c| free_degree(c, &free) == min).collect();
        let start = *starts.choose(rng)?;
        free.remove(&start);
        let mut pipe = vec![start];
        let want = rng.gen_range(2..=6);
        while pipe.len() < want {
            let tail = *pipe.last().unwrap();
            let next: Vec<CellRef> = neighbor_vec(tail, grid).into_iter().filter(|n| free.contains(n)).collect();
            let Some(&n) = next.choose(rng) else { break };
            free.remove(&n);
            pipe.push(n);
        }
        pipes.push(pipe);
    }
    // attach singletons to a pipe end they touch
    let mut i = 0;
    while i < pipes.len() {
        if pipes[i].len() > 1 {
            i += 1;
            continue;
        }
        let cell = pipes[i][0];
        let host = (0..pipes.len()).find(|&j| {
            j != i
                && pipes[j].len() > 1
                && [pipes[j][0], *pipes[j].last().unwrap()].iter().any(|e| neighbor_vec(cell, grid).contains(e))
        })?;
        let h = &mut pipes[host];
        if neighbor_vec(cell, grid).contains(h.last().unwrap()) {
            h.push(cell);
        } else {
            h.insert(0, cell);
        }
        pipes.remove(i);
        i = 0;
    }
    Some(pipes)
}

pub(super) fn build_pipes(rng: &mut GenRng, ranges: &Ranges, layout: &Layout) -> Result<Draft, String> {
    let (major, minor) = (draw(rng, ranges.major), draw(rng, ranges.minor));
    let [grid, _] = layout.grids(major, minor);
    let mut pipes = partition_paths(rng, &grid).ok_or("could not absorb a single-cell pipe")?;
    if pipes.len() > PALETTE.len() {
        return Err(format!("{} pipes exceed the palette", pipes.len()));
    }
    pipes.shuffle(rng);
    let coloring = pipes
        .iter()
        .enumerate()
        .flat_map(|(i, p)| p.iter().map(move |&c| (c, i)))
        .collect();
    draft(Puzzle::PipeLengths(PipeLengths { coloring, pipes }), major, minor)
}
