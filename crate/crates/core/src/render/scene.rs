use crate::topology::{CellRef, GridSpec, Heading, Topology};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

/// Hex colour string, e.g. `#9e9e9e`.
pub type Color = String;

pub const DEFAULT_CANVAS: f64 = 640.0;
pub const DEFAULT_FONT_PX: f64 = 16.0;
pub const COLLISION_FACTOR: f64 = 1.2;
/// Space around the grid for rim labels and entrance markers.
pub const MARGIN: f64 = 44.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Glyph {
    pub text: String,
    #[serde(default = "default_ink")]
    pub color: Color,
}

fn default_ink() -> Color {
    "#111111".into()
}

impl Glyph {
    pub fn new(text: impl Into<String>) -> Self {
        Glyph {
            text: text.into(),
            color: default_ink(),
        }
    }

    pub fn colored(text: impl Into<String>, color: impl Into<Color>) -> Self {
        Glyph {
            text: text.into(),
            color: color.into(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MarkerKind {
    Dot,
    Ring,
    Square,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Overlay {
    /// Thick line on one side of a cell.
    Wall { cell: CellRef, side: Heading },
    /// Polyline through cell centres; seam crossings are split.
    Path {
        cells: Vec<CellRef>,
        color: Color,
        arrow: bool,
    },
    Marker {
        cell: CellRef,
        marker: MarkerKind,
        color: Color,
    },
    /// Short arrow leaving a cell centre towards an index offset.
    Arrow {
        cell: CellRef,
        d_major: isize,
        d_minor: isize,
        color: Color,
    },
    /// Text placed just outside the given side of a cell (rim labels).
    EdgeLabel {
        cell: CellRef,
        side: Heading,
        text: String,
    },
    /// Heavier lines between sub-boxes (Sudoku).
    BoxLines { box_major: usize, box_minor: usize },
}

/// A small auxiliary grid drawn below the main one (answer candidates).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Panel {
    pub label: String,
    pub grid: GridSpec,
    pub fills: BTreeMap<CellRef, Color>,
}

/// How the Cartesian grid is sized.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Calibration {
    /// Fill the canvas.
    Fill,
    /// Shrink the grid so its area equals the annulus of the paired Polar
    /// render, leaving white space around it.
    MatchPolar { inner_radius_ratio: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SceneSpec {
    pub grid: GridSpec,
    /// Task family, used to gate hex/oct layouts.
    #[serde(default)]
    pub task: Option<String>,
    #[serde(default)]
    pub cell_fills: BTreeMap<CellRef, Color>,
    #[serde(default)]
    pub cell_glyphs: BTreeMap<CellRef, Glyph>,
    #[serde(default)]
    pub overlays: Vec<Overlay>,
    #[serde(default)]
    pub panels: Vec<Panel>,
    pub width: f64,
    pub height: f64,
    pub font_px: f64,
    /// Draw the minor-axis seam as a barrier (bounded layouts).
    #[serde(default)]
    pub draw_seam: bool,
    /// Print row/column or ring/sector indices around the grid.
    #[serde(default)]
    pub axis_labels: bool,
    pub calibration: Calibration,
}

impl SceneSpec {
    pub fn new(grid: GridSpec) -> Self {
        SceneSpec {
            grid,
            task: None,
            cell_fills: BTreeMap::new(),
            cell_glyphs: BTreeMap::new(),
            overlays: Vec::new(),
            panels: Vec::new(),
            width: DEFAULT_CANVAS,
            height: DEFAULT_CANVAS,
            font_px: DEFAULT_FONT_PX,
            draw_seam: false,
            axis_labels: false,
            calibration: Calibration::Fill,
        }
    }

    pub fn topology(&self) -> Topology {
        self.grid.topology
    }

    /// Every cell referenced by fills, glyphs or overlays.
    pub fn referenced_cells(&self) -> Vec<CellRef> {
        let mut out: Vec<CellRef> = self.cell_fills.keys().chain(self.cell_glyphs.keys()).copied().collect();
        for o in &self.overlays {
            match o {
                Overlay::Wall { cell, .. }
                | Overlay::Marker { cell, .. }
                | Overlay::Arrow { cell, .. }
                | Overlay::EdgeLabel { cell, .. } => out.push(*cell),
                Overlay::Path { cells, .. } => out.extend(cells.iter().copied()),
                Overlay::BoxLines { .. } => {}
            }
        }
        out
    }
}
