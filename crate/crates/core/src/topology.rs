//! Dual-topology lattice: cell indexing, adjacency and single steps on
//! Cartesian, Polar, Hexagonal and Octagonal layouts.
//!
//! Cartesian rows and Polar rings share the `major` axis; columns and
//! sectors share the `minor` axis. Ring 0 is innermost. Sector 0 starts at
//! 12 o'clock and indices increase clockwise. Only the minor axis can wrap.
//!
//! Hexagonal grids use axial coordinates (`major` = r, `minor` = q) in a
//! hexagon-shaped region centred on `(n/2, n/2)`; they require an odd,
//! square `major == minor`. Octagonal grids are the octagon cells of a
//! truncated-square tiling with 8-adjacency.

use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;
use std::fmt;
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Topology {
    Cartesian,
    Polar,
    Hexagonal,
    Octagonal,
}

impl Topology {
    pub fn as_str(self) -> &'static str {
        match self {
            Topology::Cartesian => "cartesian",
            Topology::Polar => "polar",
            Topology::Hexagonal => "hexagonal",
            Topology::Octagonal => "octagonal",
        }
    }

    /// Axis nouns used in question text and captions.
    pub fn axis_names(self) -> (&'static str, &'static str) {
        match self {
            Topology::Polar => ("ring", "sector"),
            _ => ("row", "column"),
        }
    }
}

impl fmt::Display for Topology {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Boundary {
    Bounded,
    Wrapping,
}

impl Boundary {
    pub fn as_str(self) -> &'static str {
        match self {
            Boundary::Bounded => "bounded",
            Boundary::Wrapping => "wrapping",
        }
    }
}

impl fmt::Display for Boundary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

pub const DEFAULT_INNER_RADIUS_RATIO: f64 = 0.25;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub topology: Topology,
    pub major: usize,
    pub minor: usize,
    pub boundary: Boundary,
    #[serde(default = "default_inner_radius_ratio")]
    pub inner_radius_ratio: f64,
}

fn default_inner_radius_ratio() -> f64 {
    DEFAULT_INNER_RADIUS_RATIO
}

/// Serialized as the string `"major,minor"` so it can key JSON maps.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CellRef {
    pub major: usize,
    pub minor: usize,
}

impl CellRef {
    pub const fn new(major: usize, minor: usize) -> Self {
        CellRef { major, minor }
    }
}

impl Serialize for CellRef {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(&format_args!("{},{}", self.major, self.minor))
    }
}

impl<'de> Deserialize<'de> for CellRef {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        let parsed = s
            .split_once(',')
            .and_then(|(a, b)| Some(CellRef::new(a.trim().parse().ok()?, b.trim().parse().ok()?)));
        parsed.ok_or_else(|| serde::de::Error::custom(format!("expected \"major,minor\", got {s:?}")))
    }
}

impl fmt::Display for CellRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.major, self.minor)
    }
}

/// Outward/inward and clockwise/counterclockwise in Polar; down/up and
/// right/left in Cartesian.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Heading {
    MajorPlus,
    MajorMinus,
    MinorPlus,
    MinorMinus,
}

impl Heading {
    pub const ALL: [Heading; 4] = [
        Heading::MajorPlus,
        Heading::MajorMinus,
        Heading::MinorPlus,
        Heading::MinorMinus,
    ];

    /// Quarter turn clockwise: down -> left -> up -> right -> down.
    pub fn turn_right(self) -> Heading {
        match self {
            Heading::MajorPlus => Heading::MinorMinus,
            Heading::MinorMinus => Heading::MajorMinus,
            Heading::MajorMinus => Heading::MinorPlus,
            Heading::MinorPlus => Heading::MajorPlus,
        }
    }

    pub fn turn_left(self) -> Heading {
        self.turn_right().turn_right().turn_right()
    }

    pub fn reverse(self) -> Heading {
        self.turn_right().turn_right()
    }

    pub fn delta(self) -> (isize, isize) {
        match self {
            Heading::MajorPlus => (1, 0),
            Heading::MajorMinus => (-1, 0),
            Heading::MinorPlus => (0, 1),
            Heading::MinorMinus => (0, -1),
        }
    }

    pub fn describe(self, topology: Topology) -> &'static str {
        match (topology, self) {
            (Topology::Polar, Heading::MajorPlus) => "outward",
            (Topology::Polar, Heading::MajorMinus) => "inward",
            (Topology::Polar, Heading::MinorPlus) => "clockwise",
            (Topology::Polar, Heading::MinorMinus) => "counterclockwise",
            (_, Heading::MajorPlus) => "down",
            (_, Heading::MajorMinus) => "up",
            (_, Heading::MinorPlus) => "right",
            (_, Heading::MinorMinus) => "left",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TopologyError {
    #[error("cell {cell} is outside the {major}x{minor} grid")]
    OutOfRange {
        cell: CellRef,
        major: usize,
        minor: usize,
    },
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("map_cell expects a cartesian or polar grid, got {0}")]
    NotMappable(Topology),
}

/// Result of [`step`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Step {
    Moved(CellRef),
    Blocked,
}

impl Step {
    pub fn cell(self) -> Option<CellRef> {
        match self {
            Step::Moved(c) => Some(c),
            Step::Blocked => None,
        }
    }
}

const HEX_DIRS: [(isize, isize); 6] = [(0, 1), (0, -1), (1, 0), (-1, 0), (-1, 1), (1, -1)];
const OCT_DIRS: [(isize, isize); 8] = [
    (-1, -1),
    (-1, 0),
    (-1, 1),
    (0, -1),
    (0, 1),
    (1, -1),
    (1, 0),
    (1, 1),
];

impl GridSpec {
    pub fn new(topology: Topology, major: usize, minor: usize, boundary: Boundary) -> Result<Self, TopologyError> {
        let spec = GridSpec {
            topology,
            major,
            minor,
            boundary,
            inner_radius_ratio: DEFAULT_INNER_RADIUS_RATIO,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn cartesian(major: usize, minor: usize, boundary: Boundary) -> Self {
        GridSpec::new(Topology::Cartesian, major, minor, boundary).expect("valid cartesian grid")
    }

    pub fn polar(major: usize, minor: usize, boundary: Boundary) -> Self {
        GridSpec::new(Topology::Polar, major, minor, boundary).expect("valid polar grid")
    }

    pub fn with_inner_radius_ratio(mut self, ratio: f64) -> Self {
        self.inner_radius_ratio = ratio;
        self
    }

    pub fn with_topology(mut self, topology: Topology) -> Self {
        self.topology = topology;
        self
    }

    pub fn with_boundary(mut self, boundary: Boundary) -> Self {
        self.boundary = boundary;
        self
    }

    pub fn validate(&self) -> Result<(), TopologyError> {
        if self.major == 0 || self.minor == 0 {
            return Err(TopologyError::InvalidGrid("dimensions must be at least 1".into()));
        }
        if !(self.inner_radius_ratio > 0.0 && self.inner_radius_ratio < 1.0) {
            return Err(TopologyError::InvalidGrid(format!(
                "inner_radius_ratio {} not in (0,1)",
                self.inner_radius_ratio
            )));
        }
        match self.topology {
            Topology::Polar if self.minor < 3 => Err(TopologyError::InvalidGrid(
                "polar grids need at least 3 sectors".into(),
            )),
            Topology::Hexagonal if self.major != self.minor || self.major % 2 == 0 => Err(
                TopologyError::InvalidGrid("hexagonal grids need an odd, square extent".into()),
            ),
            _ => Ok(()),
        }
    }

    pub fn contains(&self, cell: CellRef) -> bool {
        if cell.major >= self.major || cell.minor >= self.minor {
            return false;
        }
        if self.topology == Topology::Hexagonal {
            let c = (self.major / 2) as isize;
            let dr = cell.major as isize - c;
            let dq = cell.minor as isize - c;
            return dr.abs().max(dq.abs()).max((dr + dq).abs()) <= c;
        }
        true
    }

    pub fn check(&self, cell: CellRef) -> Result<(), TopologyError> {
        if self.contains(cell) {
            Ok(())
        } else {
            Err(TopologyError::OutOfRange {
                cell,
                major: self.major,
                minor: self.minor,
            })
        }
    }

    /// All in-range cells in row-major order.
    pub fn cells(&self) -> impl Iterator<Item = CellRef> + '_ {
        (0..self.major)
            .flat_map(move |r| (0..self.minor).map(move |c| CellRef::new(r, c)))
            .filter(move |c| self.contains(*c))
    }

    pub fn cell_count(&self) -> usize {
        self.cells().count()
    }

    pub fn index(&self, cell: CellRef) -> usize {
        cell.major * self.minor + cell.minor
    }

    /// Offset a cell, wrapping the minor axis when `wrap` is set and the
    /// grid is wrapping. Returns `None` when the result leaves the grid.
    pub fn offset(&self, cell: CellRef, d_major: isize, d_minor: isize, wrap: bool) -> Option<CellRef> {
        let r = cell.major as isize + d_major;
        if r < 0 || r >= self.major as isize {
            return None;
        }
        let mut c = cell.minor as isize + d_minor;
        let m = self.minor as isize;
        if wrap && self.boundary == Boundary::Wrapping {
            c = c.rem_euclid(m);
        } else if c < 0 || c >= m {
            return None;
        }
        let out = CellRef::new(r as usize, c as usize);
        self.contains(out).then_some(out)
    }

    /// Whether moving from `a` to `b` crosses the minor-axis seam.
    pub fn crosses_seam(&self, a: CellRef, b: CellRef) -> bool {
        a.minor.abs_diff(b.minor) > 1
    }
}

/// Row-to-ring, column-to-sector identity mapping. Applied to a Polar spec
/// it maps back to Cartesian.
pub fn map_cell(cell: CellRef, spec: &GridSpec) -> Result<CellRef, TopologyError> {
    match spec.topology {
        Topology::Cartesian | Topology::Polar => {
            spec.check(cell)?;
            Ok(cell)
        }
        other => Err(TopologyError::NotMappable(other)),
    }
}

/// The counterpart grid of a Cartesian/Polar spec under `map_cell`.
pub fn mapped_spec(spec: &GridSpec) -> Result<GridSpec, TopologyError> {
    let topology = match spec.topology {
        Topology::Cartesian => Topology::Polar,
        Topology::Polar => Topology::Cartesian,
        other => return Err(TopologyError::NotMappable(other)),
    };
    let out = spec.with_topology(topology);
    out.validate()?;
    Ok(out)
}

pub fn neighbors(cell: CellRef, spec: &GridSpec) -> Result<BTreeSet<CellRef>, TopologyError> {
    spec.check(cell)?;
    let dirs: &[(isize, isize)] = match spec.topology {
        Topology::Cartesian | Topology::Polar => &[(1, 0), (-1, 0), (0, 1), (0, -1)],
        Topology::Hexagonal => &HEX_DIRS,
        Topology::Octagonal => &OCT_DIRS,
    };
    let wrap = matches!(spec.topology, Topology::Cartesian | Topology::Polar);
    Ok(dirs
        .iter()
        .filter_map(|&(dr, dc)| spec.offset(cell, dr, dc, wrap))
        .filter(|&n| n != cell)
        .collect())
}

/// Neighbors as a vector, for hot loops that already know the cell is valid.
pub(crate) fn neighbor_vec(cell: CellRef, spec: &GridSpec) -> Vec<CellRef> {
    neighbors(cell, spec).map(|s| s.into_iter().collect()).unwrap_or_default()
}

pub fn step(cell: CellRef, heading: Heading, spec: &GridSpec) -> Result<Step, TopologyError> {
    spec.check(cell)?;
    let (dr, dc) = heading.delta();
    Ok(match spec.offset(cell, dr, dc, true) {
        Some(c) if c != cell => Step::Moved(c),
        _ => Step::Blocked,
    })
}

/// Undirected edge set of the adjacency graph, each edge stored once with
/// its smaller endpoint first.
pub fn edge_set(spec: &GridSpec) -> BTreeSet<(CellRef, CellRef)> {
    let mut out = BTreeSet::new();
    for c in spec.cells() {
        for n in neighbor_vec(c, spec) {
            out.insert(if c < n { (c, n) } else { (n, c) });
        }
    }
    out
}

/// One side of one cell. Normalised so the same physical edge has one key.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct CellEdge {
    pub cell: CellRef,
    pub side: Heading,
}

impl CellEdge {
    /// Normalise so interior edges are keyed from the cell on their
    /// MajorMinus/MinorMinus side. Boundary edges keep their own cell.
    pub fn normalized(cell: CellRef, side: Heading, spec: &GridSpec) -> CellEdge {
        match side {
            Heading::MajorPlus | Heading::MinorPlus => CellEdge { cell, side },
            Heading::MajorMinus | Heading::MinorMinus => match step(cell, side, spec) {
                Ok(Step::Moved(other)) => CellEdge {
                    cell: other,
                    side: side.reverse(),
                },
                _ => CellEdge { cell, side },
            },
        }
    }
}
