use crate::topology::Topology;
use serde::{Deserialize, Serialize};
use std::fmt;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Category {
    Algorithmic,
    Combinatorics,
    Navigation,
    Spatial,
    VisualPattern,
}

impl Category {
    pub const ALL: [Category; 5] = [
        Category::Algorithmic,
        Category::Combinatorics,
        Category::Navigation,
        Category::Spatial,
        Category::VisualPattern,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Category::Algorithmic => "algorithmic",
            Category::Combinatorics => "combinatorics",
            Category::Navigation => "navigation",
            Category::Spatial => "spatial",
            Category::VisualPattern => "visual_pattern",
        }
    }

    pub fn title(self) -> &'static str {
        match self {
            Category::Algorithmic => "Algorithmic",
            Category::Combinatorics => "Combinatorics",
            Category::Navigation => "Navigation",
            Category::Spatial => "Spatial",
            Category::VisualPattern => "Visual Pattern",
        }
    }
}

impl fmt::Display for Category {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AnswerType {
    OptionLabel,
    Digit,
    Coordinate,
    Str,
    IntList,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Alignment {
    FullyAligned,
    PartiallyAligned,
}

impl Alignment {
    pub fn as_str(self) -> &'static str {
        match self {
            Alignment::FullyAligned => "fully_aligned",
            Alignment::PartiallyAligned => "partially_aligned",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundaryPolicy {
    Bounded,
    Wrapping,
    TopologyInvariant,
}

/// How many labelled options an instance carries.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum OptionCount {
    None,
    Fixed(usize),
    Between(usize, usize),
}

impl OptionCount {
    pub fn admits(self, n: usize) -> bool {
        match self {
            OptionCount::None => n == 0,
            OptionCount::Fixed(k) => n == k,
            OptionCount::Between(lo, hi) => (lo..=hi).contains(&n),
        }
    }
}

/// Inclusive randomization bounds for the grid axes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Ranges {
    pub major: (usize, usize),
    pub minor: (usize, usize),
}

impl Ranges {
    pub const fn new(major: (usize, usize), minor: (usize, usize)) -> Self {
        Ranges { major, minor }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct TaskSpec {
    pub id: &'static str,
    pub name: &'static str,
    pub category: Category,
    pub subcategory: &'static str,
    pub answer_type: AnswerType,
    pub alignment: Alignment,
    pub boundary_policy: BoundaryPolicy,
    pub options: OptionCount,
    pub ranges: Ranges,
    pub layouts: &'static [Topology],
    /// Shared rule statement placed in every prompt for this task.
    pub rules: &'static str,
}

const PAIR: &[Topology] = &[Topology::Cartesian, Topology::Polar];
const ALL_LAYOUTS: &[Topology] = &[Topology::Cartesian, Topology::Polar, Topology::Hexagonal, Topology::Octagonal];

static CATALOG: [TaskSpec; 15] = [
    TaskSpec {
        id: "sudoku",
        name: "Sudoku",
        category: Category::Algorithmic,
        subcategory: "constraint puzzle",
        answer_type: AnswerType::OptionLabel,
        alignment: Alignment::FullyAligned,
        boundary_policy: BoundaryPolicy::TopologyInvariant,
        options: OptionCount::Fixed(5),
        ranges: Ranges::new((6, 9), (6, 9)),
        layouts: PAIR,
        rules: "Each row and each column holds every digit exactly once, and so does every box outlined by the heavy lines. Deduce the digit that belongs in the highlighted cell.",
    },
    TaskSpec {
        id: "n_queens",
        name: "N-Queens",
        category: Category::Algorithmic,
        subcategory: "constraint puzzle",
        answer_type: AnswerType::OptionLabel,
        alignment: Alignment::FullyAligned,
        boundary_policy: BoundaryPolicy::Bounded,
        options: OptionCount::Fixed(5),
        ranges: Ranges::new((5, 8), (5, 8)),
        layouts: PAIR,
        rules: "Queens must be placed so that no two share a row, a column or a diagonal; a diagonal steps one index along both axes at once. Some queens are already placed. Complete the board with one queen in every row.",
    },
    TaskSpec {
        id: "minimum_flips",
        name: "Minimum Flips",
        category: Category::Algorithmic,
        subcategory: "state search",
        answer_type: AnswerType::OptionLabel,
        alignment: Alignment::PartiallyAligned,
        boundary_policy: BoundaryPolicy::Wrapping,
        options: OptionCount::Fixed(5),
        ranges: Ranges::new((1, 1), (8, 14)),
        layouts: PAIR,
        rules: "A move flips every cell in a strip of 3 consecutive cells (black becomes white and white becomes black). Find the fewest moves that make the colours alternate, in either of the two alternating patterns.",
    },
    TaskSpec {
        id: "bouncing_point",
        name: "Bouncing Point",
        category: Category::Algorithmic,
        subcategory: "simulation",
        answer_type: AnswerType::Coordinate,
        alignment: Alignment::PartiallyAligned,
        boundary_policy: BoundaryPolicy::Wrapping,
        options: OptionCount::None,
        ranges: Ranges::new((3, 6), (6, 12)),
        layouts: PAIR,
        rules: "A point moves one cell per step in the direction of its arrow. When the next cell would leave the grid, that component of its direction reverses and it moves the other way instead. Where a wrap-around edge exists, the point passes through it and keeps going.",
    },
    TaskSpec {
        id: "lattice_paths",
        name: "Lattice Paths",
        category: Category::Combinatorics,
        subcategory: "path counting",
        answer_type: AnswerType::Digit,
        alignment: Alignment::FullyAligned,
        boundary_policy: BoundaryPolicy::Bounded,
        options: OptionCount::None,
        ranges: Ranges::new((3, 6), (3, 7)),
        layouts: PAIR,
        rules: "A path may only take three kinds of step: one cell along the second axis, one cell along the first axis, or one cell along both at once (increasing the index each time). Dark cells are obstacles and cannot be entered.",
    },
    TaskSpec {
        id: "knight_paths",
        name: "Knight Paths",
        category: Category::Combinatorics,
        subcategory: "walk counting",
        answer_type: AnswerType::Digit,
        alignment: Alignment::PartiallyAligned,
        boundary_policy: BoundaryPolicy::Wrapping,
        options: OptionCount::None,
        ranges: Ranges::new((3, 6), (6, 10)),
        layouts: PAIR,
        rules: "A knight moves two cells along one axis and one cell along the other. Count move sequences of exactly the requested length; cells may be revisited.",
    },
    TaskSpec {
        id: "random_walk",
        name: "Random Walk",
        category: Category::Combinatorics,
        subcategory: "probability",
        answer_type: AnswerType::OptionLabel,
        alignment: Alignment::PartiallyAligned,
        boundary_policy: BoundaryPolicy::Wrapping,
        options: OptionCount::Fixed(5),
        ranges: Ranges::new((2, 4), (3, 5)),
        layouts: PAIR,
        rules: "A walker starts at A. At every step it moves to one of its neighbouring cells, each with equal probability, and it stops as soon as it reaches B.",
    },
    TaskSpec {
        id: "maze",
        name: "Maze",
        category: Category::Navigation,
        subcategory: "maze solving",
        answer_type: AnswerType::OptionLabel,
        alignment: Alignment::FullyAligned,
        boundary_policy: BoundaryPolicy::Bounded,
        options: OptionCount::Between(2, 5),
        ranges: Ranges::new((4, 7), (5, 10)),
        layouts: PAIR,
        rules: "Thick lines are walls and cannot be crossed. The labelled openings on the outer edge are entrances; the square marks the exit.",
    },
    TaskSpec {
        id: "monotonic_path",
        name: "Monotonic Path",
        category: Category::Navigation,
        subcategory: "constrained search",
        answer_type: AnswerType::OptionLabel,
        alignment: Alignment::FullyAligned,
        boundary_policy: BoundaryPolicy::Wrapping,
        options: OptionCount::Fixed(6),
        ranges: Ranges::new((4, 6), (6, 10)),
        layouts: PAIR,
        rules: "Each room holds a number. From the highlighted start room you may only step to a neighbouring room whose number is strictly larger than the current one. The first and last column (or sector) are neighbours.",
    },
    TaskSpec {
        id: "word_search",
        name: "Word Search",
        category: Category::Navigation,
        subcategory: "path counting",
        answer_type: AnswerType::Digit,
        alignment: Alignment::FullyAligned,
        boundary_policy: BoundaryPolicy::TopologyInvariant,
        options: OptionCount::None,
        ranges: Ranges::new((4, 6), (4, 7)),
        layouts: ALL_LAYOUTS,
        rules: "A path moves between cells that share an edge, one letter per step. Cells may be visited more than once. Two paths are different if their sequences of cells differ.",
    },
    TaskSpec {
        id: "wall_follower",
        name: "Wall Follower",
        category: Category::Navigation,
        subcategory: "simulation",
        answer_type: AnswerType::Coordinate,
        alignment: Alignment::FullyAligned,
        boundary_policy: BoundaryPolicy::Bounded,
        options: OptionCount::None,
        ranges: Ranges::new((4, 6), (5, 9)),
        layouts: PAIR,
        rules: "A robot moves forward one cell at a time. Whenever a wall or the grid edge is directly ahead, it turns right by a quarter turn instead of moving. If it turns four times in a row without moving it stops. If it ever returns to a cell while facing the same direction as before, it is in a loop.",
    },
    TaskSpec {
        id: "grid_rotation",
        name: "Grid Rotation",
        category: Category::Spatial,
        subcategory: "mental rotation",
        answer_type: AnswerType::OptionLabel,
        alignment: Alignment::FullyAligned,
        boundary_policy: BoundaryPolicy::TopologyInvariant,
        options: OptionCount::Fixed(5),
        ranges: Ranges::new((4, 4), (4, 4)),
        layouts: PAIR,
        rules: "The large grid is rotated as a whole about its centre. The labelled panels below it are candidate results.",
    },
    TaskSpec {
        id: "area_counting",
        name: "Area Counting",
        category: Category::Spatial,
        subcategory: "region counting",
        answer_type: AnswerType::Digit,
        alignment: Alignment::FullyAligned,
        boundary_policy: BoundaryPolicy::Bounded,
        options: OptionCount::None,
        ranges: Ranges::new((4, 7), (5, 10)),
        layouts: PAIR,
        rules: "Shaded cells belong to the same region when they share an edge. The dot marks one cell of the region in question.",
    },
    TaskSpec {
        id: "pipe_lengths",
        name: "Pipe Lengths",
        category: Category::Spatial,
        subcategory: "partition",
        answer_type: AnswerType::IntList,
        alignment: Alignment::FullyAligned,
        boundary_policy: BoundaryPolicy::TopologyInvariant,
        options: OptionCount::None,
        ranges: Ranges::new((3, 5), (4, 6)),
        layouts: PAIR,
        rules: "Every cell belongs to exactly one pipe. A pipe is a run of same-coloured cells joined edge to edge, and each pipe has its own colour. The length of a pipe is its number of cells.",
    },
    TaskSpec {
        id: "letter_collection",
        name: "Letter Collection",
        category: Category::VisualPattern,
        subcategory: "path tracing",
        answer_type: AnswerType::Str,
        alignment: Alignment::FullyAligned,
        boundary_policy: BoundaryPolicy::Wrapping,
        options: OptionCount::None,
        ranges: Ranges::new((4, 6), (6, 10)),
        layouts: PAIR,
        rules: "Follow the drawn path from its start to the arrowhead. At every cell of the path, look at the cell immediately to your right, relative to your current direction of travel, and collect its letter if it has one. Letters on your left are ignored. The first and last column (or sector) are neighbours.",
    },
];

pub fn catalog() -> &'static [TaskSpec] {
    &CATALOG
}

pub fn task(id: &str) -> Option<&'static TaskSpec> {
    CATALOG.iter().find(|t| t.id == id)
}
