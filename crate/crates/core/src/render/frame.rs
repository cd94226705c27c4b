//! Pixel geometry for each layout.

use super::scene::{Calibration, SceneSpec, COLLISION_FACTOR, MARGIN};
use crate::topology::{CellRef, GridSpec, Heading, Topology};
use std::f64::consts::PI;

pub const PANEL_STRIP: f64 = 170.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Pt {
    pub x: f64,
    pub y: f64,
}

impl Pt {
    pub fn new(x: f64, y: f64) -> Self {
        Pt { x, y }
    }

    pub fn dist(self, o: Pt) -> f64 {
        ((self.x - o.x).powi(2) + (self.y - o.y).powi(2)).sqrt()
    }

    pub fn lerp(self, o: Pt, t: f64) -> Pt {
        Pt::new(self.x + (o.x - self.x) * t, self.y + (o.y - self.y) * t)
    }
}

/// One wall or frame stroke.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Stroke {
    Line(Pt, Pt),
    /// Clockwise arc on a circle of `radius` between two points.
    Arc { from: Pt, to: Pt, radius: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Frame {
    Cartesian {
        x0: f64,
        y0: f64,
        cell: f64,
        grid: GridSpec,
    },
    Polar {
        cx: f64,
        cy: f64,
        r0: f64,
        dr: f64,
        grid: GridSpec,
    },
    Hex {
        cx: f64,
        cy: f64,
        size: f64,
        grid: GridSpec,
    },
    Oct {
        x0: f64,
        y0: f64,
        pitch: f64,
        grid: GridSpec,
    },
}

/// Height of the main drawing area (above any candidate panels).
pub fn main_height(scene: &SceneSpec) -> f64 {
    if scene.panels.is_empty() {
        scene.height
    } else {
        scene.height - PANEL_STRIP
    }
}

/// Outer radius of a Polar render filling a `w` x `h` box.
pub fn polar_outer_radius(w: f64, h: f64) -> f64 {
    w.min(h) / 2.0 - MARGIN
}

impl Frame {
    pub fn for_scene(scene: &SceneSpec) -> Frame {
        Frame::fit(&scene.grid, 0.0, 0.0, scene.width, main_height(scene), scene.calibration, MARGIN)
    }

    /// Fit `grid` into the box at (`left`, `top`) of size `w` x `h`.
    pub fn fit(grid: &GridSpec, left: f64, top: f64, w: f64, h: f64, calibration: Calibration, margin: f64) -> Frame {
        let major = grid.major as f64;
        let minor = grid.minor as f64;
        let uw = w - 2.0 * margin;
        let uh = h - 2.0 * margin;
        match grid.topology {
            Topology::Cartesian => {
                let fill = (uw / minor).min(uh / major);
                let cell = match calibration {
                    Calibration::Fill => fill,
                    Calibration::MatchPolar { inner_radius_ratio } => {
                        let r = w.min(h) / 2.0 - margin;
                        let r0 = inner_radius_ratio * r;
                        let annulus = PI * (r * r - r0 * r0);
                        (annulus / (major * minor)).sqrt().min(fill)
                    }
                };
                Frame::Cartesian {
                    x0: left + (w - cell * minor) / 2.0,
                    y0: top + (h - cell * major) / 2.0,
                    cell,
                    grid: *grid,
                }
            }
            Topology::Polar => {
                let r = w.min(h) / 2.0 - margin;
                let r0 = grid.inner_radius_ratio * r;
                Frame::Polar {
                    cx: left + w / 2.0,
                    cy: top + h / 2.0,
                    r0,
                    dr: (r - r0) / major,
                    grid: *grid,
                }
            }
            Topology::Hexagonal => {
                let n = major;
                let size = (uw / (1.5 * (n - 1.0) + 2.0)).min(uh / (3f64.sqrt() * n));
                Frame::Hex {
                    cx: left + w / 2.0,
                    cy: top + h / 2.0,
                    size,
                    grid: *grid,
                }
            }
            Topology::Octagonal => {
                let pitch = (uw / minor).min(uh / major);
                Frame::Oct {
                    x0: left + (w - pitch * minor) / 2.0,
                    y0: top + (h - pitch * major) / 2.0,
                    pitch,
                    grid: *grid,
                }
            }
        }
    }

    pub fn grid(&self) -> &GridSpec {
        match self {
            Frame::Cartesian { grid, .. }
            | Frame::Polar { grid, .. }
            | Frame::Hex { grid, .. }
            | Frame::Oct { grid, .. } => grid,
        }
    }

    pub fn sector_deg(&self) -> f64 {
        360.0 / self.grid().minor as f64
    }

    /// Point at radius `rho` and clockwise-from-12-o'clock position
    /// `sector_pos` (in sector units).
    pub fn polar_point(cx: f64, cy: f64, rho: f64, sector_pos: f64, minor: usize) -> Pt {
        let theta = (90.0 - sector_pos * 360.0 / minor as f64).to_radians();
        Pt::new(cx + rho * theta.cos(), cy - rho * theta.sin())
    }

    /// Centre of a cell at possibly fractional or out-of-range indices.
    pub fn center_at(&self, major: f64, minor: f64) -> Pt {
        match *self {
            Frame::Cartesian { x0, y0, cell, .. } => Pt::new(x0 + (minor + 0.5) * cell, y0 + (major + 0.5) * cell),
            Frame::Polar { cx, cy, r0, dr, grid } => {
                Frame::polar_point(cx, cy, r0 + (major + 0.5) * dr, minor + 0.5, grid.minor)
            }
            Frame::Hex { cx, cy, size, grid } => {
                let c = (grid.major / 2) as f64;
                let q = minor - c;
                let r = major - c;
                Pt::new(cx + size * 1.5 * q, cy + size * 3f64.sqrt() * (r + q / 2.0))
            }
            Frame::Oct { x0, y0, pitch, .. } => Pt::new(x0 + (minor + 0.5) * pitch, y0 + (major + 0.5) * pitch),
        }
    }

    pub fn center(&self, cell: CellRef) -> Pt {
        self.center_at(cell.major as f64, cell.minor as f64)
    }

    /// Free room around a glyph anchor: the arc length or cell extent
    /// available to a label.
    pub fn label_room(&self, cell: CellRef) -> f64 {
        match *self {
            Frame::Cartesian { cell: size, .. } => size,
            Frame::Polar { r0, dr, grid, .. } => {
                let rho = r0 + (cell.major as f64 + 0.5) * dr;
                let arc = rho * 2.0 * PI / grid.minor as f64;
                arc.min(dr)
            }
            Frame::Hex { size, .. } => 3f64.sqrt() * size,
            Frame::Oct { pitch, .. } => pitch,
        }
    }

    /// Closed outline of a cell as SVG path data.
    pub fn cell_outline(&self, cell: CellRef) -> CellShape {
        match *self {
            Frame::Cartesian { x0, y0, cell: s, .. } => CellShape::Rect {
                x: x0 + cell.minor as f64 * s,
                y: y0 + cell.major as f64 * s,
                w: s,
                h: s,
            },
            Frame::Polar { cx, cy, r0, dr, grid } => {
                let ri = r0 + cell.major as f64 * dr;
                let ro = ri + dr;
                let j = cell.minor as f64;
                let p = |rho: f64, pos: f64| Frame::polar_point(cx, cy, rho, pos, grid.minor);
                CellShape::Annular {
                    outer_start: p(ro, j),
                    outer_end: p(ro, j + 1.0),
                    inner_end: p(ri, j + 1.0),
                    inner_start: p(ri, j),
                    r_in: ri,
                    r_out: ro,
                }
            }
            Frame::Hex { size, .. } => {
                let c = self.center(cell);
                CellShape::Polygon(
                    (0..6)
                        .map(|k| {
                            let a = (60.0 * k as f64).to_radians();
                            Pt::new(c.x + size * a.cos(), c.y + size * a.sin())
                        })
                        .collect(),
                )
            }
            Frame::Oct { pitch, .. } => {
                let c = self.center(cell);
                let h = pitch / 2.0;
                let a = pitch / (2.0 + 2f64.sqrt());
                CellShape::Polygon(vec![
                    Pt::new(c.x - h + a, c.y - h),
                    Pt::new(c.x + h - a, c.y - h),
                    Pt::new(c.x + h, c.y - h + a),
                    Pt::new(c.x + h, c.y + h - a),
                    Pt::new(c.x + h - a, c.y + h),
                    Pt::new(c.x - h + a, c.y + h),
                    Pt::new(c.x - h, c.y + h - a),
                    Pt::new(c.x - h, c.y - h + a),
                ])
            }
        }
    }

    /// The stroke along one side of a cell (square/annular layouts only).
    pub fn side_stroke(&self, cell: CellRef, side: Heading) -> Option<Stroke> {
        match *self {
            Frame::Cartesian { x0, y0, cell: s, .. } => {
                let l = x0 + cell.minor as f64 * s;
                let t = y0 + cell.major as f64 * s;
                let (a, b) = match side {
                    Heading::MajorMinus => (Pt::new(l, t), Pt::new(l + s, t)),
                    Heading::MajorPlus => (Pt::new(l, t + s), Pt::new(l + s, t + s)),
                    Heading::MinorMinus => (Pt::new(l, t), Pt::new(l, t + s)),
                    Heading::MinorPlus => (Pt::new(l + s, t), Pt::new(l + s, t + s)),
                };
                Some(Stroke::Line(a, b))
            }
            Frame::Polar { cx, cy, r0, dr, grid } => {
                let ri = r0 + cell.major as f64 * dr;
                let ro = ri + dr;
                let j = cell.minor as f64;
                let p = |rho: f64, pos: f64| Frame::polar_point(cx, cy, rho, pos, grid.minor);
                Some(match side {
                    Heading::MajorMinus => Stroke::Arc {
                        from: p(ri, j),
                        to: p(ri, j + 1.0),
                        radius: ri,
                    },
                    Heading::MajorPlus => Stroke::Arc {
                        from: p(ro, j),
                        to: p(ro, j + 1.0),
                        radius: ro,
                    },
                    Heading::MinorMinus => Stroke::Line(p(ri, j), p(ro, j)),
                    Heading::MinorPlus => Stroke::Line(p(ri, j + 1.0), p(ro, j + 1.0)),
                })
            }
            _ => None,
        }
    }

    /// Anchor for a label just outside one side of a cell.
    pub fn outside_anchor(&self, cell: CellRef, side: Heading, font_px: f64) -> Pt {
        match *self {
            Frame::Polar { cx, cy, r0, dr, grid } => {
                let ri = r0 + cell.major as f64 * dr;
                let ro = ri + dr;
                let j = cell.minor as f64 + 0.5;
                let rho_mid = (ri + ro) / 2.0;
                let step = (font_px * 1.1) / rho_mid.max(1.0) * grid.minor as f64 / (2.0 * PI);
                match side {
                    Heading::MajorPlus => Frame::polar_point(cx, cy, ro + font_px * 1.1, j, grid.minor),
                    Heading::MajorMinus => Frame::polar_point(cx, cy, (ri - font_px * 1.1).max(0.0), j, grid.minor),
                    Heading::MinorPlus => Frame::polar_point(cx, cy, rho_mid, j + 0.5 + step, grid.minor),
                    Heading::MinorMinus => Frame::polar_point(cx, cy, rho_mid, j - 0.5 - step, grid.minor),
                }
            }
            _ => {
                let c = self.center(cell);
                let half = match *self {
                    Frame::Cartesian { cell: s, .. } => s / 2.0,
                    Frame::Oct { pitch, .. } => pitch / 2.0,
                    Frame::Hex { size, .. } => size,
                    Frame::Polar { .. } => unreachable!(),
                };
                let off = half + font_px * 1.1;
                match side {
                    Heading::MajorPlus => Pt::new(c.x, c.y + off),
                    Heading::MajorMinus => Pt::new(c.x, c.y - off),
                    Heading::MinorPlus => Pt::new(c.x + off, c.y),
                    Heading::MinorMinus => Pt::new(c.x - off, c.y),
                }
            }
        }
    }

    /// Minimum font-room check for one glyph-bearing cell.
    pub fn fits_font(&self, cell: CellRef, font_px: f64) -> bool {
        font_px * COLLISION_FACTOR <= self.label_room(cell) + 1e-9
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum CellShape {
    Rect { x: f64, y: f64, w: f64, h: f64 },
    Annular {
        outer_start: Pt,
        outer_end: Pt,
        inner_end: Pt,
        inner_start: Pt,
        r_in: f64,
        r_out: f64,
    },
    Polygon(Vec<Pt>),
}
