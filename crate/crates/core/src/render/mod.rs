//! Deterministic SVG rendering of task scenes.
//!
//! Output is a pure function of the [`SceneSpec`]: numbers are printed with
//! fixed precision and elements are emitted in a fixed order, so identical
//! scenes produce byte-identical documents.

mod frame;
mod scene;

pub use frame::{main_height, polar_outer_radius, CellShape, Frame, Pt, Stroke, PANEL_STRIP};
pub use scene::{
    Calibration, Color, Glyph, MarkerKind, Overlay, Panel, SceneSpec, COLLISION_FACTOR, DEFAULT_CANVAS,
    DEFAULT_FONT_PX, MARGIN,
};

use crate::topology::{Boundary, CellRef, Heading, Topology};
use std::fmt::Write as _;
use thiserror::Error;

pub const WORD_SEARCH_TASK: &str = "word_search";
const CELL_FILL: &str = "#ffffff";
const GRID_STROKE: &str = "#555555";
const WALL_STROKE: &str = "#111111";

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SvgDoc {
    pub bytes: Vec<u8>,
}

impl SvgDoc {
    pub fn as_str(&self) -> &str {
        std::str::from_utf8(&self.bytes).expect("svg output is utf-8")
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum RenderError {
    #[error("scene topology {found} cannot be drawn by the {expected} renderer")]
    WrongTopology { expected: &'static str, found: Topology },
    #[error("cell {0} referenced by the scene is outside the grid")]
    OutOfRange(CellRef),
    #[error(
        "label collision at cell {cell}: font {font_px:.1}px needs {needed:.1}px but only {available:.1}px is free{hint}"
    )]
    Collision {
        cell: CellRef,
        font_px: f64,
        needed: f64,
        available: f64,
        hint: &'static str,
    },
    #[error("layout {layout} is only available for the word-search family (task: {task:?})")]
    UnsupportedLayout { layout: Topology, task: Option<String> },
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
}

/// Dispatch on the scene topology.
pub fn render(scene: &SceneSpec) -> Result<SvgDoc, RenderError> {
    match scene.grid.topology {
        Topology::Cartesian => render_cartesian(scene),
        Topology::Polar => render_polar(scene),
        Topology::Hexagonal | Topology::Octagonal => render_tiling(scene),
    }
}

pub fn render_cartesian(scene: &SceneSpec) -> Result<SvgDoc, RenderError> {
    if scene.grid.topology != Topology::Cartesian {
        return Err(RenderError::WrongTopology {
            expected: "cartesian",
            found: scene.grid.topology,
        });
    }
    draw(scene, "; enlarge the canvas or reduce the grid")
}

pub fn render_polar(scene: &SceneSpec) -> Result<SvgDoc, RenderError> {
    if scene.grid.topology != Topology::Polar {
        return Err(RenderError::WrongTopology {
            expected: "polar",
            found: scene.grid.topology,
        });
    }
    draw(scene, "; use a larger inner_radius_ratio")
}

pub fn render_tiling(scene: &SceneSpec) -> Result<SvgDoc, RenderError> {
    let layout = scene.grid.topology;
    if !matches!(layout, Topology::Hexagonal | Topology::Octagonal) {
        return Err(RenderError::WrongTopology {
            expected: "tiling",
            found: layout,
        });
    }
    if scene.task.as_deref() != Some(WORD_SEARCH_TASK) {
        return Err(RenderError::UnsupportedLayout {
            layout,
            task: scene.task.clone(),
        });
    }
    draw(scene, "; enlarge the canvas")
}

/// Estimated glyph bounding box (width, height) in px.
pub fn glyph_box(text: &str, font_px: f64) -> (f64, f64) {
    (0.6 * font_px * text.chars().count().max(1) as f64, font_px)
}

pub fn check_collisions(scene: &SceneSpec, frame: &Frame, hint: &'static str) -> Result<(), RenderError> {
    for &cell in scene.cell_glyphs.keys() {
        let available = frame.label_room(cell);
        if !frame.fits_font(cell, scene.font_px) {
            return Err(RenderError::Collision {
                cell,
                font_px: scene.font_px,
                needed: scene.font_px * COLLISION_FACTOR,
                available,
                hint,
            });
        }
    }
    Ok(())
}

fn draw(scene: &SceneSpec, hint: &'static str) -> Result<SvgDoc, RenderError> {
    scene.grid.validate().map_err(|e| RenderError::InvalidGrid(e.to_string()))?;
    if let Some(bad) = scene.referenced_cells().into_iter().find(|c| !scene.grid.contains(*c)) {
        return Err(RenderError::OutOfRange(bad));
    }
    for p in &scene.panels {
        if let Some(bad) = p.fills.keys().find(|c| !p.grid.contains(**c)) {
            return Err(RenderError::OutOfRange(*bad));
        }
    }
    let frame = Frame::for_scene(scene);
    check_collisions(scene, &frame, hint)?;

    let mut w = SvgWriter::new(scene.width, scene.height);
    if scene.overlays.iter().any(|o| matches!(o, Overlay::Path { arrow: true, .. } | Overlay::Arrow { .. })) {
        w.raw("<defs><marker id=\"arrowhead\" viewBox=\"0 0 10 10\" refX=\"8\" refY=\"5\" markerWidth=\"6\" markerHeight=\"6\" orient=\"auto-start-reverse\"><path d=\"M0,0 L10,5 L0,10 z\" fill=\"context-stroke\"/></marker></defs>\n");
    }

    w.raw("<g class=\"cells\">\n");
    for cell in scene.grid.cells() {
        let fill = scene.cell_fills.get(&cell).map(String::as_str).unwrap_or(CELL_FILL);
        cell_element(&mut w, &frame.cell_outline(cell), fill, GRID_STROKE, 1.0, "cell");
    }
    if scene.grid.topology == Topology::Octagonal {
        octagon_gaps(&mut w, &frame);
    }
    w.raw("</g>\n");

    frame_outline(&mut w, scene, &frame);

    if !scene.overlays.is_empty() {
        w.raw("<g class=\"overlays\">\n");
        for o in &scene.overlays {
            overlay(&mut w, scene, &frame, o);
        }
        w.raw("</g>\n");
    }

    if scene.axis_labels {
        axis_labels(&mut w, scene, &frame);
    }

    if !scene.cell_glyphs.is_empty() {
        w.raw("<g class=\"glyphs\">\n");
        for (cell, g) in &scene.cell_glyphs {
            let c = frame.center(*cell);
            w.text(c, scene.font_px, &g.color, &g.text, "glyph");
        }
        w.raw("</g>\n");
    }

    if !scene.panels.is_empty() {
        panels(&mut w, scene);
    }
    Ok(w.finish())
}

fn cell_element(w: &mut SvgWriter, shape: &CellShape, fill: &str, stroke: &str, width: f64, class: &str) {
    match shape {
        CellShape::Rect { x, y, w: cw, h } => {
            let _ = writeln!(
                w.out,
                "<rect class=\"{class}\" x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"{fill}\" stroke=\"{stroke}\" stroke-width=\"{}\"/>",
                num(*x),
                num(*y),
                num(*cw),
                num(*h),
                num(width)
            );
        }
        CellShape::Annular {
            outer_start,
            outer_end,
            inner_end,
            inner_start,
            r_in,
            r_out,
        } => {
            let _ = writeln!(
                w.out,
                "<path class=\"{class}\" d=\"M{} {} A{} {} 0 0 1 {} {} L{} {} A{} {} 0 0 0 {} {} Z\" fill=\"{fill}\" stroke=\"{stroke}\" stroke-width=\"{}\"/>",
                num(outer_start.x),
                num(outer_start.y),
                num(*r_out),
                num(*r_out),
                num(outer_end.x),
                num(outer_end.y),
                num(inner_end.x),
                num(inner_end.y),
                num(*r_in),
                num(*r_in),
                num(inner_start.x),
                num(inner_start.y),
                num(width)
            );
        }
        CellShape::Polygon(pts) => {
            let mut d = String::new();
            for (i, p) in pts.iter().enumerate() {
                let _ = write!(d, "{}{} {} ", if i == 0 { "M" } else { "L" }, num(p.x), num(p.y));
            }
            d.push('Z');
            let _ = writeln!(
                w.out,
                "<path class=\"{class}\" d=\"{d}\" fill=\"{fill}\" stroke=\"{stroke}\" stroke-width=\"{}\"/>",
                num(width)
            );
        }
    }
}

fn octagon_gaps(w: &mut SvgWriter, frame: &Frame) {
    if let Frame::Oct { x0, y0, pitch, grid } = *frame {
        let a = pitch / (2.0 + 2f64.sqrt());
        for r in 1..grid.major {
            for c in 1..grid.minor {
                let x = x0 + c as f64 * pitch;
                let y = y0 + r as f64 * pitch;
                let pts = vec![Pt::new(x, y - a), Pt::new(x + a, y), Pt::new(x, y + a), Pt::new(x - a, y)];
                cell_element(w, &CellShape::Polygon(pts), "#d8d8d8", GRID_STROKE, 1.0, "gap");
            }
        }
    }
}

fn frame_outline(w: &mut SvgWriter, scene: &SceneSpec, frame: &Frame) {
    match *frame {
        Frame::Cartesian { x0, y0, cell, grid } => {
            let x1 = x0 + cell * grid.minor as f64;
            let y1 = y0 + cell * grid.major as f64;
            let _ = writeln!(
                w.out,
                "<path class=\"frame\" d=\"M{} {} L{} {} L{} {} L{} {} Z\" fill=\"none\" stroke=\"{WALL_STROKE}\" stroke-width=\"3\"/>",
                num(x0),
                num(y0),
                num(x1),
                num(y0),
                num(x1),
                num(y1),
                num(x0),
                num(y1)
            );
        }
        Frame::Polar { cx, cy, r0, dr, grid } => {
            let r1 = r0 + dr * grid.major as f64;
            for r in [r0, r1] {
                let _ = writeln!(
                    w.out,
                    "<circle class=\"frame\" cx=\"{}\" cy=\"{}\" r=\"{}\" fill=\"none\" stroke=\"{WALL_STROKE}\" stroke-width=\"3\"/>",
                    num(cx),
                    num(cy),
                    num(r)
                );
            }
            if scene.draw_seam && grid.boundary == Boundary::Bounded {
                let a = Frame::polar_point(cx, cy, r0, 0.0, grid.minor);
                let b = Frame::polar_point(cx, cy, r1, 0.0, grid.minor);
                w.line(a, b, WALL_STROKE, 5.0, "seam");
            }
        }
        _ => {}
    }
}

fn overlay(w: &mut SvgWriter, scene: &SceneSpec, frame: &Frame, o: &Overlay) {
    match o {
        Overlay::Wall { cell, side } => {
            if let Some(s) = frame.side_stroke(*cell, *side) {
                w.stroke(&s, WALL_STROKE, 4.0, "wall");
            }
        }
        Overlay::Path { cells, color, arrow } => {
            let runs = path_runs(scene, frame, cells);
            for (i, run) in runs.iter().enumerate() {
                w.polyline(run, color, 3.0, *arrow && i + 1 == runs.len());
            }
        }
        Overlay::Marker { cell, marker, color } => {
            let c = frame.center(*cell);
            let rad = (frame.label_room(*cell) * 0.22).max(2.0);
            match marker {
                MarkerKind::Dot => {
                    let _ = writeln!(
                        w.out,
                        "<circle class=\"marker\" cx=\"{}\" cy=\"{}\" r=\"{}\" fill=\"{color}\"/>",
                        num(c.x),
                        num(c.y),
                        num(rad)
                    );
                }
                MarkerKind::Ring => {
                    let _ = writeln!(
                        w.out,
                        "<circle class=\"marker\" cx=\"{}\" cy=\"{}\" r=\"{}\" fill=\"none\" stroke=\"{color}\" stroke-width=\"3\"/>",
                        num(c.x),
                        num(c.y),
                        num(rad * 1.9)
                    );
                }
                MarkerKind::Square => {
                    let _ = writeln!(
                        w.out,
                        "<path class=\"marker\" d=\"M{} {} L{} {} L{} {} L{} {} Z\" fill=\"none\" stroke=\"{color}\" stroke-width=\"3\"/>",
                        num(c.x - rad * 1.8),
                        num(c.y - rad * 1.8),
                        num(c.x + rad * 1.8),
                        num(c.y - rad * 1.8),
                        num(c.x + rad * 1.8),
                        num(c.y + rad * 1.8),
                        num(c.x - rad * 1.8),
                        num(c.y + rad * 1.8)
                    );
                }
            }
        }
        Overlay::Arrow {
            cell,
            d_major,
            d_minor,
            color,
        } => {
            let a = frame.center(*cell);
            let b = frame.center_at(cell.major as f64 + *d_major as f64, cell.minor as f64 + *d_minor as f64);
            w.polyline(&[a, a.lerp(b, 0.55)], color, 3.0, true);
        }
        Overlay::EdgeLabel { cell, side, text } => {
            let p = frame.outside_anchor(*cell, *side, scene.font_px);
            w.text(p, scene.font_px, "#b00020", text, "edge-label");
        }
        Overlay::BoxLines { box_major, box_minor } => box_lines(w, frame, *box_major, *box_minor),
    }
}

/// Split a cell path into drawable runs, breaking at Cartesian seam
/// crossings and routing the two halves to the grid edges.
fn path_runs(scene: &SceneSpec, frame: &Frame, cells: &[CellRef]) -> Vec<Vec<Pt>> {
    let mut runs = vec![Vec::new()];
    for (i, &c) in cells.iter().enumerate() {
        if i > 0 {
            let prev = cells[i - 1];
            let cartesian_seam = scene.grid.topology == Topology::Cartesian && scene.grid.crosses_seam(prev, c);
            if cartesian_seam {
                let forward = prev.minor > c.minor;
                let (exit_pos, entry_pos) = if forward {
                    (prev.minor as f64 + 0.5, c.minor as f64 - 0.5)
                } else {
                    (prev.minor as f64 - 0.5, c.minor as f64 + 0.5)
                };
                let exit = frame.center_at(prev.major as f64, exit_pos);
                let entry = frame.center_at(c.major as f64, entry_pos);
                runs.last_mut().expect("non-empty").push(exit);
                runs.push(vec![entry]);
            }
        }
        runs.last_mut().expect("non-empty").push(frame.center(c));
    }
    runs.retain(|r| r.len() >= 2 || cells.len() == 1);
    runs
}

fn box_lines(w: &mut SvgWriter, frame: &Frame, box_major: usize, box_minor: usize) {
    let grid = *frame.grid();
    if box_major == 0 || box_minor == 0 {
        return;
    }
    match *frame {
        Frame::Cartesian { x0, y0, cell, .. } => {
            for r in (box_major..grid.major).step_by(box_major) {
                let y = y0 + r as f64 * cell;
                w.line(Pt::new(x0, y), Pt::new(x0 + cell * grid.minor as f64, y), WALL_STROKE, 3.0, "box");
            }
            for c in (box_minor..grid.minor).step_by(box_minor) {
                let x = x0 + c as f64 * cell;
                w.line(Pt::new(x, y0), Pt::new(x, y0 + cell * grid.major as f64), WALL_STROKE, 3.0, "box");
            }
        }
        Frame::Polar { cx, cy, r0, dr, .. } => {
            for r in (box_major..grid.major).step_by(box_major) {
                let _ = writeln!(
                    w.out,
                    "<circle class=\"box\" cx=\"{}\" cy=\"{}\" r=\"{}\" fill=\"none\" stroke=\"{WALL_STROKE}\" stroke-width=\"3\"/>",
                    num(cx),
                    num(cy),
                    num(r0 + r as f64 * dr)
                );
            }
            for c in (0..grid.minor).step_by(box_minor) {
                let a = Frame::polar_point(cx, cy, r0, c as f64, grid.minor);
                let b = Frame::polar_point(cx, cy, r0 + dr * grid.major as f64, c as f64, grid.minor);
                w.line(a, b, WALL_STROKE, 3.0, "box");
            }
        }
        _ => {}
    }
}

fn axis_labels(w: &mut SvgWriter, scene: &SceneSpec, frame: &Frame) {
    let grid = scene.grid;
    let font = (scene.font_px * 0.8).max(9.0);
    w.raw("<g class=\"axis\">\n");
    match *frame {
        Frame::Polar { cx, cy, r0, dr, .. } => {
            let r1 = r0 + dr * grid.major as f64;
            for s in 0..grid.minor {
                let p = Frame::polar_point(cx, cy, r1 + font * 1.2, s as f64 + 0.5, grid.minor);
                w.text(p, font, "#1f4e9e", &s.to_string(), "axis-label");
            }
            for r in 0..grid.major {
                let p = Frame::polar_point(cx, cy, r0 + (r as f64 + 0.5) * dr, 0.0, grid.minor);
                w.text(p, font, "#1f4e9e", &r.to_string(), "axis-label");
            }
        }
        _ => {
            for c in 0..grid.minor {
                let p = frame.outside_anchor(CellRef::new(0, c), Heading::MajorMinus, font);
                w.text(p, font, "#1f4e9e", &c.to_string(), "axis-label");
            }
            for r in 0..grid.major {
                let p = frame.outside_anchor(CellRef::new(r, 0), Heading::MinorMinus, font);
                w.text(p, font, "#1f4e9e", &r.to_string(), "axis-label");
            }
        }
    }
    w.raw("</g>\n");
}

fn panels(w: &mut SvgWriter, scene: &SceneSpec) {
    let top = main_height(scene);
    let n = scene.panels.len() as f64;
    let slot = scene.width / n;
    w.raw("<g class=\"panels\">\n");
    for (i, p) in scene.panels.iter().enumerate() {
        let left = i as f64 * slot;
        let label_h = 24.0;
        let calibration = match p.grid.topology {
            Topology::Cartesian => Calibration::MatchPolar {
                inner_radius_ratio: p.grid.inner_radius_ratio,
            },
            _ => Calibration::Fill,
        };
        let f = Frame::fit(&p.grid, left, top, slot, PANEL_STRIP - label_h, calibration, 8.0);
        for cell in p.grid.cells() {
            let fill = p.fills.get(&cell).map(String::as_str).unwrap_or(CELL_FILL);
            cell_element(w, &f.cell_outline(cell), fill, GRID_STROKE, 1.0, "panel-cell");
        }
        w.text(
            Pt::new(left + slot / 2.0, top + PANEL_STRIP - label_h / 2.0),
            16.0,
            "#111111",
            &p.label,
            "panel-label",
        );
    }
    w.raw("</g>\n");
}

/// Fixed-precision number formatting. Negative zero prints as `0.00`.
pub fn num(x: f64) -> String {
    debug_assert!(x.is_finite());
    let s = format!("{x:.2}");
    if s == "-0.00" {
        "0.00".into()
    } else {
        s
    }
}

fn escape(text: &str) -> String {
    let mut out = String::with_capacity(text.len());
    for ch in text.chars() {
        match ch {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            '\'' => out.push_str("&apos;"),
            c => out.push(c),
        }
    }
    out
}

struct SvgWriter {
    out: String,
}

impl SvgWriter {
    fn new(width: f64, height: f64) -> Self {
        let mut out = String::new();
        out.push_str("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n");
        let _ = writeln!(
            out,
            "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"{}\" height=\"{}\" viewBox=\"0 0 {} {}\" style=\"background:#ffffff\" font-family=\"DejaVu Sans, Arial, sans-serif\">",
            num(width),
            num(height),
            num(width),
            num(height)
        );
        SvgWriter { out }
    }

    fn raw(&mut self, s: &str) {
        self.out.push_str(s);
    }

    fn text(&mut self, at: Pt, font_px: f64, color: &str, text: &str, class: &str) {
        let _ = writeln!(
            self.out,
            "<text class=\"{class}\" x=\"{}\" y=\"{}\" font-size=\"{}\" fill=\"{color}\" text-anchor=\"middle\" dominant-baseline=\"central\">{}</text>",
            num(at.x),
            num(at.y),
            num(font_px),
            escape(text)
        );
    }

    fn line(&mut self, a: Pt, b: Pt, color: &str, width: f64, class: &str) {
        let _ = writeln!(
            self.out,
            "<line class=\"{class}\" x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"{color}\" stroke-width=\"{}\" stroke-linecap=\"round\"/>",
            num(a.x),
            num(a.y),
            num(b.x),
            num(b.y),
            num(width)
        );
    }

    fn stroke(&mut self, s: &Stroke, color: &str, width: f64, class: &str) {
        match *s {
            Stroke::Line(a, b) => self.line(a, b, color, width, class),
            Stroke::Arc { from, to, radius } => {
                let _ = writeln!(
                    self.out,
                    "<path class=\"{class}\" d=\"M{} {} A{} {} 0 0 1 {} {}\" fill=\"none\" stroke=\"{color}\" stroke-width=\"{}\" stroke-linecap=\"round\"/>",
                    num(from.x),
                    num(from.y),
                    num(radius),
                    num(radius),
                    num(to.x),
                    num(to.y),
                    num(width)
                );
            }
        }
    }

    fn polyline(&mut self, pts: &[Pt], color: &str, width: f64, arrow: bool) {
        let points: Vec<String> = pts.iter().map(|p| format!("{},{}", num(p.x), num(p.y))).collect();
        let _ = writeln!(
            self.out,
            "<polyline class=\"path\" points=\"{}\" fill=\"none\" stroke=\"{color}\" stroke-width=\"{}\" stroke-linejoin=\"round\"{}/>",
            points.join(" "),
            num(width),
            if arrow { " marker-end=\"url(#arrowhead)\"" } else { "" }
        );
    }

    fn finish(mut self) -> SvgDoc {
        self.out.push_str("</svg>\n");
        SvgDoc {
            bytes: self.out.into_bytes(),
        }
    }
}

#[cfg(test)]
mod tests;
