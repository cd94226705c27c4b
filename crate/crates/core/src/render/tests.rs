use super::*;
use crate::topology::{Boundary, GridSpec, Topology};

fn count(doc: &SvgDoc, needle: &str) -> usize {
    doc.as_str().matches(needle).count()
}

fn parse(doc: &SvgDoc) -> roxmltree::Document<'_> {
    roxmltree::Document::parse(doc.as_str()).expect("well-formed svg")
}

fn text_anchors(doc: &SvgDoc, class: &str) -> Vec<(f64, f64, String)> {
    parse(doc)
        .descendants()
        .filter(|n| n.has_tag_name("text") && n.attribute("class") == Some(class))
        .map(|n| {
            (
                n.attribute("x").unwrap().parse().unwrap(),
                n.attribute("y").unwrap().parse().unwrap(),
                n.text().unwrap_or_default().to_string(),
            )
        })
        .collect()
}

#[test]
fn smallest_cartesian_scene() {
    let mut scene = SceneSpec::new(GridSpec::cartesian(1, 1, Boundary::Bounded));
    scene.cell_glyphs.insert(CellRef::new(0, 0), Glyph::new("A"));
    let doc = render_cartesian(&scene).unwrap();
    let xml = parse(&doc);
    assert_eq!(xml.descendants().filter(|n| n.has_tag_name("rect")).count(), 1);
    assert_eq!(xml.descendants().filter(|n| n.has_tag_name("text")).count(), 1);
}

#[test]
fn rendering_is_byte_identical() {
    let mut scene = SceneSpec::new(GridSpec::polar(3, 5, Boundary::Bounded).with_inner_radius_ratio(0.3));
    scene.cell_glyphs.insert(CellRef::new(1, 2), Glyph::new("Q"));
    scene.draw_seam = true;
    assert_eq!(render_polar(&scene).unwrap(), render_polar(&scene.clone()).unwrap());
    let cart = SceneSpec::new(GridSpec::cartesian(2, 2, Boundary::Bounded));
    assert_eq!(render_cartesian(&cart).unwrap().bytes, render_cartesian(&cart).unwrap().bytes);
}

#[test]
fn cartesian_rects_in_row_major_order() {
    let mut scene = SceneSpec::new(GridSpec::cartesian(3, 4, Boundary::Bounded));
    for c in scene.grid.cells().collect::<Vec<_>>() {
        scene.cell_fills.insert(c, format!("#0000{:02x}", c.major * 4 + c.minor));
    }
    let doc = render_cartesian(&scene).unwrap();
    let xml = parse(&doc);
    let fills: Vec<_> = xml
        .descendants()
        .filter(|n| n.has_tag_name("rect"))
        .map(|n| n.attribute("fill").unwrap().to_string())
        .collect();
    assert_eq!(fills.len(), 12);
    let expected: Vec<_> = (0..12).map(|i| format!("#0000{i:02x}")).collect();
    assert_eq!(fills, expected);
}

#[test]
fn polar_single_ring_has_four_arc_cells() {
    let scene = SceneSpec::new(GridSpec::polar(1, 4, Boundary::Wrapping));
    let doc = render_polar(&scene).unwrap();
    let xml = parse(&doc);
    let cells: Vec<_> = xml
        .descendants()
        .filter(|n| n.has_tag_name("path") && n.attribute("class") == Some("cell"))
        .collect();
    assert_eq!(cells.len(), 4);
    for c in cells {
        let d = c.attribute("d").unwrap();
        assert!(d.contains('A') && d.ends_with('Z'));
    }
}

#[test]
fn polar_centroid_matches_analytic_position() {
    let grid = GridSpec::polar(4, 12, Boundary::Bounded);
    let mut scene = SceneSpec::new(grid);
    scene.cell_glyphs.insert(CellRef::new(0, 0), Glyph::new("X"));
    let doc = render_polar(&scene).unwrap();
    let (x, y, t) = text_anchors(&doc, "glyph").remove(0);
    assert_eq!(t, "X");

    // Recompute from the annulus formula independently of Frame.
    let outer = scene.width.min(scene.height) / 2.0 - MARGIN;
    let r0 = grid.inner_radius_ratio * outer;
    let dr = (outer - r0) / 4.0;
    let rho = r0 + 0.5 * dr;
    let theta = (90.0f64 - 0.5 * 30.0).to_radians();
    let ex = scene.width / 2.0 + rho * theta.cos();
    let ey = scene.height / 2.0 - rho * theta.sin();
    assert!((x - ex).abs() < 0.006, "{x} vs {ex}");
    assert!((y - ey).abs() < 0.006, "{y} vs {ey}");
}

#[test]
fn polar_collision_names_cell_and_suggests_radius() {
    let grid = GridSpec::polar(8, 12, Boundary::Bounded).with_inner_radius_ratio(0.02);
    let mut scene = SceneSpec::new(grid);
    scene.font_px = 24.0;
    scene.cell_glyphs.insert(CellRef::new(0, 3), Glyph::new("W"));
    let err = render_polar(&scene).unwrap_err();
    match &err {
        RenderError::Collision { cell, .. } => assert_eq!(*cell, CellRef::new(0, 3)),
        other => panic!("unexpected {other:?}"),
    }
    assert!(err.to_string().contains("inner_radius_ratio"));
}

#[test]
fn cartesian_collision_is_hard_error() {
    let mut scene = SceneSpec::new(GridSpec::cartesian(40, 40, Boundary::Bounded));
    scene.font_px = 20.0;
    scene.cell_glyphs.insert(CellRef::new(5, 5), Glyph::new("A"));
    assert!(matches!(render_cartesian(&scene), Err(RenderError::Collision { .. })));
}

#[test]
fn wrong_topology_rejected() {
    let scene = SceneSpec::new(GridSpec::cartesian(2, 2, Boundary::Bounded));
    assert!(matches!(render_polar(&scene), Err(RenderError::WrongTopology { .. })));
    assert!(matches!(render_tiling(&scene), Err(RenderError::WrongTopology { .. })));
}

#[test]
fn out_of_range_reference_rejected() {
    let mut scene = SceneSpec::new(GridSpec::cartesian(2, 2, Boundary::Bounded));
    scene.cell_glyphs.insert(CellRef::new(2, 0), Glyph::new("A"));
    assert!(matches!(render_cartesian(&scene), Err(RenderError::OutOfRange(_))));
}

fn hex_scene(n: usize) -> SceneSpec {
    let mut scene = SceneSpec::new(GridSpec::new(Topology::Hexagonal, n, n, Boundary::Bounded).unwrap());
    scene.task = Some(WORD_SEARCH_TASK.into());
    scene
}

#[test]
fn single_hex_cell() {
    let mut scene = hex_scene(1);
    scene.cell_glyphs.insert(CellRef::new(0, 0), Glyph::new("W"));
    let doc = render_tiling(&scene).unwrap();
    let xml = parse(&doc);
    assert_eq!(
        xml.descendants()
            .filter(|n| n.has_tag_name("path") && n.attribute("class") == Some("cell"))
            .count(),
        1
    );
    assert_eq!(xml.descendants().filter(|n| n.has_tag_name("text")).count(), 1);
    assert_eq!(render_tiling(&scene).unwrap(), doc);
}

#[test]
fn hex_flower_neighbors_are_equidistant() {
    let mut scene = hex_scene(3);
    for c in scene.grid.cells().collect::<Vec<_>>() {
        scene.cell_glyphs.insert(c, Glyph::new("A"));
    }
    let doc = render_tiling(&scene).unwrap();
    let anchors = text_anchors(&doc, "glyph");
    assert_eq!(anchors.len(), 7);
    let center = (scene.width / 2.0, scene.height / 2.0);
    let dists: Vec<f64> = anchors
        .iter()
        .map(|(x, y, _)| ((x - center.0).powi(2) + (y - center.1).powi(2)).sqrt())
        .filter(|d| *d > 1.0)
        .collect();
    assert_eq!(dists.len(), 6);
    let first = dists[0];
    for d in &dists {
        assert!((d - first).abs() < 0.02, "{d} vs {first}");
    }
}

#[test]
fn tiling_requires_word_search() {
    let mut scene = hex_scene(3);
    scene.task = Some("maze".into());
    assert!(matches!(render_tiling(&scene), Err(RenderError::UnsupportedLayout { .. })));
    let mut oct = SceneSpec::new(GridSpec::new(Topology::Octagonal, 3, 4, Boundary::Bounded).unwrap());
    assert!(render_tiling(&oct).is_err());
    oct.task = Some(WORD_SEARCH_TASK.into());
    oct.cell_glyphs.insert(CellRef::new(1, 1), Glyph::new("O"));
    let doc = render_tiling(&oct).unwrap();
    assert_eq!(count(&doc, "class=\"gap\""), 2 * 3);
    assert_eq!(count(&doc, "class=\"glyph\""), 1);
}

#[test]
fn overlays_render_and_stay_well_formed() {
    let grid = GridSpec::cartesian(3, 5, Boundary::Wrapping);
    let mut scene = SceneSpec::new(grid);
    scene.overlays.push(Overlay::Path {
        cells: vec![CellRef::new(0, 3), CellRef::new(0, 4), CellRef::new(0, 0), CellRef::new(1, 0)],
        color: "#c0392b".into(),
        arrow: true,
    });
    scene.overlays.push(Overlay::Wall {
        cell: CellRef::new(1, 1),
        side: Heading::MinorPlus,
    });
    scene.overlays.push(Overlay::EdgeLabel {
        cell: CellRef::new(2, 2),
        side: Heading::MajorPlus,
        text: "A&B".into(),
    });
    scene.axis_labels = true;
    let doc = render_cartesian(&scene).unwrap();
    parse(&doc);
    // the seam crossing splits the path in two runs
    assert_eq!(count(&doc, "class=\"path\""), 2);
    assert!(doc.as_str().contains("A&amp;B"));
    let mut polar_scene = scene.clone();
    polar_scene.grid = grid.with_topology(Topology::Polar);
    let doc = render_polar(&polar_scene).unwrap();
    parse(&doc);
    assert_eq!(count(&doc, "class=\"path\""), 1);
}

#[test]
fn panels_extend_below_main_area() {
    let grid = GridSpec::polar(4, 4, Boundary::Bounded);
    let mut scene = SceneSpec::new(grid);
    scene.height = scene.width + PANEL_STRIP;
    for l in ["A", "B", "C"] {
        scene.panels.push(Panel {
            label: l.into(),
            grid,
            fills: [(CellRef::new(0, 0), "#ff0000".to_string())].into_iter().collect(),
        });
    }
    let doc = render_polar(&scene).unwrap();
    assert_eq!(count(&doc, "class=\"panel-cell\""), 3 * 16);
    assert_eq!(text_anchors(&doc, "panel-label").len(), 3);
}

#[test]
fn calibrated_cartesian_grid_area_matches_annulus() {
    let ratio = 0.3;
    let grid = GridSpec::cartesian(6, 8, Boundary::Bounded);
    let mut scene = SceneSpec::new(grid);
    scene.calibration = Calibration::MatchPolar {
        inner_radius_ratio: ratio,
    };
    let frame = Frame::for_scene(&scene);
    let Frame::Cartesian { cell, .. } = frame else { panic!() };
    let r = polar_outer_radius(scene.width, scene.height);
    let annulus = std::f64::consts::PI * (r * r - (ratio * r).powi(2));
    assert!((cell * cell * 48.0 - annulus).abs() / annulus < 1e-9);
}
