//! Deterministic SVG rendering of solved scenes.
//!
//! Output is byte-identical for equal inputs: elements are emitted in
//! declaration order, coordinates use fixed two-decimal formatting, and
//! attributes are written in a fixed order.

use crate::geom::predicates::line_distance;
use crate::geom::{ConcreteScene, LinearKind, Vec2};
use crate::scene::{Constraint, Constructor, DeclKind, PointId};
use std::collections::BTreeMap;
use std::fmt::Write;

#[derive(Debug, Clone)]
pub struct RenderConfig {
    pub stroke_width: f64,
    pub font_size: f64,
    pub label_offset: f64,
    pub show_right_angle_marks: bool,
    pub background: String,
}

impl Default for RenderConfig {
    fn default() -> Self {
        Self {
            stroke_width: 2.0,
            font_size: 16.0,
            label_offset: 10.0,
            show_right_angle_marks: true,
            background: "white".to_string(),
        }
    }
}

fn fmt_coord(v: f64) -> String {
    format!("{v:.2}")
}

/// Clip the infinite line (or ray) through (a, b) to the canvas box,
/// Liang-Barsky style; returns the visible stroke endpoints.
fn clip_line(a: Vec2, b: Vec2, w: f64, h: f64, ray: bool) -> Option<(Vec2, Vec2)> {
    let d = b - a;
    let mut enter: f64 = if ray { 0.0 } else { f64::NEG_INFINITY };
    let mut leave = f64::INFINITY;
    for (p, q) in [(-d.x, a.x), (d.x, w - a.x), (-d.y, a.y), (d.y, h - a.y)] {
        if p.abs() < 1e-12 {
            if q < 0.0 {
                return None;
            }
        } else {
            let t = q / p;
            if p < 0.0 {
                enter = enter.max(t);
            } else {
                leave = leave.min(t);
            }
        }
    }
    if enter > leave {
        return None;
    }
    Some((a + d * enter, a + d * leave))
}

/// Directions (unit vectors) of drawn strokes incident to a point.
fn incident_directions(s: &ConcreteScene, id: PointId) -> Vec<Vec2> {
    let p = s.pos(id);
    let mut dirs = Vec::new();
    let eps = 1e-6;
    for l in &s.elements.linear {
        let a = s.pos(l.a);
        let b = s.pos(l.b);
        if line_distance(p, a, b) > eps {
            continue;
        }
        let t = (p - a).dot(b - a) / (b - a).norm_sq();
        let on_stroke = match l.kind {
            LinearKind::Segment => (-1e-9..=1.0 + 1e-9).contains(&t),
            LinearKind::Ray => t >= -1e-9,
            LinearKind::Line => true,
        };
        if !on_stroke {
            continue;
        }
        let u = l.direction;
        // Forward direction exists when the stroke continues past p.
        let forward = match l.kind {
            LinearKind::Segment => t < 1.0 - 1e-9,
            _ => true,
        };
        let backward = match l.kind {
            LinearKind::Segment => t > 1e-9,
            LinearKind::Ray => t > 1e-9,
            LinearKind::Line => true,
        };
        if forward {
            dirs.push(u);
        }
        if backward {
            dirs.push(-u);
        }
    }
    for c in &s.elements.circles {
        let center = s.pos(c.center);
        if (p.dist(center) - c.radius).abs() <= eps {
            let radial = (p - center).normalized();
            dirs.push(radial.perp());
            dirs.push(-radial.perp());
        }
    }
    dirs
}

/// Place each point's label at `label_offset` from the point, in the
/// direction bisecting the largest angular gap between incident strokes.
/// Isolated points label up-right; labels are clamped inside the canvas.
pub fn place_labels(s: &ConcreteScene, cfg: &RenderConfig) -> BTreeMap<PointId, Vec2> {
    let (w, h) = s.canvas;
    let mut out = BTreeMap::new();
    for (&id, &p) in &s.coords {
        let dirs = incident_directions(s, id);
        let dir = if dirs.is_empty() {
            // Up-right in screen coordinates.
            Vec2::new(std::f64::consts::FRAC_1_SQRT_2, -std::f64::consts::FRAC_1_SQRT_2)
        } else {
            let mut angles: Vec<f64> = dirs.iter().map(|d| d.y.atan2(d.x)).collect();
            angles.sort_by(|a, b| a.partial_cmp(b).unwrap());
            let mut best_gap = f64::NEG_INFINITY;
            let mut best_mid = 0.0;
            for i in 0..angles.len() {
                let a = angles[i];
                let b = if i + 1 < angles.len() {
                    angles[i + 1]
                } else {
                    angles[0] + std::f64::consts::TAU
                };
                let gap = b - a;
                if gap > best_gap + 1e-12 {
                    best_gap = gap;
                    best_mid = a + gap / 2.0;
                }
            }
            Vec2::new(best_mid.cos(), best_mid.sin())
        };
        let pos = p + dir * cfg.label_offset;
        let clamped = Vec2::new(
            pos.x.clamp(cfg.font_size * 0.5, w - cfg.font_size * 0.5),
            pos.y.clamp(cfg.font_size, h - 4.0),
        );
        out.insert(id, clamped);
    }
    out
}

/// Right-angle marker positions: (vertex, leg direction 1, leg direction 2).
fn right_angle_marks(s: &ConcreteScene) -> Vec<(Vec2, Vec2, Vec2)> {
    let mut marks = Vec::new();
    let shared_vertex = |l1: (PointId, PointId), l2: (PointId, PointId)| -> Option<(PointId, PointId, PointId)> {
        for v in [l1.0, l1.1] {
            for u in [l2.0, l2.1] {
                if v == u {
                    let o1 = if l1.0 == v { l1.1 } else { l1.0 };
                    let o2 = if l2.0 == v { l2.1 } else { l2.0 };
                    return Some((v, o1, o2));
                }
            }
        }
        None
    };
    for d in &s.program.declarations {
        match &d.kind {
            DeclKind::Constraint { constraint: Constraint::Perpendicular { l1, l2 } } => {
                if let Some((v, o1, o2)) = shared_vertex((l1.a, l1.b), (l2.a, l2.b)) {
                    let vp = s.pos(v);
                    marks.push((vp, (s.pos(o1) - vp).normalized(), (s.pos(o2) - vp).normalized()));
                }
            }
            DeclKind::ConstructedPoint { id, ctor: Constructor::FootOfPerpendicular { from, onto } } => {
                let vp = s.pos(*id);
                let leg1 = (s.pos(*from) - vp).normalized();
                let leg2 = (s.pos(onto.b) - vp).normalized();
                let leg2 = if leg2.norm() < 0.5 { (s.pos(onto.a) - vp).normalized() } else { leg2 };
                marks.push((vp, leg1, leg2));
            }
            DeclKind::ConstructedPoint { id, ctor: Constructor::TangentPoint { from, circle, .. } } => {
                // Mark only when the radius is drawn.
                if s.elements.find_linear(circle.center, *id).is_some() {
                    let vp = s.pos(*id);
                    marks.push((
                        vp,
                        (s.pos(*from) - vp).normalized(),
                        (s.pos(circle.center) - vp).normalized(),
                    ));
                }
            }
            _ => {}
        }
    }
    marks
}

/// Render a solved scene to an SVG 1.1 document.
pub fn render_svg(s: &ConcreteScene, cfg: &RenderConfig) -> String {
    let (w, h) = s.canvas;
    let mut svg = String::new();
    writeln!(
        svg,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"{}\" height=\"{}\" viewBox=\"0 0 {} {}\">",
        fmt_coord(w),
        fmt_coord(h),
        fmt_coord(w),
        fmt_coord(h)
    )
    .unwrap();
    writeln!(
        svg,
        "  <rect x=\"0\" y=\"0\" width=\"{}\" height=\"{}\" fill=\"{}\"/>",
        fmt_coord(w),
        fmt_coord(h),
        cfg.background
    )
    .unwrap();

    let stroke = format!("stroke=\"black\" stroke-width=\"{}\" fill=\"none\"", cfg.stroke_width);

    for c in &s.elements.circles {
        let p = s.pos(c.center);
        writeln!(
            svg,
            "  <circle cx=\"{}\" cy=\"{}\" r=\"{}\" {stroke}/>",
            fmt_coord(p.x),
            fmt_coord(p.y),
            fmt_coord(c.radius)
        )
        .unwrap();
    }

    for l in &s.elements.linear {
        let a = s.pos(l.a);
        let b = s.pos(l.b);
        let (p, q) = match l.kind {
            LinearKind::Segment => (a, b),
            LinearKind::Line => match clip_line(a, b, w, h, false) {
                Some(pq) => pq,
                None => continue,
            },
            LinearKind::Ray => match clip_line(a, b, w, h, true) {
                Some(pq) => pq,
                None => continue,
            },
        };
        writeln!(
            svg,
            "  <line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" {stroke}/>",
            fmt_coord(p.x),
            fmt_coord(p.y),
            fmt_coord(q.x),
            fmt_coord(q.y)
        )
        .unwrap();
    }

    for poly in &s.elements.polygons {
        let mut d = String::new();
        for (i, v) in poly.vertices.iter().enumerate() {
            let p = s.pos(*v);
            let op = if i == 0 { "M" } else { "L" };
            write!(d, "{op} {} {} ", fmt_coord(p.x), fmt_coord(p.y)).unwrap();
        }
        d.push('Z');
        writeln!(svg, "  <path d=\"{d}\" {stroke}/>").unwrap();
    }

    if cfg.show_right_angle_marks {
        let side = 10.0;
        for (v, u1, u2) in right_angle_marks(s) {
            let p1 = v + u1 * side;
            let p2 = v + (u1 + u2) * side;
            let p3 = v + u2 * side;
            writeln!(
                svg,
                "  <polyline points=\"{},{} {},{} {},{}\" stroke=\"black\" stroke-width=\"1\" fill=\"none\"/>",
                fmt_coord(p1.x),
                fmt_coord(p1.y),
                fmt_coord(p2.x),
                fmt_coord(p2.y),
                fmt_coord(p3.x),
                fmt_coord(p3.y)
            )
            .unwrap();
        }
    }

    for (&id, &p) in &s.coords {
        let _ = id;
        writeln!(
            svg,
            "  <circle cx=\"{}\" cy=\"{}\" r=\"2.5\" fill=\"black\"/>",
            fmt_coord(p.x),
            fmt_coord(p.y)
        )
        .unwrap();
    }

    let labels = place_labels(s, cfg);
    for (id, p) in &labels {
        writeln!(
            svg,
            "  <text x=\"{}\" y=\"{}\" font-family=\"sans-serif\" font-size=\"{}\" text-anchor=\"middle\" dominant-baseline=\"middle\">{id}</text>",
            fmt_coord(p.x),
            fmt_coord(p.y),
            cfg.font_size
        )
        .unwrap();
    }

    svg.push_str("</svg>\n");
    svg
}

pub use self::naming::scene_file_stem;

mod naming {
    use crate::scene::IdentifierScheme;

    /// File stem convention: `<template>_<scheme>_<seed>`.
    pub fn scene_file_stem(template: &str, scheme: IdentifierScheme, seed: u64) -> String {
        format!("{template}_{scheme}_{seed}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scene::{parse_program, IdentifierScheme};
    use std::collections::BTreeMap;

    fn triangle_scene() -> ConcreteScene {
        let p = parse_program(
            "tri",
            "point A; point B; point C; polygon A B C; point M = midpoint(A, B)",
        )
        .unwrap();
        let mut coords = BTreeMap::new();
        let id = |c: char| crate::scene::PointId::new(c).unwrap();
        coords.insert(id('A'), Vec2::new(100.0, 400.0));
        coords.insert(id('B'), Vec2::new(400.0, 400.0));
        coords.insert(id('C'), Vec2::new(250.0, 120.0));
        let mut s =
            ConcreteScene::from_parts(p, coords, IdentifierScheme::Common, 0, (512.0, 512.0));
        // Drop the helper midpoint so the scene has exactly three points.
        s.coords.remove(&id('M'));
        s
    }

    #[test]
    fn triangle_has_three_labels_and_one_closed_path() {
        let svg = render_svg(&triangle_scene(), &RenderConfig::default());
        assert_eq!(svg.matches("<text").count(), 3);
        assert_eq!(svg.matches("<path").count(), 1);
        assert!(svg.contains("Z\""));
    }

    #[test]
    fn rendering_is_byte_deterministic() {
        let s = triangle_scene();
        let a = render_svg(&s, &RenderConfig::default());
        let b = render_svg(&s, &RenderConfig::default());
        assert_eq!(a, b);
    }

    #[test]
    fn isolated_point_labels_up_right() {
        let p = parse_program("t", "point A; point B; segment A B; point P = midpoint(A, B)").unwrap();
        let id = |c: char| crate::scene::PointId::new(c).unwrap();
        let mut coords = BTreeMap::new();
        coords.insert(id('A'), Vec2::new(100.0, 100.0));
        coords.insert(id('B'), Vec2::new(200.0, 100.0));
        let mut s = ConcreteScene::from_parts(p, coords, IdentifierScheme::Common, 0, (512.0, 512.0));
        // Detach the midpoint from its segment to make it isolated.
        s.coords.insert(id('P'), Vec2::new(300.0, 300.0));
        let labels = place_labels(&s, &RenderConfig::default());
        let lp = labels[&id('P')];
        assert!(lp.x > 300.0 && lp.y < 300.0, "label {lp:?} should sit up-right");
    }

    #[test]
    fn edge_point_label_clamped() {
        let p = parse_program("t", "point A; point B; segment A B; point M = midpoint(A, B)").unwrap();
        let id = |c: char| crate::scene::PointId::new(c).unwrap();
        let mut coords = BTreeMap::new();
        coords.insert(id('A'), Vec2::new(2.0, 2.0));
        coords.insert(id('B'), Vec2::new(200.0, 100.0));
        let s = ConcreteScene::from_parts(p, coords, IdentifierScheme::Common, 0, (512.0, 512.0));
        let labels = place_labels(&s, &RenderConfig::default());
        let la = labels[&id('A')];
        assert!(la.x >= 8.0 && la.y >= 16.0, "label {la:?} must stay inside the canvas");
    }
}
