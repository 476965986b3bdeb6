//! Visual-quality predicates. A scene that passes is unambiguous to read:
//! points are separated, polygon corners are open, features have size, and
//! everything sits inside the canvas margin.

use super::scene::{ConcreteScene, LinearKind};
use super::vec2::angle_at;
use crate::scene::{Issue, Severity, Span, ValidationReport};

#[derive(Debug, Clone)]
pub struct QualityConfig {
    /// Minimum pairwise distance between labeled points, canvas units.
    pub min_point_separation: f64,
    /// Minimum polygon vertex angle, degrees.
    pub min_vertex_angle: f64,
    /// Minimum circle radius and segment length, canvas units.
    pub min_feature_size: f64,
    /// Required clearance from the canvas edge, canvas units.
    pub margin: f64,
}

impl Default for QualityConfig {
    fn default() -> Self {
        Self {
            min_point_separation: 24.0,
            min_vertex_angle: 15.0,
            min_feature_size: 40.0,
            margin: 20.0,
        }
    }
}

fn fail(issues: &mut Vec<Issue>, message: String) {
    issues.push(Issue { severity: Severity::Error, message, span: Span::default() });
}

/// Check every quality predicate; failures become error-severity issues.
pub fn quality_check(s: &ConcreteScene, q: &QualityConfig) -> ValidationReport {
    let mut issues = Vec::new();

    let pts: Vec<_> = s.coords.iter().collect();
    for i in 0..pts.len() {
        for j in (i + 1)..pts.len() {
            let d = pts[i].1.dist(*pts[j].1);
            if d < q.min_point_separation {
                fail(
                    &mut issues,
                    format!(
                        "min_point_separation: points {} and {} are {:.1} apart (need {})",
                        pts[i].0, pts[j].0, d, q.min_point_separation
                    ),
                );
            }
        }
    }

    for poly in &s.elements.polygons {
        let n = poly.vertices.len();
        for i in 0..n {
            let prev = s.pos(poly.vertices[(i + n - 1) % n]);
            let v = s.pos(poly.vertices[i]);
            let next = s.pos(poly.vertices[(i + 1) % n]);
            let deg = angle_at(prev, v, next).to_degrees();
            if deg < q.min_vertex_angle {
                fail(
                    &mut issues,
                    format!(
                        "min_vertex_angle: polygon corner at {} is {:.1} degrees (need {})",
                        poly.vertices[i], deg, q.min_vertex_angle
                    ),
                );
            }
        }
    }

    for l in &s.elements.linear {
        if l.kind == LinearKind::Segment && l.length < q.min_feature_size {
            fail(
                &mut issues,
                format!(
                    "min_feature_size: segment {}{} has length {:.1} (need {})",
                    l.a, l.b, l.length, q.min_feature_size
                ),
            );
        }
    }
    for c in &s.elements.circles {
        if c.radius < q.min_feature_size {
            fail(
                &mut issues,
                format!(
                    "min_feature_size: circle {} has radius {:.1} (need {})",
                    c.center, c.radius, q.min_feature_size
                ),
            );
        }
    }

    let (w, h) = s.canvas;
    for (id, p) in &s.coords {
        if p.x < q.margin || p.y < q.margin || p.x > w - q.margin || p.y > h - q.margin {
            fail(
                &mut issues,
                format!("margin: point {} at ({:.1}, {:.1}) is outside the canvas margin", id, p.x, p.y),
            );
        }
    }

    ValidationReport { issues }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::vec2::Vec2;
    use crate::scene::{parse_program, IdentifierScheme, PointId};
    use std::collections::BTreeMap;

    fn scene_with(coords: &[(char, f64, f64)], src: &str) -> ConcreteScene {
        let p = parse_program("t", src).unwrap();
        let map: BTreeMap<_, _> = coords
            .iter()
            .map(|(c, x, y)| (PointId::new(*c).unwrap(), Vec2::new(*x, *y)))
            .collect();
        ConcreteScene::from_parts(p, map, IdentifierScheme::Common, 0, (512.0, 512.0))
    }

    #[test]
    fn close_points_fail_with_named_pair() {
        let s = scene_with(
            &[('A', 100.0, 100.0), ('B', 105.0, 108.0)],
            "point A; point B; segment A B; point M = midpoint(A, B)",
        );
        let r = quality_check(&s, &QualityConfig::default());
        assert!(!r.ok());
        assert!(r.errors().any(|i| i.message.contains("A") && i.message.contains("B")));
    }

    #[test]
    fn centered_equilateral_triangle_passes() {
        let s = scene_with(
            &[('A', 156.0, 340.0), ('B', 356.0, 340.0), ('C', 256.0, 166.8)],
            "point A; point B; point C; polygon A B C; segment A B; segment B C; segment C A; constraint equal_length(AB, BC)",
        );
        let r = quality_check(&s, &QualityConfig::default());
        assert!(r.ok(), "{r}");
    }

    #[test]
    fn thin_triangle_fails_vertex_angle() {
        let s = scene_with(
            &[('A', 100.0, 256.0), ('B', 400.0, 256.0), ('C', 250.0, 268.0)],
            "point A; point B; point C; polygon A B C; point M = midpoint(A, B)",
        );
        let r = quality_check(&s, &QualityConfig::default());
        assert!(!r.ok());
        assert!(r.errors().any(|i| i.message.contains("min_vertex_angle")));
    }
}
