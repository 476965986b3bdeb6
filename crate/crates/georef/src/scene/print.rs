//! Canonical pretty-printer. `parse_program(print(p))` reproduces the AST.

use super::ast::*;
use std::fmt::Write;

fn ctor_text(c: &Constructor) -> String {
    match c {
        Constructor::Midpoint { a, b } => format!("midpoint({a}, {b})"),
        Constructor::IntersectionLineLine { l1, l2 } => {
            format!("intersection_line_line({l1}, {l2})")
        }
        Constructor::IntersectionLineCircle { line, circle, branch } => {
            format!("intersection_line_circle({line}, {circle}, {branch})")
        }
        Constructor::IntersectionCircleCircle { c1, c2, branch } => {
            format!("intersection_circle_circle({c1}, {c2}, {branch})")
        }
        Constructor::FootOfPerpendicular { from, onto } => {
            format!("foot_of_perpendicular({from}, {onto})")
        }
        Constructor::TangentPoint { from, circle, branch } => {
            format!("tangent_point({from}, {circle}, {branch})")
        }
        Constructor::PointOn { element, t } => match element {
            OnElement::Linear { carrier } => format!("point_on({carrier}, {t})"),
            OnElement::Circle { circle } => format!("point_on({circle}, {t})"),
        },
        Constructor::ExtensionPoint { seg, factor } => {
            format!("extension_point({seg}, {factor})")
        }
        Constructor::CircleCenter { a, b, c } => format!("circle_center({a}, {b}, {c})"),
        Constructor::Incenter { a, b, c } => format!("incenter({a}, {b}, {c})"),
        Constructor::Circumcenter { a, b, c } => format!("circumcenter({a}, {b}, {c})"),
        Constructor::Centroid { a, b, c } => format!("centroid({a}, {b}, {c})"),
    }
}

fn constraint_text(c: &Constraint) -> String {
    match c {
        Constraint::Parallel { l1, l2 } => format!("parallel({l1}, {l2})"),
        Constraint::Perpendicular { l1, l2 } => format!("perpendicular({l1}, {l2})"),
        Constraint::Tangent { line, circle } => format!("tangent({line}, {circle})"),
        Constraint::OnCircle { point, circle } => format!("on_circle({point}, {circle})"),
        Constraint::Collinear { a, b, c } => format!("collinear({a}, {b}, {c})"),
        Constraint::EqualLength { s1, s2 } => format!("equal_length({s1}, {s2})"),
        Constraint::EqualAngle { a1, a2 } => format!("equal_angle({a1}, {a2})"),
        Constraint::AngleBisector { bisector, angle } => {
            format!("angle_bisector({bisector}, {angle})")
        }
        Constraint::IsDiameter { seg, circle } => format!("is_diameter({seg}, {circle})"),
        Constraint::IsChord { seg, circle } => format!("is_chord({seg}, {circle})"),
        Constraint::IsInscribedAngle { angle, circle } => {
            format!("is_inscribed_angle({angle}, {circle})")
        }
        Constraint::IsCentralAngle { angle, circle } => {
            format!("is_central_angle({angle}, {circle})")
        }
        Constraint::IsParallelogram { a, b, c, d } => {
            format!("is_parallelogram({a}{b}{c}{d})")
        }
    }
}

/// Render a program back to canonical scene-language text.
pub fn print_program(p: &SceneProgram) -> String {
    let mut out = String::new();
    let mut stage = 1u8;
    for d in &p.declarations {
        if d.stage != stage {
            stage = d.stage;
            writeln!(out, "stage {stage}").unwrap();
        }
        let line = match &d.kind {
            DeclKind::FreePoint { id } => format!("point {id}"),
            DeclKind::ConstructedPoint { id, ctor } => {
                format!("point {id} = {}", ctor_text(ctor))
            }
            DeclKind::Segment { a, b } => format!("segment {a} {b}"),
            DeclKind::Line { a, b } => format!("line {a} {b}"),
            DeclKind::Ray { origin, through } => format!("ray {origin} {through}"),
            DeclKind::Circle { center, through } => format!("circle {center} {through}"),
            DeclKind::Polygon { vertices } => {
                let vs: Vec<String> = vertices.iter().map(|v| v.to_string()).collect();
                format!("polygon {}", vs.join(" "))
            }
            DeclKind::Constraint { constraint } => {
                format!("constraint {}", constraint_text(constraint))
            }
            DeclKind::Annotation { text } => format!("annotation \"{text}\""),
        };
        writeln!(out, "{line}").unwrap();
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scene::parse::parse_program;

    #[test]
    fn print_then_parse_is_identity() {
        let src = "point A\npoint B\ncircle A B\npoint P\npoint T = tangent_point(P, A, 0)\nsegment P T\nstage 2\nconstraint tangent(PT, A)\nannotation \"tangent from an external point\"\n";
        let p = parse_program("t", src).unwrap();
        let printed = print_program(&p);
        let reparsed = parse_program("t", &printed).unwrap();
        assert_eq!(p, reparsed);
        // And printing is a fixed point.
        assert_eq!(printed, print_program(&reparsed));
    }
}
