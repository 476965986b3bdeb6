//! Structural validation of parsed programs.
//!
//! Validation never fails: every problem becomes a report entry. A program
//! with no error-severity issues is eligible for instantiation.

use super::ast::*;
use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;
use std::fmt;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Severity {
    Error,
    Warning,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Issue {
    pub severity: Severity,
    pub message: String,
    pub span: Span,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ValidationReport {
    pub issues: Vec<Issue>,
}

impl ValidationReport {
    /// True iff no issue has error severity.
    pub fn ok(&self) -> bool {
        self.issues.iter().all(|i| i.severity != Severity::Error)
    }

    pub fn errors(&self) -> impl Iterator<Item = &Issue> {
        self.issues.iter().filter(|i| i.severity == Severity::Error)
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.issues.is_empty() {
            return write!(f, "ok");
        }
        for i in &self.issues {
            let sev = match i.severity {
                Severity::Error => "error",
                Severity::Warning => "warning",
            };
            writeln!(f, "{}:{}: {sev}: {}", i.span.line, i.span.column, i.message)?;
        }
        Ok(())
    }
}

struct Ctx {
    declared: BTreeSet<PointId>,
    /// Order-insensitive endpoint keys of declared segments/lines/rays.
    linear_keys: BTreeSet<(PointId, PointId)>,
    circles: BTreeSet<PointId>,
    issues: Vec<Issue>,
}

impl Ctx {
    fn error(&mut self, span: Span, message: impl Into<String>) {
        self.issues.push(Issue { severity: Severity::Error, message: message.into(), span });
    }

    fn warn(&mut self, span: Span, message: impl Into<String>) {
        self.issues.push(Issue { severity: Severity::Warning, message: message.into(), span });
    }

    fn need_point(&mut self, span: Span, p: PointId) {
        if !self.declared.contains(&p) {
            self.error(span, format!("point {p} used before declaration"));
        }
    }

    fn need_linear(&mut self, span: Span, l: &LinearRef) {
        self.need_point(span, l.a);
        self.need_point(span, l.b);
        if l.a == l.b {
            self.error(span, format!("degenerate reference {l}: endpoints coincide"));
        } else if !self.linear_keys.contains(&l.key()) {
            self.warn(span, format!("no declared segment/line/ray matches {l}"));
        }
    }

    fn need_circle(&mut self, span: Span, c: &CircleRef) {
        self.need_point(span, c.center);
        if !self.circles.contains(&c.center) {
            self.error(span, format!("no circle centered at {} is declared", c.center));
        }
    }

    fn need_angle(&mut self, span: Span, a: &AngleRef) {
        self.need_point(span, a.arm_a);
        self.need_point(span, a.vertex);
        self.need_point(span, a.arm_b);
        if a.arm_a == a.vertex || a.arm_b == a.vertex || a.arm_a == a.arm_b {
            self.error(span, format!("angle {a} repeats a point"));
        }
    }

    fn need_branch(&mut self, span: Span, branch: u8) {
        if branch > 1 {
            self.error(span, format!("invalid branch selector {branch}: must be 0 or 1"));
        }
    }
}

/// Check every structural rule and return the full report.
pub fn validate_program(program: &SceneProgram) -> ValidationReport {
    let mut ctx = Ctx {
        declared: BTreeSet::new(),
        linear_keys: BTreeSet::new(),
        circles: BTreeSet::new(),
        issues: Vec::new(),
    };

    let mut element_count = 0usize;
    let mut relationship_count = 0usize;

    for d in &program.declarations {
        let span = d.span;
        if d.kind.is_element() {
            element_count += 1;
        }
        match &d.kind {
            DeclKind::FreePoint { id } => {
                ctx.declared.insert(*id);
            }
            DeclKind::ConstructedPoint { id, ctor } => {
                relationship_count += 1;
                validate_constructor(&mut ctx, span, ctor);
                ctx.declared.insert(*id);
            }
            DeclKind::Segment { a, b } | DeclKind::Line { a, b } => {
                ctx.need_point(span, *a);
                ctx.need_point(span, *b);
                if a == b {
                    ctx.error(span, "segment/line endpoints coincide");
                }
                ctx.linear_keys.insert(LinearRef::new(*a, *b).key());
            }
            DeclKind::Ray { origin, through } => {
                ctx.need_point(span, *origin);
                ctx.need_point(span, *through);
                if origin == through {
                    ctx.error(span, "ray endpoints coincide");
                }
                ctx.linear_keys.insert(LinearRef::new(*origin, *through).key());
            }
            DeclKind::Circle { center, through } => {
                ctx.need_point(span, *center);
                ctx.need_point(span, *through);
                if center == through {
                    ctx.error(span, "circle center and through-point coincide");
                }
                if !ctx.circles.insert(*center) {
                    ctx.error(span, format!("a circle centered at {center} is already declared"));
                }
            }
            DeclKind::Polygon { vertices } => {
                let mut seen = BTreeSet::new();
                for v in vertices {
                    ctx.need_point(span, *v);
                    if !seen.insert(*v) {
                        ctx.error(span, format!("polygon repeats vertex {v}"));
                    }
                }
                if vertices.len() < 3 {
                    ctx.error(span, "polygon needs at least three vertices");
                }
            }
            DeclKind::Constraint { constraint } => {
                relationship_count += 1;
                validate_constraint(&mut ctx, span, constraint);
            }
            DeclKind::Annotation { .. } => {}
        }
    }

    if element_count < 2 {
        let span = program.declarations.first().map(|d| d.span).unwrap_or_default();
        ctx.issues.push(Issue {
            severity: Severity::Error,
            message: "fewer than two elements: a scene needs at least two fundamental geometric elements".into(),
            span,
        });
    }
    if relationship_count == 0 {
        let span = program.declarations.first().map(|d| d.span).unwrap_or_default();
        ctx.issues.push(Issue {
            severity: Severity::Error,
            message: "no relationship-bearing construct: declare at least one constraint or constructed point".into(),
            span,
        });
    }

    ValidationReport { issues: ctx.issues }
}

fn validate_constructor(ctx: &mut Ctx, span: Span, ctor: &Constructor) {
    match ctor {
        Constructor::Midpoint { a, b } => {
            ctx.need_point(span, *a);
            ctx.need_point(span, *b);
            if a == b {
                ctx.error(span, "midpoint of a single point");
            }
        }
        Constructor::IntersectionLineLine { l1, l2 } => {
            ctx.need_linear(span, l1);
            ctx.need_linear(span, l2);
        }
        Constructor::IntersectionLineCircle { line, circle, branch } => {
            ctx.need_linear(span, line);
            ctx.need_circle(span, circle);
            ctx.need_branch(span, *branch);
        }
        Constructor::IntersectionCircleCircle { c1, c2, branch } => {
            ctx.need_circle(span, c1);
            ctx.need_circle(span, c2);
            ctx.need_branch(span, *branch);
            if c1 == c2 {
                ctx.error(span, "intersection of a circle with itself");
            }
        }
        Constructor::FootOfPerpendicular { from, onto } => {
            ctx.need_point(span, *from);
            ctx.need_linear(span, onto);
        }
        Constructor::TangentPoint { from, circle, branch } => {
            ctx.need_point(span, *from);
            ctx.need_circle(span, circle);
            ctx.need_branch(span, *branch);
        }
        Constructor::PointOn { element, t } => match element {
            OnElement::Linear { carrier } => {
                ctx.need_linear(span, carrier);
                if !(*t > 0.0 && *t < 1.0) {
                    ctx.error(span, format!("point_on parameter {t} must lie strictly inside (0, 1)"));
                }
            }
            OnElement::Circle { circle } => {
                ctx.need_circle(span, circle);
            }
        },
        Constructor::ExtensionPoint { seg, factor } => {
            ctx.need_linear(span, seg);
            if (0.0..=1.0).contains(factor) {
                ctx.error(span, format!("extension factor {factor} lies inside the segment; use <0 or >1"));
            }
        }
        Constructor::CircleCenter { a, b, c }
        | Constructor::Incenter { a, b, c }
        | Constructor::Circumcenter { a, b, c }
        | Constructor::Centroid { a, b, c } => {
            ctx.need_point(span, *a);
            ctx.need_point(span, *b);
            ctx.need_point(span, *c);
            if a == b || b == c || a == c {
                ctx.error(span, format!("{} needs three distinct points", ctor.name()));
            }
        }
    }
}

fn validate_constraint(ctx: &mut Ctx, span: Span, c: &Constraint) {
    match c {
        Constraint::Parallel { l1, l2 } | Constraint::Perpendicular { l1, l2 } => {
            ctx.need_linear(span, l1);
            ctx.need_linear(span, l2);
        }
        Constraint::Tangent { line, circle } => {
            ctx.need_linear(span, line);
            ctx.need_circle(span, circle);
        }
        Constraint::OnCircle { point, circle } => {
            ctx.need_point(span, *point);
            ctx.need_circle(span, circle);
        }
        Constraint::Collinear { a, b, c } => {
            ctx.need_point(span, *a);
            ctx.need_point(span, *b);
            ctx.need_point(span, *c);
            if a == b || b == c || a == c {
                ctx.error(span, "collinear needs three distinct points");
            }
        }
        Constraint::EqualLength { s1, s2 } => {
            ctx.need_linear(span, s1);
            ctx.need_linear(span, s2);
            if s1.key() == s2.key() {
                ctx.warn(span, "equal_length of a segment with itself");
            }
        }
        Constraint::EqualAngle { a1, a2 } => {
            ctx.need_angle(span, a1);
            ctx.need_angle(span, a2);
        }
        Constraint::AngleBisector { bisector, angle } => {
            ctx.need_linear(span, bisector);
            ctx.need_angle(span, angle);
            if bisector.a != angle.vertex && bisector.b != angle.vertex {
                ctx.error(span, format!("bisector {bisector} does not pass through vertex {}", angle.vertex));
            }
        }
        Constraint::IsDiameter { seg, circle } | Constraint::IsChord { seg, circle } => {
            ctx.need_linear(span, seg);
            ctx.need_circle(span, circle);
        }
        Constraint::IsInscribedAngle { angle, circle } => {
            ctx.need_angle(span, angle);
            ctx.need_circle(span, circle);
            if angle.vertex == circle.center {
                ctx.error(span, "inscribed angle vertex cannot be the center");
            }
        }
        Constraint::IsCentralAngle { angle, circle } => {
            ctx.need_angle(span, angle);
            ctx.need_circle(span, circle);
            if angle.vertex != circle.center {
                ctx.error(span, format!("central angle vertex {} is not the center {}", angle.vertex, circle.center));
            }
        }
        Constraint::IsParallelogram { a, b, c, d } => {
            let mut seen = BTreeSet::new();
            for p in [a, b, c, d] {
                ctx.need_point(span, *p);
                if !seen.insert(*p) {
                    ctx.error(span, "parallelogram repeats a vertex");
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scene::parse::parse_program;

    #[test]
    fn lone_point_fails() {
        let p = parse_program("t", "point A").unwrap();
        let r = validate_program(&p);
        assert!(!r.ok());
        assert!(r.errors().any(|i| i.message.contains("fewer than two elements")));
    }

    #[test]
    fn triangle_template_ok() {
        let p = parse_program(
            "t",
            "point A; point B; point C; polygon A B C; segment A B; segment B C; segment C A; point M = midpoint(A,B)",
        )
        .unwrap();
        let r = validate_program(&p);
        assert!(r.ok(), "{r}");
    }

    #[test]
    fn invalid_branch_selector() {
        let p = parse_program(
            "t",
            "point A; point B; circle A B; point P; point T = tangent_point(P, A, 2); segment P T",
        )
        .unwrap();
        let r = validate_program(&p);
        assert!(!r.ok());
        assert!(r.errors().any(|i| i.message.contains("invalid branch selector")));
    }

    #[test]
    fn use_before_declaration() {
        let p = parse_program("t", "point M = midpoint(A,B); point A; point B; segment A B").unwrap();
        let r = validate_program(&p);
        assert!(!r.ok());
        assert!(r.errors().any(|i| i.message.contains("before declaration")));
    }

    #[test]
    fn central_angle_vertex_must_be_center() {
        let p = parse_program(
            "t",
            "point O; point A; circle O A; point B; constraint on_circle(B, O); segment O A; segment O B; constraint is_central_angle(ABO, O)",
        )
        .unwrap();
        let r = validate_program(&p);
        assert!(!r.ok());
    }
}
