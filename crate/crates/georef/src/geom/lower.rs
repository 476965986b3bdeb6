//! Lowering from a validated program to solver form: point indexing, the
//! constructed-point evaluation chain, and constraint residuals.
//!
//! Composite constraints reduce to primitive residuals: a diameter is two
//! on-circle memberships plus collinearity through the center, a chord is
//! two memberships, inscribed/central angles are memberships of their
//! defining points, and a parallelogram is the coincidence of its diagonal
//! midpoints.

use super::constructors as ctor;
use super::constructors::Degenerate;
use super::residuals::Residual;
use super::vec2::Vec2;
use crate::scene::{Constraint, Constructor, DeclKind, LinearRef, PointId, SceneProgram};
use std::collections::BTreeMap;

/// Index-resolved view of a program, shared by the solver and the
/// residual evaluator.
#[derive(Debug, Clone)]
pub struct Structure {
    /// All declared points, in declaration order.
    pub order: Vec<PointId>,
    pub index: BTreeMap<PointId, usize>,
    /// Indices of free points.
    pub free: Vec<usize>,
    /// Constructed points with their constructors, in declaration order.
    pub constructed: Vec<(usize, Constructor)>,
    pub residuals: Vec<Residual>,
    /// Circle (center, through) point pairs, in declaration order.
    pub circles: Vec<(PointId, PointId)>,
}

impl Structure {
    pub fn build(p: &SceneProgram) -> Self {
        let order = p.point_ids();
        let index: BTreeMap<PointId, usize> =
            order.iter().enumerate().map(|(i, id)| (*id, i)).collect();
        let mut free = Vec::new();
        let mut constructed = Vec::new();
        let mut circles = Vec::new();
        for d in &p.declarations {
            match &d.kind {
                DeclKind::FreePoint { id } => free.push(index[id]),
                DeclKind::ConstructedPoint { id, ctor } => constructed.push((index[id], *ctor)),
                DeclKind::Circle { center, through } => circles.push((*center, *through)),
                _ => {}
            }
        }
        let circle_through: BTreeMap<PointId, PointId> = circles.iter().copied().collect();

        let mut residuals = Vec::new();
        let ix = |id: PointId| index[&id];
        let lin = |l: &LinearRef| (ix(l.a), ix(l.b));
        for c in p.constraints() {
            match c {
                Constraint::Parallel { l1, l2 } => {
                    let ((p1, q1), (p2, q2)) = (lin(l1), lin(l2));
                    residuals.push(Residual::Parallel { p1, q1, p2, q2 });
                }
                Constraint::Perpendicular { l1, l2 } => {
                    let ((p1, q1), (p2, q2)) = (lin(l1), lin(l2));
                    residuals.push(Residual::Perpendicular { p1, q1, p2, q2 });
                }
                Constraint::Tangent { line, circle } => {
                    let (p, q) = lin(line);
                    let center = ix(circle.center);
                    let through = ix(circle_through[&circle.center]);
                    residuals.push(Residual::Tangent { p, q, center, through });
                }
                Constraint::OnCircle { point, circle } => {
                    residuals.push(on_circle(&index, &circle_through, *point, circle.center));
                }
                Constraint::Collinear { a, b, c } => {
                    residuals.push(Residual::Collinear { a: ix(*a), b: ix(*b), c: ix(*c) });
                }
                Constraint::EqualLength { s1, s2 } => {
                    let ((p1, q1), (p2, q2)) = (lin(s1), lin(s2));
                    residuals.push(Residual::EqualLength { p1, q1, p2, q2 });
                }
                Constraint::EqualAngle { a1, a2 } => {
                    residuals.push(Residual::EqualAngle {
                        a1: ix(a1.arm_a),
                        v1: ix(a1.vertex),
                        b1: ix(a1.arm_b),
                        a2: ix(a2.arm_a),
                        v2: ix(a2.vertex),
                        b2: ix(a2.arm_b),
                    });
                }
                Constraint::AngleBisector { bisector, angle } => {
                    let dir = if bisector.a == angle.vertex { bisector.b } else { bisector.a };
                    residuals.push(Residual::AngleBisector {
                        arm_a: ix(angle.arm_a),
                        vertex: ix(angle.vertex),
                        arm_b: ix(angle.arm_b),
                        dir: ix(dir),
                    });
                }
                Constraint::IsDiameter { seg, circle } => {
                    residuals.push(on_circle(&index, &circle_through, seg.a, circle.center));
                    residuals.push(on_circle(&index, &circle_through, seg.b, circle.center));
                    residuals.push(Residual::Collinear {
                        a: ix(seg.a),
                        b: ix(circle.center),
                        c: ix(seg.b),
                    });
                }
                Constraint::IsChord { seg, circle } => {
                    residuals.push(on_circle(&index, &circle_through, seg.a, circle.center));
                    residuals.push(on_circle(&index, &circle_through, seg.b, circle.center));
                }
                Constraint::IsInscribedAngle { angle, circle } => {
                    for p in [angle.arm_a, angle.vertex, angle.arm_b] {
                        residuals.push(on_circle(&index, &circle_through, p, circle.center));
                    }
                }
                Constraint::IsCentralAngle { angle, circle } => {
                    for p in [angle.arm_a, angle.arm_b] {
                        residuals.push(on_circle(&index, &circle_through, p, circle.center));
                    }
                }
                Constraint::IsParallelogram { a, b, c, d } => {
                    let (a, b, c, d) = (ix(*a), ix(*b), ix(*c), ix(*d));
                    residuals.push(Residual::ParallelogramX { a, b, c, d });
                    residuals.push(Residual::ParallelogramY { a, b, c, d });
                }
            }
        }

        Structure { order, index, free, constructed, residuals, circles }
    }

    /// Number of scalar optimization variables (two per free point).
    pub fn var_count(&self) -> usize {
        self.free.len() * 2
    }

    /// Compute every constructed point from the free coordinates already
    /// present in `coords`, in declaration order.
    pub fn eval_chain(&self, coords: &mut [Vec2]) -> Result<(), Degenerate> {
        let circle_through: BTreeMap<PointId, PointId> = self.circles.iter().copied().collect();
        for (target, c) in &self.constructed {
            let at = |id: PointId| coords[self.index[&id]];
            let circle = |center: PointId| -> (Vec2, f64) {
                let o = at(center);
                (o, o.dist(at(circle_through[&center])))
            };
            let value = match c {
                Constructor::Midpoint { a, b } => ctor::midpoint(at(*a), at(*b)),
                Constructor::IntersectionLineLine { l1, l2 } => {
                    ctor::intersection_line_line(at(l1.a), at(l1.b), at(l2.a), at(l2.b))?
                }
                Constructor::IntersectionLineCircle { line, circle: cr, branch } => {
                    let (o, r) = circle(cr.center);
                    ctor::intersection_line_circle(at(line.a), at(line.b), o, r, *branch)?
                }
                Constructor::IntersectionCircleCircle { c1, c2, branch } => {
                    let (o1, r1) = circle(c1.center);
                    let (o2, r2) = circle(c2.center);
                    ctor::intersection_circle_circle(o1, r1, o2, r2, *branch)?
                }
                Constructor::FootOfPerpendicular { from, onto } => {
                    ctor::foot_of_perpendicular(at(*from), at(onto.a), at(onto.b))?
                }
                Constructor::TangentPoint { from, circle: cr, branch } => {
                    let (o, r) = circle(cr.center);
                    ctor::tangent_point(at(*from), o, r, *branch)?
                }
                Constructor::PointOn { element, t } => match element {
                    crate::scene::OnElement::Linear { carrier } => {
                        ctor::point_on_segment(at(carrier.a), at(carrier.b), *t)
                    }
                    crate::scene::OnElement::Circle { circle: cr } => {
                        let (o, r) = circle(cr.center);
                        ctor::point_on_circle(o, r, *t)
                    }
                },
                Constructor::ExtensionPoint { seg, factor } => {
                    ctor::extension_point(at(seg.a), at(seg.b), *factor)
                }
                Constructor::CircleCenter { a, b, c } | Constructor::Circumcenter { a, b, c } => {
                    ctor::circumcenter(at(*a), at(*b), at(*c))?
                }
                Constructor::Incenter { a, b, c } => ctor::incenter(at(*a), at(*b), at(*c))?,
                Constructor::Centroid { a, b, c } => ctor::centroid(at(*a), at(*b), at(*c)),
            };
            coords[*target] = value;
        }
        Ok(())
    }
}

fn on_circle(
    index: &BTreeMap<PointId, usize>,
    circle_through: &BTreeMap<PointId, PointId>,
    point: PointId,
    center: PointId,
) -> Residual {
    Residual::OnCircle {
        point: index[&point],
        center: index[&center],
        through: index[&circle_through[&center]],
    }
}
