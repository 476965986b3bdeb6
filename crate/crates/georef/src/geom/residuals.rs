//! Primitive constraint residuals and their analytic gradients.
//!
//! Every declared constraint lowers to one or more primitive residuals
//! over point coordinates. The layout objective is the sum of squared
//! residuals. Residual definitions:
//!
//! - parallel:       cross product of unit directions
//! - perpendicular:  dot product of unit directions
//! - tangent:        dist(center, line) - radius
//! - on_circle:      dist(center, point) - radius
//! - collinear:      signed area x2 / longest side
//! - equal_length:   d1 - d2
//! - equal_angle:    theta1 - theta2 (radians)
//! - angle_bisector: theta_left - theta_right
//! - parallelogram:  diagonal midpoints coincide (two linear residuals)
//!
//! Circle radii are derived quantities (distance from the center to the
//! circle's through-point), so they appear in residuals as point pairs.

use super::vec2::Vec2;

/// Index of a point in the scene coordinate table.
pub type Pt = usize;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Residual {
    Parallel { p1: Pt, q1: Pt, p2: Pt, q2: Pt },
    Perpendicular { p1: Pt, q1: Pt, p2: Pt, q2: Pt },
    Tangent { p: Pt, q: Pt, center: Pt, through: Pt },
    OnCircle { point: Pt, center: Pt, through: Pt },
    Collinear { a: Pt, b: Pt, c: Pt },
    EqualLength { p1: Pt, q1: Pt, p2: Pt, q2: Pt },
    EqualAngle { a1: Pt, v1: Pt, b1: Pt, a2: Pt, v2: Pt, b2: Pt },
    AngleBisector { arm_a: Pt, vertex: Pt, arm_b: Pt, dir: Pt },
    ParallelogramX { a: Pt, b: Pt, c: Pt, d: Pt },
    ParallelogramY { a: Pt, b: Pt, c: Pt, d: Pt },
}

/// Gradient accumulator: per-point partial derivatives of one residual.
#[derive(Debug, Default, Clone)]
pub struct Grad {
    pub parts: Vec<(Pt, Vec2)>,
}

impl Grad {
    pub fn add(&mut self, p: Pt, g: Vec2) {
        for (q, acc) in &mut self.parts {
            if *q == p {
                *acc = *acc + g;
                return;
            }
        }
        self.parts.push((p, g));
    }
}

fn unit_cross(d1: Vec2, d2: Vec2) -> f64 {
    d1.cross(d2) / (d1.norm() * d2.norm())
}

fn unit_dot(d1: Vec2, d2: Vec2) -> f64 {
    d1.dot(d2) / (d1.norm() * d2.norm())
}

/// Signed distance from `o` to the line through (p, q).
fn signed_line_dist(p: Vec2, q: Vec2, o: Vec2) -> f64 {
    let d = q - p;
    d.cross(o - p) / d.norm()
}

fn longest_side(a: Vec2, b: Vec2, c: Vec2) -> (Pt, Pt, f64) {
    // Returns local indices 0,1,2 for a,b,c.
    let ab = a.dist(b);
    let bc = b.dist(c);
    let ca = c.dist(a);
    if ab >= bc && ab >= ca {
        (0, 1, ab)
    } else if bc >= ab && bc >= ca {
        (1, 2, bc)
    } else {
        (2, 0, ca)
    }
}

/// Unsigned angle gradient helper. Returns (theta, d/d_arm_a, d/d_vertex,
/// d/d_arm_b) for the angle at `v` between rays toward `a` and `b`.
fn angle_with_grad(a: Vec2, v: Vec2, b: Vec2) -> (f64, Vec2, Vec2, Vec2) {
    let u = a - v;
    let w = b - v;
    let cross = u.cross(w);
    let dot = u.dot(w);
    let theta = cross.abs().atan2(dot);
    let sign = if cross >= 0.0 { 1.0 } else { -1.0 };
    // Signed-angle gradients, then folded through |.|.
    let ga = Vec2::new(u.y, -u.x) / u.norm_sq() * sign;
    let gb = Vec2::new(-w.y, w.x) / w.norm_sq() * sign;
    let gv = -(ga + gb);
    (theta, ga, gv, gb)
}

impl Residual {
    /// Evaluate the residual at the given coordinates.
    pub fn eval(&self, pts: &[Vec2]) -> f64 {
        match *self {
            Residual::Parallel { p1, q1, p2, q2 } => {
                unit_cross(pts[q1] - pts[p1], pts[q2] - pts[p2])
            }
            Residual::Perpendicular { p1, q1, p2, q2 } => {
                unit_dot(pts[q1] - pts[p1], pts[q2] - pts[p2])
            }
            Residual::Tangent { p, q, center, through } => {
                let sd = signed_line_dist(pts[p], pts[q], pts[center]);
                sd.abs() - pts[center].dist(pts[through])
            }
            Residual::OnCircle { point, center, through } => {
                pts[point].dist(pts[center]) - pts[through].dist(pts[center])
            }
            Residual::Collinear { a, b, c } => {
                let x = (pts[b] - pts[a]).cross(pts[c] - pts[a]);
                let (_, _, lmax) = longest_side(pts[a], pts[b], pts[c]);
                x / lmax
            }
            Residual::EqualLength { p1, q1, p2, q2 } => {
                pts[p1].dist(pts[q1]) - pts[p2].dist(pts[q2])
            }
            Residual::EqualAngle { a1, v1, b1, a2, v2, b2 } => {
                let (t1, ..) = angle_with_grad(pts[a1], pts[v1], pts[b1]);
                let (t2, ..) = angle_with_grad(pts[a2], pts[v2], pts[b2]);
                t1 - t2
            }
            Residual::AngleBisector { arm_a, vertex, arm_b, dir } => {
                let (left, ..) = angle_with_grad(pts[arm_a], pts[vertex], pts[dir]);
                let (right, ..) = angle_with_grad(pts[dir], pts[vertex], pts[arm_b]);
                left - right
            }
            Residual::ParallelogramX { a, b, c, d } => {
                (pts[a].x + pts[c].x - pts[b].x - pts[d].x) * 0.5
            }
            Residual::ParallelogramY { a, b, c, d } => {
                (pts[a].y + pts[c].y - pts[b].y - pts[d].y) * 0.5
            }
        }
    }

    /// Analytic gradient with respect to every involved point.
    pub fn grad(&self, pts: &[Vec2], out: &mut Grad) {
        out.parts.clear();
        match *self {
            Residual::Parallel { p1, q1, p2, q2 } => {
                let d1 = pts[q1] - pts[p1];
                let d2 = pts[q2] - pts[p2];
                let (l1, l2) = (d1.norm(), d2.norm());
                let r = d1.cross(d2) / (l1 * l2);
                let gd1 = Vec2::new(d2.y, -d2.x) / (l1 * l2) - d1 * (r / (l1 * l1));
                let gd2 = Vec2::new(-d1.y, d1.x) / (l1 * l2) - d2 * (r / (l2 * l2));
                out.add(p1, -gd1);
                out.add(q1, gd1);
                out.add(p2, -gd2);
                out.add(q2, gd2);
            }
            Residual::Perpendicular { p1, q1, p2, q2 } => {
                let d1 = pts[q1] - pts[p1];
                let d2 = pts[q2] - pts[p2];
                let (l1, l2) = (d1.norm(), d2.norm());
                let r = d1.dot(d2) / (l1 * l2);
                let gd1 = d2 / (l1 * l2) - d1 * (r / (l1 * l1));
                let gd2 = d1 / (l1 * l2) - d2 * (r / (l2 * l2));
                out.add(p1, -gd1);
                out.add(q1, gd1);
                out.add(p2, -gd2);
                out.add(q2, gd2);
            }
            Residual::Tangent { p, q, center, through } => {
                let (pp, qq, o, t) = (pts[p], pts[q], pts[center], pts[through]);
                let d = qq - pp;
                let l = d.norm();
                let cross = d.cross(o - pp);
                let sd = cross / l;
                let s = if sd >= 0.0 { 1.0 } else { -1.0 };
                // d|sd|/dX = s * d(sd)/dX
                let g_o = Vec2::new(-d.y, d.x) / l;
                let g_p = Vec2::new(qq.y - o.y, o.x - qq.x) / l + d * (sd / (l * l));
                let g_q = Vec2::new(o.y - pp.y, pp.x - o.x) / l - d * (sd / (l * l));
                out.add(p, g_p * s);
                out.add(q, g_q * s);
                out.add(center, g_o * s);
                // radius term: -(|o - t|)
                let rad = o - t;
                let u = rad / rad.norm();
                out.add(center, -u);
                out.add(through, u);
            }
            Residual::OnCircle { point, center, through } => {
                let up = (pts[point] - pts[center]).normalized();
                let ut = (pts[through] - pts[center]).normalized();
                out.add(point, up);
                out.add(through, -ut);
                out.add(center, ut - up);
            }
            Residual::Collinear { a, b, c } => {
                let (pa, pb, pc) = (pts[a], pts[b], pts[c]);
                let x = (pb - pa).cross(pc - pa);
                let (i, j, lmax) = longest_side(pa, pb, pc);
                let gx_a = Vec2::new(pb.y - pc.y, pc.x - pb.x);
                let gx_b = Vec2::new(pc.y - pa.y, pa.x - pc.x);
                let gx_c = Vec2::new(pa.y - pb.y, pb.x - pa.x);
                out.add(a, gx_a / lmax);
                out.add(b, gx_b / lmax);
                out.add(c, gx_c / lmax);
                // Longest-side length treated as locally smooth in the argmax.
                let local = [a, b, c];
                let coords = [pa, pb, pc];
                let u = (coords[i] - coords[j]) / lmax;
                let factor = -x / (lmax * lmax);
                out.add(local[i], u * factor);
                out.add(local[j], -u * factor);
            }
            Residual::EqualLength { p1, q1, p2, q2 } => {
                let u1 = (pts[q1] - pts[p1]).normalized();
                let u2 = (pts[q2] - pts[p2]).normalized();
                out.add(q1, u1);
                out.add(p1, -u1);
                out.add(q2, -u2);
                out.add(p2, u2);
            }
            Residual::EqualAngle { a1, v1, b1, a2, v2, b2 } => {
                let (_, ga, gv, gb) = angle_with_grad(pts[a1], pts[v1], pts[b1]);
                out.add(a1, ga);
                out.add(v1, gv);
                out.add(b1, gb);
                let (_, ga, gv, gb) = angle_with_grad(pts[a2], pts[v2], pts[b2]);
                out.add(a2, -ga);
                out.add(v2, -gv);
                out.add(b2, -gb);
            }
            Residual::AngleBisector { arm_a, vertex, arm_b, dir } => {
                let (_, ga, gv, gd) = angle_with_grad(pts[arm_a], pts[vertex], pts[dir]);
                out.add(arm_a, ga);
                out.add(vertex, gv);
                out.add(dir, gd);
                let (_, gd, gv, gb) = angle_with_grad(pts[dir], pts[vertex], pts[arm_b]);
                out.add(dir, -gd);
                out.add(vertex, -gv);
                out.add(arm_b, -gb);
            }
            Residual::ParallelogramX { a, b, c, d } => {
                out.add(a, Vec2::new(0.5, 0.0));
                out.add(c, Vec2::new(0.5, 0.0));
                out.add(b, Vec2::new(-0.5, 0.0));
                out.add(d, Vec2::new(-0.5, 0.0));
            }
            Residual::ParallelogramY { a, b, c, d } => {
                out.add(a, Vec2::new(0.0, 0.5));
                out.add(c, Vec2::new(0.0, 0.5));
                out.add(b, Vec2::new(0.0, -0.5));
                out.add(d, Vec2::new(0.0, -0.5));
            }
        }
    }

    /// Points this residual reads.
    pub fn involved(&self) -> Vec<Pt> {
        match *self {
            Residual::Parallel { p1, q1, p2, q2 }
            | Residual::Perpendicular { p1, q1, p2, q2 }
            | Residual::EqualLength { p1, q1, p2, q2 } => vec![p1, q1, p2, q2],
            Residual::Tangent { p, q, center, through } => vec![p, q, center, through],
            Residual::OnCircle { point, center, through } => vec![point, center, through],
            Residual::Collinear { a, b, c } => vec![a, b, c],
            Residual::EqualAngle { a1, v1, b1, a2, v2, b2 } => vec![a1, v1, b1, a2, v2, b2],
            Residual::AngleBisector { arm_a, vertex, arm_b, dir } => {
                vec![arm_a, vertex, arm_b, dir]
            }
            Residual::ParallelogramX { a, b, c, d } | Residual::ParallelogramY { a, b, c, d } => {
                vec![a, b, c, d]
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tangent_residual_matches_definition() {
        // Unit circle at origin via center (0,0) and through-point (1,0).
        let pts = vec![
            Vec2::new(1.0, -1.0), // p (line x = 1)
            Vec2::new(1.0, 1.0),  // q
            Vec2::new(0.0, 0.0),  // center
            Vec2::new(1.0, 0.0),  // through
        ];
        let r = Residual::Tangent { p: 0, q: 1, center: 2, through: 3 };
        assert!(r.eval(&pts).abs() < 1e-12);

        let pts_off = vec![
            Vec2::new(1.1, -1.0),
            Vec2::new(1.1, 1.0),
            Vec2::new(0.0, 0.0),
            Vec2::new(1.0, 0.0),
        ];
        let v = r.eval(&pts_off);
        assert!((v * v - 0.01).abs() < 1e-12, "squared contribution is 0.01, got {}", v * v);
    }

    #[test]
    fn parallel_residual_zero_for_parallel() {
        let pts = vec![
            Vec2::new(0.0, 0.0),
            Vec2::new(1.0, 0.0),
            Vec2::new(0.0, 1.0),
            Vec2::new(2.0, 1.0),
        ];
        let r = Residual::Parallel { p1: 0, q1: 1, p2: 2, q2: 3 };
        assert!(r.eval(&pts).abs() < 1e-12);
    }
}
