//! Numeric verification of facts against scene coordinates. Every fact a
//! scene ships with has passed this check at eps = 1e-6.

use super::kinds::{ElementRef, Fact, FactKind};
use crate::geom::predicates::line_distance;
use crate::geom::{angle_at, ConcreteScene, Vec2};
use crate::scene::PointId;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum VerifyFailure {
    #[error("numeric check failed: |{value:.3e}| > eps")]
    Numeric { value: f64 },
    #[error("fact has unexpected subjects: {0}")]
    WrongSubjects(String),
    #[error("element missing from scene: {0}")]
    MissingElement(String),
}

type R<T> = Result<T, VerifyFailure>;

fn wrong(fact: &Fact) -> VerifyFailure {
    VerifyFailure::WrongSubjects(format!("{:?} {:?}", fact.kind, fact.subjects))
}

fn pos(s: &ConcreteScene, id: PointId) -> R<Vec2> {
    s.coords
        .get(&id)
        .copied()
        .ok_or_else(|| VerifyFailure::MissingElement(id.to_string()))
}

fn linear(s: &ConcreteScene, r: &ElementRef) -> R<(Vec2, Vec2)> {
    match r {
        ElementRef::Linear { a, b, .. } => Ok((pos(s, *a)?, pos(s, *b)?)),
        other => Err(VerifyFailure::WrongSubjects(format!("{other:?} is not linear"))),
    }
}

fn circle(s: &ConcreteScene, r: &ElementRef) -> R<(Vec2, f64)> {
    match r {
        ElementRef::Circle { center } => {
            let c = s
                .elements
                .find_circle(*center)
                .ok_or_else(|| VerifyFailure::MissingElement(format!("circle {center}")))?;
            Ok((pos(s, c.center)?, c.radius))
        }
        other => Err(VerifyFailure::WrongSubjects(format!("{other:?} is not a circle"))),
    }
}

fn angle_points(s: &ConcreteScene, r: &ElementRef) -> R<(Vec2, Vec2, Vec2, PointId, PointId, PointId)> {
    match r {
        ElementRef::Angle { a, vertex, b } => {
            Ok((pos(s, *a)?, pos(s, *vertex)?, pos(s, *b)?, *a, *vertex, *b))
        }
        other => Err(VerifyFailure::WrongSubjects(format!("{other:?} is not an angle"))),
    }
}

fn gate(values: &[f64], eps: f64) -> R<f64> {
    let worst = values.iter().fold(0.0f64, |acc, v| acc.max(v.abs()));
    if worst <= eps {
        Ok(worst)
    } else {
        Err(VerifyFailure::Numeric { value: worst })
    }
}

fn on_circle_residual(p: Vec2, center: Vec2, radius: f64) -> f64 {
    p.dist(center) - radius
}

fn unit(a: Vec2, b: Vec2) -> Vec2 {
    (b - a).normalized()
}

/// Check the defining numeric predicate of a fact. `Ok(witness)` carries
/// the largest residual magnitude observed; failures report the violating
/// value or a structural mismatch.
pub fn verify_fact(fact: &Fact, s: &ConcreteScene, eps: f64) -> R<f64> {
    let t = &fact.answer_target;
    match fact.kind {
        FactKind::IntersectionPoint => {
            let p = match t {
                ElementRef::Point { id } => pos(s, *id)?,
                _ => return Err(wrong(fact)),
            };
            let mut residuals = Vec::new();
            for sub in &fact.subjects {
                match sub {
                    ElementRef::Linear { .. } => {
                        let (a, b) = linear(s, sub)?;
                        residuals.push(line_distance(p, a, b));
                    }
                    ElementRef::Circle { .. } => {
                        let (c, r) = circle(s, sub)?;
                        residuals.push(on_circle_residual(p, c, r));
                    }
                    _ => return Err(wrong(fact)),
                }
            }
            gate(&residuals, eps)
        }
        FactKind::TangencyPoint => {
            let p = match t {
                ElementRef::Point { id } => pos(s, *id)?,
                _ => return Err(wrong(fact)),
            };
            let (a, b) = linear(s, &fact.subjects[0])?;
            let (c, r) = circle(s, &fact.subjects[1])?;
            gate(
                &[
                    line_distance(p, a, b),
                    on_circle_residual(p, c, r),
                    line_distance(c, a, b) - r,
                ],
                eps,
            )
        }
        FactKind::Midpoint => {
            let m = match t {
                ElementRef::Point { id } => pos(s, *id)?,
                _ => return Err(wrong(fact)),
            };
            let (a, b) = linear(s, &fact.subjects[0])?;
            gate(&[m.dist((a + b) * 0.5)], eps)
        }
        FactKind::CircleCenter => {
            let (ElementRef::Point { id }, ElementRef::Circle { center }) =
                (t, &fact.subjects[0])
            else {
                return Err(wrong(fact));
            };
            if id == center {
                Ok(0.0)
            } else {
                Err(wrong(fact))
            }
        }
        FactKind::FootOfPerpendicular => {
            let f = match t {
                ElementRef::Point { id } => pos(s, *id)?,
                _ => return Err(wrong(fact)),
            };
            let from = match &fact.subjects[0] {
                ElementRef::Point { id } => pos(s, *id)?,
                _ => return Err(wrong(fact)),
            };
            let (a, b) = linear(s, &fact.subjects[1])?;
            let mut residuals = vec![line_distance(f, a, b)];
            if from.dist(f) > eps {
                residuals.push(unit(f, from).dot(unit(a, b)));
            }
            gate(&residuals, eps)
        }
        FactKind::PointOnExtension => {
            let e = match t {
                ElementRef::Point { id } => pos(s, *id)?,
                _ => return Err(wrong(fact)),
            };
            let (a, b) = linear(s, &fact.subjects[0])?;
            let lmax = a.dist(b).max(e.dist(a)).max(e.dist(b));
            let coll = ((b - a).cross(e - a) / lmax).abs();
            let param = (e - a).dot(b - a) / (b - a).norm_sq();
            let slack = eps / a.dist(b);
            if coll <= eps && (param < -slack || param > 1.0 + slack) {
                Ok(coll)
            } else {
                Err(VerifyFailure::Numeric { value: coll.max(0.5 - (param - 0.5).abs()) })
            }
        }
        FactKind::Incenter => {
            let i = match t {
                ElementRef::Point { id } => pos(s, *id)?,
                _ => return Err(wrong(fact)),
            };
            let vs = polygon_points(s, &fact.subjects[0])?;
            if vs.len() != 3 {
                return Err(wrong(fact));
            }
            let d0 = line_distance(i, vs[0], vs[1]);
            let d1 = line_distance(i, vs[1], vs[2]);
            let d2 = line_distance(i, vs[2], vs[0]);
            gate(&[d0 - d1, d1 - d2], eps)
        }
        FactKind::Circumcenter => {
            let o = match t {
                ElementRef::Point { id } => pos(s, *id)?,
                _ => return Err(wrong(fact)),
            };
            let vs = polygon_points(s, &fact.subjects[0])?;
            if vs.len() != 3 {
                return Err(wrong(fact));
            }
            gate(&[o.dist(vs[0]) - o.dist(vs[1]), o.dist(vs[1]) - o.dist(vs[2])], eps)
        }
        FactKind::Centroid => {
            let g = match t {
                ElementRef::Point { id } => pos(s, *id)?,
                _ => return Err(wrong(fact)),
            };
            let vs = polygon_points(s, &fact.subjects[0])?;
            if vs.len() != 3 {
                return Err(wrong(fact));
            }
            gate(&[g.dist((vs[0] + vs[1] + vs[2]) / 3.0)], eps)
        }
        FactKind::TangentLine => {
            let (a, b) = linear(s, t)?;
            let (c, r) = circle(s, &fact.subjects[0])?;
            gate(&[line_distance(c, a, b) - r], eps)
        }
        FactKind::Secant => {
            let (a, b) = linear(s, t)?;
            let (c, r) = circle(s, &fact.subjects[0])?;
            let d = line_distance(c, a, b);
            if d <= r - eps {
                Ok(r - d)
            } else {
                Err(VerifyFailure::Numeric { value: d - r })
            }
        }
        FactKind::Chord => {
            let (a, b) = linear(s, t)?;
            let (c, r) = circle(s, &fact.subjects[0])?;
            gate(&[on_circle_residual(a, c, r), on_circle_residual(b, c, r)], eps)
        }
        FactKind::Diameter => {
            let (a, b) = linear(s, t)?;
            let (c, r) = circle(s, &fact.subjects[0])?;
            let lmax = a.dist(b).max(a.dist(c)).max(b.dist(c));
            gate(
                &[
                    on_circle_residual(a, c, r),
                    on_circle_residual(b, c, r),
                    (b - a).cross(c - a) / lmax,
                ],
                eps,
            )
        }
        FactKind::Radius => {
            let (ElementRef::Linear { a, b, .. }, ElementRef::Circle { center }) =
                (t, &fact.subjects[0])
            else {
                return Err(wrong(fact));
            };
            let end = if a == center {
                *b
            } else if b == center {
                *a
            } else {
                return Err(wrong(fact));
            };
            let (c, r) = circle(s, &fact.subjects[0])?;
            gate(&[on_circle_residual(pos(s, end)?, c, r)], eps)
        }
        FactKind::InscribedAngle | FactKind::CentralAngle => {
            let (pa, pv, pb, _, v, _) = angle_points(s, t)?;
            let (c, r) = circle(s, &fact.subjects[0])?;
            let mut residuals = vec![on_circle_residual(pa, c, r), on_circle_residual(pb, c, r)];
            if fact.kind == FactKind::InscribedAngle {
                residuals.push(on_circle_residual(pv, c, r));
            } else {
                // Central angle: the vertex must be the circle's center.
                match &fact.subjects[0] {
                    ElementRef::Circle { center } if *center == v => {}
                    _ => return Err(wrong(fact)),
                }
            }
            gate(&residuals, eps)
        }
        FactKind::Triangle => {
            let vs = polygon_points(s, t)?;
            if vs.len() != 3 {
                return Err(wrong(fact));
            }
            let lmax = vs[0].dist(vs[1]).max(vs[1].dist(vs[2])).max(vs[2].dist(vs[0]));
            let area_ratio = ((vs[1] - vs[0]).cross(vs[2] - vs[0]) / lmax).abs();
            let min_side = vs[0].dist(vs[1]).min(vs[1].dist(vs[2])).min(vs[2].dist(vs[0]));
            if area_ratio > eps && min_side > eps {
                Ok(0.0)
            } else {
                Err(VerifyFailure::Numeric { value: area_ratio.min(min_side) })
            }
        }
        FactKind::Parallelogram => {
            let vs = polygon_points(s, t)?;
            if vs.len() != 4 {
                return Err(wrong(fact));
            }
            let m1 = (vs[0] + vs[2]) * 0.5;
            let m2 = (vs[1] + vs[3]) * 0.5;
            gate(&[m1.dist(m2)], eps)
        }
        FactKind::PerpendicularBisector => {
            let (la, lb) = linear(s, t)?;
            let (sa, sb) = linear(s, &fact.subjects[0])?;
            gate(
                &[unit(la, lb).dot(unit(sa, sb)), line_distance((sa + sb) * 0.5, la, lb)],
                eps,
            )
        }
        FactKind::AngleBisector | FactKind::AngleBisects => {
            let (ElementRef::Linear { a: ba, b: bb, .. }, angle_ref) = (t, &fact.subjects[0])
            else {
                return Err(wrong(fact));
            };
            let (pa, pv, pb, _, v, _) = angle_points(s, angle_ref)?;
            let dir = if *ba == v { *bb } else { *ba };
            let pd = pos(s, dir)?;
            gate(&[angle_at(pa, pv, pd) - angle_at(pd, pv, pb)], eps)
        }
        FactKind::ParallelPair => {
            let (a1, b1) = linear(s, &fact.subjects[0])?;
            let (a2, b2) = linear(s, &fact.subjects[1])?;
            gate(&[unit(a1, b1).cross(unit(a2, b2))], eps)
        }
        FactKind::PerpendicularPair => {
            let (a1, b1) = linear(s, &fact.subjects[0])?;
            let (a2, b2) = linear(s, &fact.subjects[1])?;
            gate(&[unit(a1, b1).dot(unit(a2, b2))], eps)
        }
        FactKind::EqualAngles | FactKind::AlternateInteriorAngles | FactKind::CorrespondingAngles => {
            let (a1, v1, b1, ..) = angle_points(s, &fact.subjects[0])?;
            let (a2, v2, b2, ..) = angle_points(s, &fact.subjects[1])?;
            gate(&[angle_at(a1, v1, b1) - angle_at(a2, v2, b2)], eps)
        }
        FactKind::CoInteriorAngles => {
            let (a1, v1, b1, ..) = angle_points(s, &fact.subjects[0])?;
            let (a2, v2, b2, ..) = angle_points(s, &fact.subjects[1])?;
            gate(&[angle_at(a1, v1, b1) + angle_at(a2, v2, b2) - std::f64::consts::PI], eps)
        }
        FactKind::EqualSegments => {
            let (a1, b1) = linear(s, &fact.subjects[0])?;
            let (a2, b2) = linear(s, &fact.subjects[1])?;
            gate(&[a1.dist(b1) - a2.dist(b2)], eps)
        }
        FactKind::VerticalAngles => {
            let (pa1, pv1, pb1, a1, v1, b1) = angle_points(s, &fact.subjects[0])?;
            let (pa2, pv2, pb2, a2, v2, b2) = angle_points(s, &fact.subjects[1])?;
            if v1 != v2 {
                return Err(wrong(fact));
            }
            let _ = (a1, b1, a2, b2);
            let opposed = |x: Vec2, y: Vec2| -> bool {
                let (ux, uy) = ((x - pv1).normalized(), (y - pv1).normalized());
                ux.cross(uy).abs() <= eps && ux.dot(uy) < 0.0
            };
            let pairing_a = opposed(pa1, pa2) && opposed(pb1, pb2);
            let pairing_b = opposed(pa1, pb2) && opposed(pb1, pa2);
            if !(pairing_a || pairing_b) {
                return Err(VerifyFailure::Numeric { value: 1.0 });
            }
            let _ = pv2;
            gate(&[angle_at(pa1, pv1, pb1) - angle_at(pa2, pv2, pb2)], eps)
        }
        FactKind::CollinearTriple => {
            let m = match t {
                ElementRef::Point { id } => pos(s, *id)?,
                _ => return Err(wrong(fact)),
            };
            let (a, b) = match (&fact.subjects[0], &fact.subjects[1]) {
                (ElementRef::Point { id: a }, ElementRef::Point { id: b }) => {
                    (pos(s, *a)?, pos(s, *b)?)
                }
                _ => return Err(wrong(fact)),
            };
            let lmax = a.dist(b).max(m.dist(a)).max(m.dist(b));
            let coll = ((b - a).cross(m - a) / lmax).abs();
            if coll <= eps && (a - m).dot(b - m) < 0.0 {
                Ok(coll)
            } else {
                Err(VerifyFailure::Numeric { value: coll.max(eps * 2.0) })
            }
        }
    }
}

fn polygon_points(s: &ConcreteScene, r: &ElementRef) -> R<Vec<Vec2>> {
    match r {
        ElementRef::Polygon { vertices } => vertices.iter().map(|v| pos(s, *v)).collect(),
        other => Err(VerifyFailure::WrongSubjects(format!("{other:?} is not a polygon"))),
    }
}
