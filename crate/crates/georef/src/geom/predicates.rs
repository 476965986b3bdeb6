//! Numeric predicates over concrete scenes: the shared oracle used to
//! verify facts and to close answer sets. Semantics match the residual
//! definitions; a predicate holds iff the corresponding residual magnitude
//! is within `eps`.

use super::vec2::{angle_at, Vec2};
use super::scene::ConcreteScene;
use crate::scene::PointId;
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PredicateKind {
    Parallel,
    Perpendicular,
    Tangent,
    OnCircle,
    Collinear,
    PointOnSegment,
    EqualLength,
    EqualAngle,
    PointBetween,
}

/// Element argument of a predicate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ElementArg {
    Point(PointId),
    /// A linear carrier given by two points.
    Linear(PointId, PointId),
    /// A circle given by its center.
    Circle(PointId),
    /// An angle given as (arm, vertex, arm).
    Angle(PointId, PointId, PointId),
}

#[derive(Debug, Error)]
pub enum PredicateError {
    #[error("{kind:?} takes {expected}, got {got} arguments")]
    WrongArity { kind: PredicateKind, expected: &'static str, got: usize },
    #[error("unknown element in predicate arguments: {0}")]
    UnknownElement(String),
}

fn pos(s: &ConcreteScene, id: PointId) -> Result<Vec2, PredicateError> {
    s.coords
        .get(&id)
        .copied()
        .ok_or_else(|| PredicateError::UnknownElement(id.to_string()))
}

fn linear(s: &ConcreteScene, args: &ElementArg) -> Result<(Vec2, Vec2), PredicateError> {
    match args {
        ElementArg::Linear(a, b) => Ok((pos(s, *a)?, pos(s, *b)?)),
        other => Err(PredicateError::UnknownElement(format!("{other:?} is not linear"))),
    }
}

fn circle(s: &ConcreteScene, args: &ElementArg) -> Result<(Vec2, f64), PredicateError> {
    match args {
        ElementArg::Circle(center) => {
            let c = s
                .elements
                .find_circle(*center)
                .ok_or_else(|| PredicateError::UnknownElement(format!("circle {center}")))?;
            Ok((pos(s, c.center)?, c.radius))
        }
        other => Err(PredicateError::UnknownElement(format!("{other:?} is not a circle"))),
    }
}

fn point(s: &ConcreteScene, args: &ElementArg) -> Result<Vec2, PredicateError> {
    match args {
        ElementArg::Point(p) => pos(s, *p),
        other => Err(PredicateError::UnknownElement(format!("{other:?} is not a point"))),
    }
}

fn angle(s: &ConcreteScene, args: &ElementArg) -> Result<f64, PredicateError> {
    match args {
        ElementArg::Angle(a, v, b) => Ok(angle_at(pos(s, *a)?, pos(s, *v)?, pos(s, *b)?)),
        other => Err(PredicateError::UnknownElement(format!("{other:?} is not an angle"))),
    }
}

fn arity(kind: PredicateKind, args: &[ElementArg], n: usize, expected: &'static str) -> Result<(), PredicateError> {
    if args.len() == n {
        Ok(())
    } else {
        Err(PredicateError::WrongArity { kind, expected, got: args.len() })
    }
}

/// Distance from `p` to the infinite line through (a, b).
pub fn line_distance(p: Vec2, a: Vec2, b: Vec2) -> f64 {
    let d = b - a;
    (d.cross(p - a) / d.norm()).abs()
}

/// True iff `p` lies on the segment (a, b), endpoints included, within eps.
pub fn on_segment(p: Vec2, a: Vec2, b: Vec2, eps: f64) -> bool {
    if line_distance(p, a, b) > eps {
        return false;
    }
    let d = b - a;
    let t = (p - a).dot(d) / d.norm_sq();
    let slack = eps / d.norm();
    t >= -slack && t <= 1.0 + slack
}

/// Evaluate a predicate on scene elements.
pub fn numeric_predicate(
    s: &ConcreteScene,
    kind: PredicateKind,
    args: &[ElementArg],
    eps: f64,
) -> Result<bool, PredicateError> {
    match kind {
        PredicateKind::Parallel => {
            arity(kind, args, 2, "two linear elements")?;
            let (a1, b1) = linear(s, &args[0])?;
            let (a2, b2) = linear(s, &args[1])?;
            let cross = (b1 - a1).normalized().cross((b2 - a2).normalized());
            Ok(cross.abs() <= eps)
        }
        PredicateKind::Perpendicular => {
            arity(kind, args, 2, "two linear elements")?;
            let (a1, b1) = linear(s, &args[0])?;
            let (a2, b2) = linear(s, &args[1])?;
            let dot = (b1 - a1).normalized().dot((b2 - a2).normalized());
            Ok(dot.abs() <= eps)
        }
        PredicateKind::Tangent => {
            arity(kind, args, 2, "a linear element and a circle")?;
            let (a, b) = linear(s, &args[0])?;
            let (center, radius) = circle(s, &args[1])?;
            Ok((line_distance(center, a, b) - radius).abs() <= eps)
        }
        PredicateKind::OnCircle => {
            arity(kind, args, 2, "a point and a circle")?;
            let p = point(s, &args[0])?;
            let (center, radius) = circle(s, &args[1])?;
            Ok((p.dist(center) - radius).abs() <= eps)
        }
        PredicateKind::Collinear => {
            arity(kind, args, 3, "three points")?;
            let a = point(s, &args[0])?;
            let b = point(s, &args[1])?;
            let c = point(s, &args[2])?;
            let lmax = a.dist(b).max(b.dist(c)).max(c.dist(a));
            Ok(((b - a).cross(c - a) / lmax).abs() <= eps)
        }
        PredicateKind::PointOnSegment => {
            arity(kind, args, 2, "a point and a segment")?;
            let p = point(s, &args[0])?;
            let (a, b) = linear(s, &args[1])?;
            Ok(on_segment(p, a, b, eps))
        }
        PredicateKind::EqualLength => {
            arity(kind, args, 2, "two linear elements")?;
            let (a1, b1) = linear(s, &args[0])?;
            let (a2, b2) = linear(s, &args[1])?;
            Ok((a1.dist(b1) - a2.dist(b2)).abs() <= eps)
        }
        PredicateKind::EqualAngle => {
            arity(kind, args, 2, "two angles")?;
            Ok((angle(s, &args[0])? - angle(s, &args[1])?).abs() <= eps)
        }
        PredicateKind::PointBetween => {
            arity(kind, args, 3, "a point and two endpoints")?;
            let p = point(s, &args[0])?;
            let a = point(s, &args[1])?;
            let b = point(s, &args[2])?;
            let lmax = a.dist(b).max(p.dist(a)).max(p.dist(b));
            let collinear = ((a - p).cross(b - p) / lmax).abs() <= eps;
            Ok(collinear && (a - p).dot(b - p) < 0.0)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scene::{parse_program, IdentifierScheme};
    use std::collections::BTreeMap;

    fn id(c: char) -> PointId {
        PointId::new(c).unwrap()
    }

    fn fixture() -> ConcreteScene {
        let p = parse_program(
            "t",
            "point A; point B; point C; point D; point O; point E; \
             segment A B; segment C D; circle O E; point M = midpoint(A, B)",
        )
        .unwrap();
        let mut coords = BTreeMap::new();
        coords.insert(id('A'), Vec2::new(0.0, 0.0));
        coords.insert(id('B'), Vec2::new(1.0, 0.0));
        coords.insert(id('C'), Vec2::new(0.0, 1.0));
        coords.insert(id('D'), Vec2::new(2.0, 1.0));
        coords.insert(id('O'), Vec2::new(0.0, 0.0));
        coords.insert(id('E'), Vec2::new(1.0, 0.0));
        ConcreteScene::from_parts(p, coords, IdentifierScheme::Common, 0, (512.0, 512.0))
    }

    #[test]
    fn parallel_segments() {
        let s = fixture();
        let ok = numeric_predicate(
            &s,
            PredicateKind::Parallel,
            &[ElementArg::Linear(id('A'), id('B')), ElementArg::Linear(id('C'), id('D'))],
            1e-9,
        )
        .unwrap();
        assert!(ok);
    }

    #[test]
    fn point_on_unit_circle() {
        let s = fixture();
        let ok = numeric_predicate(
            &s,
            PredicateKind::OnCircle,
            &[ElementArg::Point(id('B')), ElementArg::Circle(id('O'))],
            1e-9,
        )
        .unwrap();
        assert!(ok);
    }

    #[test]
    fn point_off_segment() {
        let p = parse_program("t", "point A; point B; point P; segment A B; point M = midpoint(A, B)").unwrap();
        let mut coords = BTreeMap::new();
        coords.insert(id('A'), Vec2::new(0.0, 0.0));
        coords.insert(id('B'), Vec2::new(1.0, 0.0));
        coords.insert(id('P'), Vec2::new(0.5, 0.1));
        let s = ConcreteScene::from_parts(p, coords, IdentifierScheme::Common, 0, (512.0, 512.0));
        let ok = numeric_predicate(
            &s,
            PredicateKind::PointOnSegment,
            &[ElementArg::Point(id('P')), ElementArg::Linear(id('A'), id('B'))],
            1e-6,
        )
        .unwrap();
        assert!(!ok);
    }

    #[test]
    fn wrong_arity_is_an_error() {
        let s = fixture();
        let e = numeric_predicate(&s, PredicateKind::Parallel, &[ElementArg::Point(id('A'))], 1e-9);
        assert!(e.is_err());
    }
}
