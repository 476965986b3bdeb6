//! Identifier relabeling and the names-erased structural hash.
//!
//! The two schemes are the axis of the annotation-bias study: Common
//! assigns conventional labels (circle centers O, then P, Q, ...), Random
//! draws a seed-deterministic injective letter map.

use super::ast::*;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use sha2::{Digest, Sha256};
use std::collections::BTreeMap;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum RelabelError {
    #[error("scene has {points} points but only {available} letters are available")]
    OutOfLetters { points: usize, available: usize },
}

const ALPHABET: [char; 26] = [
    'A', 'B', 'C', 'D', 'E', 'F', 'G', 'H', 'I', 'J', 'K', 'L', 'M', 'N', 'O', 'P', 'Q', 'R',
    'S', 'T', 'U', 'V', 'W', 'X', 'Y', 'Z',
];

/// Letters reserved for circle centers under the Common scheme, in the
/// order additional circles receive them.
const CENTER_LETTERS: [char; 4] = ['O', 'P', 'Q', 'R'];

fn build_common_map(p: &SceneProgram) -> Result<BTreeMap<PointId, PointId>, RelabelError> {
    let points = p.point_ids();
    let centers = p.circle_centers();
    let mut map = BTreeMap::new();
    let mut used = Vec::new();

    for (i, c) in centers.iter().enumerate() {
        if i >= CENTER_LETTERS.len() {
            return Err(RelabelError::OutOfLetters { points: points.len(), available: 26 });
        }
        let letter = CENTER_LETTERS[i];
        map.insert(*c, PointId::new(letter).unwrap());
        used.push(letter);
    }

    let mut pool = ALPHABET.iter().filter(|c| !used.contains(c));
    for id in &points {
        if map.contains_key(id) {
            continue;
        }
        let letter = pool
            .next()
            .ok_or(RelabelError::OutOfLetters { points: points.len(), available: 26 })?;
        map.insert(*id, PointId::new(*letter).unwrap());
    }
    Ok(map)
}

fn build_random_map(p: &SceneProgram, seed: u64) -> Result<BTreeMap<PointId, PointId>, RelabelError> {
    let points = p.point_ids();
    if points.len() > 26 {
        return Err(RelabelError::OutOfLetters { points: points.len(), available: 26 });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut letters = ALPHABET;
    letters.shuffle(&mut rng);
    let mut map = BTreeMap::new();
    for (i, id) in points.iter().enumerate() {
        map.insert(*id, PointId::new(letters[i]).unwrap());
    }
    Ok(map)
}

fn rename_linear(l: &LinearRef, m: &BTreeMap<PointId, PointId>) -> LinearRef {
    LinearRef::new(m[&l.a], m[&l.b])
}

fn rename_circle(c: &CircleRef, m: &BTreeMap<PointId, PointId>) -> CircleRef {
    CircleRef { center: m[&c.center] }
}

fn rename_angle(a: &AngleRef, m: &BTreeMap<PointId, PointId>) -> AngleRef {
    AngleRef::new(m[&a.arm_a], m[&a.vertex], m[&a.arm_b])
}

fn rename_ctor(c: &Constructor, m: &BTreeMap<PointId, PointId>) -> Constructor {
    match c {
        Constructor::Midpoint { a, b } => Constructor::Midpoint { a: m[a], b: m[b] },
        Constructor::IntersectionLineLine { l1, l2 } => Constructor::IntersectionLineLine {
            l1: rename_linear(l1, m),
            l2: rename_linear(l2, m),
        },
        Constructor::IntersectionLineCircle { line, circle, branch } => {
            Constructor::IntersectionLineCircle {
                line: rename_linear(line, m),
                circle: rename_circle(circle, m),
                branch: *branch,
            }
        }
        Constructor::IntersectionCircleCircle { c1, c2, branch } => {
            Constructor::IntersectionCircleCircle {
                c1: rename_circle(c1, m),
                c2: rename_circle(c2, m),
                branch: *branch,
            }
        }
        Constructor::FootOfPerpendicular { from, onto } => Constructor::FootOfPerpendicular {
            from: m[from],
            onto: rename_linear(onto, m),
        },
        Constructor::TangentPoint { from, circle, branch } => Constructor::TangentPoint {
            from: m[from],
            circle: rename_circle(circle, m),
            branch: *branch,
        },
        Constructor::PointOn { element, t } => Constructor::PointOn {
            element: match element {
                OnElement::Linear { carrier } => OnElement::Linear { carrier: rename_linear(carrier, m) },
                OnElement::Circle { circle } => OnElement::Circle { circle: rename_circle(circle, m) },
            },
            t: *t,
        },
        Constructor::ExtensionPoint { seg, factor } => Constructor::ExtensionPoint {
            seg: rename_linear(seg, m),
            factor: *factor,
        },
        Constructor::CircleCenter { a, b, c } => Constructor::CircleCenter { a: m[a], b: m[b], c: m[c] },
        Constructor::Incenter { a, b, c } => Constructor::Incenter { a: m[a], b: m[b], c: m[c] },
        Constructor::Circumcenter { a, b, c } => Constructor::Circumcenter { a: m[a], b: m[b], c: m[c] },
        Constructor::Centroid { a, b, c } => Constructor::Centroid { a: m[a], b: m[b], c: m[c] },
    }
}

fn rename_constraint(c: &Constraint, m: &BTreeMap<PointId, PointId>) -> Constraint {
    match c {
        Constraint::Parallel { l1, l2 } => Constraint::Parallel {
            l1: rename_linear(l1, m),
            l2: rename_linear(l2, m),
        },
        Constraint::Perpendicular { l1, l2 } => Constraint::Perpendicular {
            l1: rename_linear(l1, m),
            l2: rename_linear(l2, m),
        },
        Constraint::Tangent { line, circle } => Constraint::Tangent {
            line: rename_linear(line, m),
            circle: rename_circle(circle, m),
        },
        Constraint::OnCircle { point, circle } => Constraint::OnCircle {
            point: m[point],
            circle: rename_circle(circle, m),
        },
        Constraint::Collinear { a, b, c } => Constraint::Collinear { a: m[a], b: m[b], c: m[c] },
        Constraint::EqualLength { s1, s2 } => Constraint::EqualLength {
            s1: rename_linear(s1, m),
            s2: rename_linear(s2, m),
        },
        Constraint::EqualAngle { a1, a2 } => Constraint::EqualAngle {
            a1: rename_angle(a1, m),
            a2: rename_angle(a2, m),
        },
        Constraint::AngleBisector { bisector, angle } => Constraint::AngleBisector {
            bisector: rename_linear(bisector, m),
            angle: rename_angle(angle, m),
        },
        Constraint::IsDiameter { seg, circle } => Constraint::IsDiameter {
            seg: rename_linear(seg, m),
            circle: rename_circle(circle, m),
        },
        Constraint::IsChord { seg, circle } => Constraint::IsChord {
            seg: rename_linear(seg, m),
            circle: rename_circle(circle, m),
        },
        Constraint::IsInscribedAngle { angle, circle } => Constraint::IsInscribedAngle {
            angle: rename_angle(angle, m),
            circle: rename_circle(circle, m),
        },
        Constraint::IsCentralAngle { angle, circle } => Constraint::IsCentralAngle {
            angle: rename_angle(angle, m),
            circle: rename_circle(circle, m),
        },
        Constraint::IsParallelogram { a, b, c, d } => Constraint::IsParallelogram {
            a: m[a],
            b: m[b],
            c: m[c],
            d: m[d],
        },
    }
}

/// Return a program isomorphic to `p` under a letter bijection.
///
/// Deterministic for a fixed `(p, scheme, seed)`; the seed is ignored by
/// the Common scheme.
pub fn relabel(p: &SceneProgram, scheme: IdentifierScheme, seed: u64) -> Result<SceneProgram, RelabelError> {
    let map = match scheme {
        IdentifierScheme::Common => build_common_map(p)?,
        IdentifierScheme::Random => build_random_map(p, seed)?,
    };
    let declarations = p
        .declarations
        .iter()
        .map(|d| Declaration {
            kind: match &d.kind {
                DeclKind::FreePoint { id } => DeclKind::FreePoint { id: map[id] },
                DeclKind::ConstructedPoint { id, ctor } => DeclKind::ConstructedPoint {
                    id: map[id],
                    ctor: rename_ctor(ctor, &map),
                },
                DeclKind::Segment { a, b } => DeclKind::Segment { a: map[a], b: map[b] },
                DeclKind::Line { a, b } => DeclKind::Line { a: map[a], b: map[b] },
                DeclKind::Ray { origin, through } => DeclKind::Ray {
                    origin: map[origin],
                    through: map[through],
                },
                DeclKind::Circle { center, through } => DeclKind::Circle {
                    center: map[center],
                    through: map[through],
                },
                DeclKind::Polygon { vertices } => DeclKind::Polygon {
                    vertices: vertices.iter().map(|v| map[v]).collect(),
                },
                DeclKind::Constraint { constraint } => DeclKind::Constraint {
                    constraint: rename_constraint(constraint, &map),
                },
                DeclKind::Annotation { text } => DeclKind::Annotation { text: text.clone() },
            },
            stage: d.stage,
            span: d.span,
        })
        .collect();
    Ok(SceneProgram { name: p.name.clone(), declarations })
}

/// Hash of the program structure with point names erased.
///
/// Every point id is replaced by its declaration index before hashing, so
/// relabeling (any scheme, any seed) leaves the hash unchanged.
pub fn structural_hash(p: &SceneProgram) -> String {
    let order: BTreeMap<PointId, usize> = p
        .point_ids()
        .into_iter()
        .enumerate()
        .map(|(i, id)| (id, i))
        .collect();
    // Point ids only appear in positions the alphabet can't reach past
    // index 25, so the index itself is a safe stand-in letter.
    let map: BTreeMap<PointId, PointId> = order
        .iter()
        .map(|(id, i)| (*id, PointId::new(ALPHABET[*i]).unwrap()))
        .collect();
    let canonical = SceneProgram {
        name: String::new(),
        declarations: p
            .declarations
            .iter()
            .map(|d| Declaration {
                kind: match &d.kind {
                    DeclKind::FreePoint { id } => DeclKind::FreePoint { id: map[id] },
                    DeclKind::ConstructedPoint { id, ctor } => DeclKind::ConstructedPoint {
                        id: map[id],
                        ctor: rename_ctor(ctor, &map),
                    },
                    DeclKind::Segment { a, b } => DeclKind::Segment { a: map[a], b: map[b] },
                    DeclKind::Line { a, b } => DeclKind::Line { a: map[a], b: map[b] },
                    DeclKind::Ray { origin, through } => DeclKind::Ray {
                        origin: map[origin],
                        through: map[through],
                    },
                    DeclKind::Circle { center, through } => DeclKind::Circle {
                        center: map[center],
                        through: map[through],
                    },
                    DeclKind::Polygon { vertices } => DeclKind::Polygon {
                        vertices: vertices.iter().map(|v| map[v]).collect(),
                    },
                    DeclKind::Constraint { constraint } => DeclKind::Constraint {
                        constraint: rename_constraint(constraint, &map),
                    },
                    DeclKind::Annotation { text } => DeclKind::Annotation { text: text.clone() },
                },
                stage: d.stage,
                span: Span::default(),
            })
            .collect(),
    };
    let text = super::print::print_program(&canonical);
    let mut hasher = Sha256::new();
    hasher.update(text.as_bytes());
    hex::encode(hasher.finalize())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scene::parse::parse_program;

    fn circle_template() -> SceneProgram {
        parse_program(
            "circle",
            "point C; point D; circle C D; point P; point T = tangent_point(P, C, 0); segment P T; constraint tangent(PT, C)",
        )
        .unwrap()
    }

    #[test]
    fn common_scheme_names_center_o() {
        let p = circle_template();
        let relabeled = relabel(&p, IdentifierScheme::Common, 0).unwrap();
        assert_eq!(relabeled.circle_centers(), vec![PointId::new('O').unwrap()]);
    }

    #[test]
    fn random_scheme_is_deterministic() {
        let p = circle_template();
        let a = relabel(&p, IdentifierScheme::Random, 7).unwrap();
        let b = relabel(&p, IdentifierScheme::Random, 7).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn different_seeds_are_isomorphic() {
        let p = circle_template();
        let a = relabel(&p, IdentifierScheme::Random, 1).unwrap();
        let b = relabel(&p, IdentifierScheme::Random, 2).unwrap();
        assert_ne!(a, b, "two seeds should differ in letters");
        assert_eq!(structural_hash(&a), structural_hash(&b));
        assert_eq!(structural_hash(&a), structural_hash(&p));
    }

    #[test]
    fn relabel_preserves_structural_hash_for_all_schemes() {
        let p = circle_template();
        for seed in 0..8 {
            let r = relabel(&p, IdentifierScheme::Random, seed).unwrap();
            assert_eq!(structural_hash(&p), structural_hash(&r));
        }
        let c = relabel(&p, IdentifierScheme::Common, 0).unwrap();
        assert_eq!(structural_hash(&p), structural_hash(&c));
    }
}
