//! Fact vocabulary: the three question categories and every fact kind,
//! with references to the scene elements a fact talks about.

use crate::geom::LinearKind;
use crate::scene::PointId;
use serde::{Deserialize, Serialize};
use std::fmt;

/// The three question categories.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Category {
    Position,
    Shape,
    Relationship,
}

impl fmt::Display for Category {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Category::Position => write!(f, "Position"),
            Category::Shape => write!(f, "Shape"),
            Category::Relationship => write!(f, "Relationship"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum FactKind {
    // Position: key points.
    IntersectionPoint,
    TangencyPoint,
    Midpoint,
    CircleCenter,
    FootOfPerpendicular,
    PointOnExtension,
    Incenter,
    Circumcenter,
    Centroid,
    // Shape: element roles.
    TangentLine,
    Secant,
    Chord,
    Diameter,
    Radius,
    InscribedAngle,
    CentralAngle,
    Triangle,
    Parallelogram,
    PerpendicularBisector,
    AngleBisector,
    // Relationship: relations between elements.
    ParallelPair,
    PerpendicularPair,
    EqualAngles,
    EqualSegments,
    VerticalAngles,
    AlternateInteriorAngles,
    CorrespondingAngles,
    CoInteriorAngles,
    CollinearTriple,
    AngleBisects,
}

/// Total classification of fact kinds into categories.
pub fn classify_fact(kind: FactKind) -> Category {
    use FactKind::*;
    match kind {
        IntersectionPoint | TangencyPoint | Midpoint | CircleCenter | FootOfPerpendicular
        | PointOnExtension | Incenter | Circumcenter | Centroid => Category::Position,
        TangentLine | Secant | Chord | Diameter | Radius | InscribedAngle | CentralAngle
        | Triangle | Parallelogram | PerpendicularBisector | AngleBisector => Category::Shape,
        ParallelPair | PerpendicularPair | EqualAngles | EqualSegments | VerticalAngles
        | AlternateInteriorAngles | CorrespondingAngles | CoInteriorAngles | CollinearTriple
        | AngleBisects => Category::Relationship,
    }
}

impl FactKind {
    pub const ALL: [FactKind; 30] = [
        FactKind::IntersectionPoint,
        FactKind::TangencyPoint,
        FactKind::Midpoint,
        FactKind::CircleCenter,
        FactKind::FootOfPerpendicular,
        FactKind::PointOnExtension,
        FactKind::Incenter,
        FactKind::Circumcenter,
        FactKind::Centroid,
        FactKind::TangentLine,
        FactKind::Secant,
        FactKind::Chord,
        FactKind::Diameter,
        FactKind::Radius,
        FactKind::InscribedAngle,
        FactKind::CentralAngle,
        FactKind::Triangle,
        FactKind::Parallelogram,
        FactKind::PerpendicularBisector,
        FactKind::AngleBisector,
        FactKind::ParallelPair,
        FactKind::PerpendicularPair,
        FactKind::EqualAngles,
        FactKind::EqualSegments,
        FactKind::VerticalAngles,
        FactKind::AlternateInteriorAngles,
        FactKind::CorrespondingAngles,
        FactKind::CoInteriorAngles,
        FactKind::CollinearTriple,
        FactKind::AngleBisects,
    ];
}

/// Reference to one scene element, as it appears in facts and answers.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum ElementRef {
    Point { id: PointId },
    Linear { kind: LinearKind, a: PointId, b: PointId },
    Circle { center: PointId },
    Angle { a: PointId, vertex: PointId, b: PointId },
    Polygon { vertices: Vec<PointId> },
}

impl ElementRef {
    pub fn point(id: PointId) -> Self {
        ElementRef::Point { id }
    }

    pub fn segment(a: PointId, b: PointId) -> Self {
        ElementRef::Linear { kind: LinearKind::Segment, a, b }
    }

    /// Angle with the outer letters in canonical (sorted) order.
    pub fn angle(a: PointId, vertex: PointId, b: PointId) -> Self {
        if a <= b {
            ElementRef::Angle { a, vertex, b }
        } else {
            ElementRef::Angle { a: b, vertex, b: a }
        }
    }

    /// Bare letter form: "A", "AB", "ABC", "ABCD".
    pub fn letters(&self) -> String {
        match self {
            ElementRef::Point { id } => id.to_string(),
            ElementRef::Linear { a, b, .. } => format!("{a}{b}"),
            ElementRef::Circle { center } => center.to_string(),
            ElementRef::Angle { a, vertex, b } => format!("{a}{vertex}{b}"),
            ElementRef::Polygon { vertices } => {
                vertices.iter().map(|v| v.to_string()).collect()
            }
        }
    }

    /// English phrase with the element's type word, e.g. "segment AB".
    pub fn phrase(&self) -> String {
        match self {
            ElementRef::Point { id } => format!("point {id}"),
            ElementRef::Linear { kind, a, b } => match kind {
                LinearKind::Segment => format!("segment {a}{b}"),
                LinearKind::Line => format!("line {a}{b}"),
                LinearKind::Ray => format!("ray {a}{b}"),
            },
            ElementRef::Circle { center } => format!("circle {center}"),
            ElementRef::Angle { a, vertex, b } => format!("angle {a}{vertex}{b}"),
            ElementRef::Polygon { vertices } => {
                let letters: String = vertices.iter().map(|v| v.to_string()).collect();
                if vertices.len() == 3 {
                    format!("triangle {letters}")
                } else {
                    format!("quadrilateral {letters}")
                }
            }
        }
    }
}

impl fmt::Display for ElementRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.letters())
    }
}

/// Whether a fact came from the symbolic structure, numeric discovery, or
/// both. Emitted facts are always numerically confirmed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Derivation {
    Symbolic,
    Numeric,
    Both,
}

/// One verified semantic statement about a scene.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Fact {
    pub category: Category,
    pub kind: FactKind,
    /// Ordered element references; the first is the answer target for
    /// symmetric relations.
    pub subjects: Vec<ElementRef>,
    /// The element a question about this fact should elicit.
    pub answer_target: ElementRef,
    /// Numeric evidence: the verifying residual magnitude.
    pub witness: f64,
    pub derivation: Derivation,
}

impl Fact {
    /// Key used for the canonical (category, kind, subjects) ordering.
    pub fn sort_key(&self) -> (Category, FactKind, Vec<ElementRef>) {
        (self.category, self.kind, self.subjects.clone())
    }

    /// Subjects other than the answer target: what a question mentions.
    pub fn mentioned(&self) -> Vec<&ElementRef> {
        self.subjects.iter().filter(|s| **s != self.answer_target).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn classification_is_total_and_stable() {
        for k in FactKind::ALL {
            let c1 = classify_fact(k);
            let c2 = classify_fact(k);
            assert_eq!(c1, c2);
        }
        assert_eq!(FactKind::ALL.len(), 30);
    }

    #[test]
    fn paper_anchored_classifications() {
        assert_eq!(classify_fact(FactKind::TangencyPoint), Category::Position);
        assert_eq!(classify_fact(FactKind::TangentLine), Category::Shape);
        assert_eq!(classify_fact(FactKind::AlternateInteriorAngles), Category::Relationship);
    }
}
