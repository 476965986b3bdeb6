//! Symbolic AST for the declarative scene language.
//!
//! A program is an ordered list of declarations: free and constructed
//! points, drawable elements (segments, lines, rays, circles, polygons),
//! constraints, and annotations. Point identifiers are single uppercase
//! Latin letters, unique within a program.

use serde::{Deserialize, Serialize};
use std::fmt;

/// A point identifier: one uppercase Latin letter.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PointId(char);

impl PointId {
    pub fn new(c: char) -> Option<Self> {
        c.is_ascii_uppercase().then_some(Self(c))
    }

    pub fn ch(&self) -> char {
        self.0
    }
}

impl fmt::Display for PointId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl fmt::Debug for PointId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl Serialize for PointId {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_char(self.0)
    }
}

impl<'de> Deserialize<'de> for PointId {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let c = char::deserialize(d)?;
        PointId::new(c).ok_or_else(|| serde::de::Error::custom("point id must be A-Z"))
    }
}

/// Source location of a declaration, for diagnostics.
#[derive(Debug, Clone, Copy, Default, Serialize, Deserialize)]
pub struct Span {
    pub line: u32,
    pub column: u32,
}

/// Reference to a linear carrier (segment, line, or ray) by its two
/// defining points, written `AB` in the concrete syntax.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct LinearRef {
    pub a: PointId,
    pub b: PointId,
}

impl LinearRef {
    pub fn new(a: PointId, b: PointId) -> Self {
        Self { a, b }
    }

    /// Endpoint pair with the letters sorted, used as an order-insensitive key.
    pub fn key(&self) -> (PointId, PointId) {
        if self.a <= self.b {
            (self.a, self.b)
        } else {
            (self.b, self.a)
        }
    }
}

impl fmt::Display for LinearRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.a, self.b)
    }
}

/// Reference to a circle by its center point, written as the bare center
/// letter where a circle is expected.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CircleRef {
    pub center: PointId,
}

impl fmt::Display for CircleRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.center)
    }
}

/// An angle named by three points with the vertex in the middle, written `ABC`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct AngleRef {
    pub arm_a: PointId,
    pub vertex: PointId,
    pub arm_b: PointId,
}

impl AngleRef {
    pub fn new(arm_a: PointId, vertex: PointId, arm_b: PointId) -> Self {
        Self { arm_a, vertex, arm_b }
    }

    /// Vertex fixed, outer letters sorted: the canonical form used for keys.
    pub fn canonical(&self) -> Self {
        if self.arm_a <= self.arm_b {
            *self
        } else {
            Self::new(self.arm_b, self.vertex, self.arm_a)
        }
    }
}

impl fmt::Display for AngleRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}{}", self.arm_a, self.vertex, self.arm_b)
    }
}

/// Target of a `point_on` construction: a segment-like carrier or a circle.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "on", rename_all = "snake_case")]
pub enum OnElement {
    Linear { carrier: LinearRef },
    Circle { circle: CircleRef },
}

/// How a constructed point is computed from earlier declarations.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "ctor", rename_all = "snake_case")]
pub enum Constructor {
    Midpoint { a: PointId, b: PointId },
    IntersectionLineLine { l1: LinearRef, l2: LinearRef },
    IntersectionLineCircle { line: LinearRef, circle: CircleRef, branch: u8 },
    IntersectionCircleCircle { c1: CircleRef, c2: CircleRef, branch: u8 },
    FootOfPerpendicular { from: PointId, onto: LinearRef },
    TangentPoint { from: PointId, circle: CircleRef, branch: u8 },
    PointOn { element: OnElement, t: f64 },
    ExtensionPoint { seg: LinearRef, factor: f64 },
    CircleCenter { a: PointId, b: PointId, c: PointId },
    Incenter { a: PointId, b: PointId, c: PointId },
    Circumcenter { a: PointId, b: PointId, c: PointId },
    Centroid { a: PointId, b: PointId, c: PointId },
}

impl Constructor {
    pub fn name(&self) -> &'static str {
        match self {
            Constructor::Midpoint { .. } => "midpoint",
            Constructor::IntersectionLineLine { .. } => "intersection_line_line",
            Constructor::IntersectionLineCircle { .. } => "intersection_line_circle",
            Constructor::IntersectionCircleCircle { .. } => "intersection_circle_circle",
            Constructor::FootOfPerpendicular { .. } => "foot_of_perpendicular",
            Constructor::TangentPoint { .. } => "tangent_point",
            Constructor::PointOn { .. } => "point_on",
            Constructor::ExtensionPoint { .. } => "extension_point",
            Constructor::CircleCenter { .. } => "circle_center",
            Constructor::Incenter { .. } => "incenter",
            Constructor::Circumcenter { .. } => "circumcenter",
            Constructor::Centroid { .. } => "centroid",
        }
    }

    /// Branch selector, for the two-solution constructors.
    pub fn branch(&self) -> Option<u8> {
        match self {
            Constructor::IntersectionLineCircle { branch, .. }
            | Constructor::IntersectionCircleCircle { branch, .. }
            | Constructor::TangentPoint { branch, .. } => Some(*branch),
            _ => None,
        }
    }
}

/// A declared relation between elements, enforced by the layout solver.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Constraint {
    Parallel { l1: LinearRef, l2: LinearRef },
    Perpendicular { l1: LinearRef, l2: LinearRef },
    Tangent { line: LinearRef, circle: CircleRef },
    OnCircle { point: PointId, circle: CircleRef },
    Collinear { a: PointId, b: PointId, c: PointId },
    EqualLength { s1: LinearRef, s2: LinearRef },
    EqualAngle { a1: AngleRef, a2: AngleRef },
    AngleBisector { bisector: LinearRef, angle: AngleRef },
    IsDiameter { seg: LinearRef, circle: CircleRef },
    IsChord { seg: LinearRef, circle: CircleRef },
    IsInscribedAngle { angle: AngleRef, circle: CircleRef },
    IsCentralAngle { angle: AngleRef, circle: CircleRef },
    IsParallelogram { a: PointId, b: PointId, c: PointId, d: PointId },
}

impl Constraint {
    pub fn name(&self) -> &'static str {
        match self {
            Constraint::Parallel { .. } => "parallel",
            Constraint::Perpendicular { .. } => "perpendicular",
            Constraint::Tangent { .. } => "tangent",
            Constraint::OnCircle { .. } => "on_circle",
            Constraint::Collinear { .. } => "collinear",
            Constraint::EqualLength { .. } => "equal_length",
            Constraint::EqualAngle { .. } => "equal_angle",
            Constraint::AngleBisector { .. } => "angle_bisector",
            Constraint::IsDiameter { .. } => "is_diameter",
            Constraint::IsChord { .. } => "is_chord",
            Constraint::IsInscribedAngle { .. } => "is_inscribed_angle",
            Constraint::IsCentralAngle { .. } => "is_central_angle",
            Constraint::IsParallelogram { .. } => "is_parallelogram",
        }
    }
}

/// One declaration in a scene program.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "decl", rename_all = "snake_case")]
pub enum DeclKind {
    FreePoint { id: PointId },
    ConstructedPoint { id: PointId, ctor: Constructor },
    Segment { a: PointId, b: PointId },
    Line { a: PointId, b: PointId },
    Ray { origin: PointId, through: PointId },
    Circle { center: PointId, through: PointId },
    Polygon { vertices: Vec<PointId> },
    Constraint { constraint: Constraint },
    Annotation { text: String },
}

impl DeclKind {
    /// Point declared by this declaration, if any.
    pub fn declared_point(&self) -> Option<PointId> {
        match self {
            DeclKind::FreePoint { id } | DeclKind::ConstructedPoint { id, .. } => Some(*id),
            _ => None,
        }
    }

    /// True for declarations that count as drawable geometric elements.
    pub fn is_element(&self) -> bool {
        !matches!(self, DeclKind::Constraint { .. } | DeclKind::Annotation { .. })
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Declaration {
    pub kind: DeclKind,
    /// Synthesis stage that introduced this declaration (1 or 2). Metadata
    /// only: both stages are solved jointly.
    pub stage: u8,
    pub span: Span,
}

impl PartialEq for Declaration {
    // Spans carry no meaning; two declarations are equal when their
    // structure and stage agree.
    fn eq(&self, other: &Self) -> bool {
        self.kind == other.kind && self.stage == other.stage
    }
}

/// A parsed scene program. Declaration order equals source order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SceneProgram {
    pub name: String,
    pub declarations: Vec<Declaration>,
}

impl SceneProgram {
    /// All declared point ids, in declaration order.
    pub fn point_ids(&self) -> Vec<PointId> {
        self.declarations
            .iter()
            .filter_map(|d| d.kind.declared_point())
            .collect()
    }

    /// Centers of declared circles, in declaration order.
    pub fn circle_centers(&self) -> Vec<PointId> {
        self.declarations
            .iter()
            .filter_map(|d| match d.kind {
                DeclKind::Circle { center, .. } => Some(center),
                _ => None,
            })
            .collect()
    }

    pub fn constraints(&self) -> impl Iterator<Item = &Constraint> {
        self.declarations.iter().filter_map(|d| match &d.kind {
            DeclKind::Constraint { constraint } => Some(constraint),
            _ => None,
        })
    }
}

/// Identifier scheme under which a scene was labeled.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum IdentifierScheme {
    /// Conventional labels: circle centers O (then P, Q, ...), remaining
    /// points alphabetical by declaration order.
    Common,
    /// Seed-drawn injective map from the uppercase alphabet.
    Random,
}

impl fmt::Display for IdentifierScheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            IdentifierScheme::Common => write!(f, "common"),
            IdentifierScheme::Random => write!(f, "random"),
        }
    }
}
