//! Solved scenes: concrete coordinates plus the realized element registry.

use super::lower::Structure;
use super::vec2::Vec2;
use crate::scene::{DeclKind, IdentifierScheme, PointId, SceneProgram};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LinearKind {
    Segment,
    Line,
    Ray,
}

/// A realized segment, line, or ray with derived parameters.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LinearElement {
    pub kind: LinearKind,
    pub a: PointId,
    pub b: PointId,
    /// Unit direction from a to b.
    pub direction: Vec2,
    /// Distance between the defining points.
    pub length: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CircleElement {
    pub center: PointId,
    pub through: PointId,
    pub radius: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PolygonElement {
    pub vertices: Vec<PointId>,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct ElementRegistry {
    pub linear: Vec<LinearElement>,
    pub circles: Vec<CircleElement>,
    pub polygons: Vec<PolygonElement>,
}

impl ElementRegistry {
    pub fn build(program: &SceneProgram, pos: &BTreeMap<PointId, Vec2>) -> Self {
        let mut reg = ElementRegistry::default();
        for d in &program.declarations {
            match &d.kind {
                DeclKind::Segment { a, b } => reg.push_linear(LinearKind::Segment, *a, *b, pos),
                DeclKind::Line { a, b } => reg.push_linear(LinearKind::Line, *a, *b, pos),
                DeclKind::Ray { origin, through } => {
                    reg.push_linear(LinearKind::Ray, *origin, *through, pos)
                }
                DeclKind::Circle { center, through } => reg.circles.push(CircleElement {
                    center: *center,
                    through: *through,
                    radius: pos[center].dist(pos[through]),
                }),
                DeclKind::Polygon { vertices } => {
                    reg.polygons.push(PolygonElement { vertices: vertices.clone() })
                }
                _ => {}
            }
        }
        reg
    }

    fn push_linear(
        &mut self,
        kind: LinearKind,
        a: PointId,
        b: PointId,
        pos: &BTreeMap<PointId, Vec2>,
    ) {
        let d = pos[&b] - pos[&a];
        let length = d.norm();
        self.linear.push(LinearElement { kind, a, b, direction: d / length, length });
    }

    /// Linear element whose endpoint pair matches, in either order.
    pub fn find_linear(&self, a: PointId, b: PointId) -> Option<&LinearElement> {
        self.linear
            .iter()
            .find(|l| (l.a == a && l.b == b) || (l.a == b && l.b == a))
    }

    pub fn find_circle(&self, center: PointId) -> Option<&CircleElement> {
        self.circles.iter().find(|c| c.center == center)
    }
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct SolverDiagnostics {
    pub restarts_used: u32,
    pub final_residual: f64,
    pub converged: bool,
}

/// A solved instantiation of a scene program.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ConcreteScene {
    pub program: SceneProgram,
    pub coords: BTreeMap<PointId, Vec2>,
    pub elements: ElementRegistry,
    pub solver: SolverDiagnostics,
    pub scheme: IdentifierScheme,
    pub seed: u64,
    /// Canvas size in abstract units; all tolerances are stated in these.
    pub canvas: (f64, f64),
}

impl ConcreteScene {
    /// Assemble a scene from explicit coordinates, deriving the element
    /// registry. Constructed points absent from `coords` are computed from
    /// their constructors; explicitly provided coordinates win. Used by
    /// tests and tools that bypass the solver.
    pub fn from_parts(
        program: SceneProgram,
        coords: BTreeMap<PointId, Vec2>,
        scheme: IdentifierScheme,
        seed: u64,
        canvas: (f64, f64),
    ) -> Self {
        let structure = Structure::build(&program);
        let mut pts: Vec<Vec2> = structure
            .order
            .iter()
            .map(|id| coords.get(id).copied().unwrap_or(Vec2::ZERO))
            .collect();
        let _ = structure.eval_chain(&mut pts);
        let mut full: BTreeMap<PointId, Vec2> = structure
            .order
            .iter()
            .enumerate()
            .map(|(i, id)| (*id, pts[i]))
            .collect();
        for (id, p) in &coords {
            full.insert(*id, *p);
        }
        let coords = full;
        let elements = ElementRegistry::build(&program, &coords);
        let residual = residual_of(&program, &coords);
        ConcreteScene {
            program,
            coords,
            elements,
            solver: SolverDiagnostics { restarts_used: 0, final_residual: residual, converged: false },
            scheme,
            seed,
            canvas,
        }
    }

    pub fn pos(&self, id: PointId) -> Vec2 {
        self.coords[&id]
    }

    /// Sum of squared constraint residuals at the scene's coordinates.
    pub fn residual(&self) -> f64 {
        residual_of(&self.program, &self.coords)
    }
}

/// Sum of squared residuals of a program at the given coordinates.
pub fn residual_of(program: &SceneProgram, coords: &BTreeMap<PointId, Vec2>) -> f64 {
    let s = Structure::build(program);
    let pts: Vec<Vec2> = s.order.iter().map(|id| coords[id]).collect();
    s.residuals.iter().map(|r| r.eval(&pts)).map(|v| v * v).sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scene::parse_program;

    #[test]
    fn zero_constraints_zero_residual() {
        let p = parse_program("t", "point A; point B; point M = midpoint(A,B); segment A B").unwrap();
        let mut coords = BTreeMap::new();
        coords.insert(PointId::new('A').unwrap(), Vec2::new(0.0, 0.0));
        coords.insert(PointId::new('B').unwrap(), Vec2::new(2.0, 0.0));
        coords.insert(PointId::new('M').unwrap(), Vec2::new(1.0, 0.0));
        let s = ConcreteScene::from_parts(p, coords, IdentifierScheme::Common, 0, (512.0, 512.0));
        assert_eq!(s.residual(), 0.0);
    }

    #[test]
    fn tangent_residual_contribution() {
        // Unit circle centered at O=(0,0) through B=(1,0); tangent reference
        // is the vertical line x=1.1 through P, Q.
        let p = parse_program(
            "t",
            "point O; point B; circle O B; point P; point Q; line P Q; constraint tangent(PQ, O)",
        )
        .unwrap();
        let mut coords = BTreeMap::new();
        let at = |c: char| PointId::new(c).unwrap();
        coords.insert(at('O'), Vec2::new(0.0, 0.0));
        coords.insert(at('B'), Vec2::new(1.0, 0.0));
        coords.insert(at('P'), Vec2::new(1.1, -1.0));
        coords.insert(at('Q'), Vec2::new(1.1, 1.0));
        let s = ConcreteScene::from_parts(p, coords, IdentifierScheme::Common, 0, (512.0, 512.0));
        assert!((s.residual() - 0.01).abs() < 1e-12);
    }
}
