//! Geometry kernel: constructors, residuals with analytic gradients, the
//! randomized least-squares layout solver, quality predicates, and the
//! numeric predicate oracle.

pub mod constructors;
mod lower;
pub mod predicates;
mod quality;
pub mod residuals;
mod scene;
mod solver;
pub mod vec2;

pub use lower::Structure;
pub use predicates::{numeric_predicate, ElementArg, PredicateError, PredicateKind};
pub use quality::{quality_check, QualityConfig};
pub use scene::{
    residual_of, CircleElement, ConcreteScene, ElementRegistry, LinearElement, LinearKind,
    PolygonElement, SolverDiagnostics,
};
pub use solver::{instantiate, SolveError, SolverConfig};
pub use vec2::{angle_at, Vec2};
