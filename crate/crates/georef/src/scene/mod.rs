//! The declarative scene language: AST, parser, printer, validation, and
//! identifier relabeling.

mod ast;
mod parse;
mod print;
mod relabel;
mod validate;

pub use ast::{
    AngleRef, CircleRef, Constraint, Constructor, DeclKind, Declaration, IdentifierScheme,
    LinearRef, OnElement, PointId, SceneProgram, Span,
};
pub use parse::{parse_program, ParseError};
pub use print::print_program;
pub use relabel::{relabel, structural_hash, RelabelError};
pub use validate::{validate_program, Issue, Severity, ValidationReport};
