//! Geometric referring-expression comprehension, end to end: compile a
//! declarative scene language into constraint-solved labeled diagrams,
//! derive machine-verified semantic facts, generate open-ended questions
//! with equivalence-closed answer sets, and evaluate answer-producing
//! models under a binary reward with an optional verify-and-regenerate
//! loop.
//!
//! Start with the runnable examples:
//!
//! ```bash
//! cargo run --example parse_and_validate
//! cargo run --example solve_scene
//! cargo run --example derive_facts
//! cargo run --example render_svg
//! cargo run --example generate_questions
//! cargo run --example dataset_pipeline
//! cargo run --example evaluate_with_mocks
//! cargo run --example verify_and_regenerate
//! cargo run --example bias_splits
//! cargo run --example reward_scoring
//! ```
//!
//! The same capabilities are exposed as subcommands of the `georef`
//! binary; see the README.

pub mod cli;
pub mod dataset;
pub mod eval;
pub mod facts;
pub mod geom;
pub mod qa;
pub mod render;
pub mod scene;
pub mod util;
