//! Question generation: deterministic phrasing templates over facts, with
//! equivalence-closed answer sets and the matching rules used to score
//! predictions.

mod answers;
mod catalog;
mod generate;

pub use answers::{
    answers_match, build_answer_set, extract_entities, normalize_answer, AnswerError, AnswerSet,
};
pub use catalog::{inner_phrase, CatalogError, QuestionCatalog, QuestionTemplate};
pub use generate::{compose_two_step, generate_qa, QAConfig, QAItem};
