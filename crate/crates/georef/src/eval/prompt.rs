//! Prompt assembly: few-shot exemplars plus the target question.

use super::adapter::{DecodingHint, HistoryTurn, ModelRequest, ShotDoc};
use crate::qa::QAItem;
use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;
use std::path::Path;
use thiserror::Error;

/// Instruction used for answer generation.
pub const GENERATOR_SYSTEM: &str = "You are looking at a geometry diagram. Answer the question by naming the geometric element it refers to, using the letters in the figure (for example: AD, angle ABF, or O). Give the answer directly, ending your reply with a line of the form 'Answer: <element>'.";

/// Instruction for the verifier in verify-and-regenerate mode.
pub const VERIFIER_SYSTEM: &str = "You are verifying an answer to a geometry question about the given diagram. Reason about whether the proposed answer refers to the correct element, then reply with <reasoning>...</reasoning> followed by <judgment>correct</judgment> or <judgment>incorrect</judgment>.";

/// Instruction for the verifier in generation-from-verifier mode.
pub const FROM_VERIFIER_SYSTEM: &str = "You are reviewing an answer to a geometry question about the given diagram. If the proposed answer is wrong, provide the corrected answer; if it is right, repeat it. Reply with <new_answer>...</new_answer>.";

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Exemplar {
    pub id: String,
    pub question: String,
    pub image: String,
    pub answer: String,
}

#[derive(Debug, Clone)]
pub struct Prompt {
    pub system: String,
    pub shots: Vec<Exemplar>,
    pub question: String,
    pub image: String,
    pub history: Vec<(String, String)>,
}

#[derive(Debug, Error)]
pub enum PromptError {
    #[error("exemplar file i/o: {0}")]
    Io(#[from] std::io::Error),
    #[error("exemplar file line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("exemplar file has {have} exemplars, need {need}")]
    MissingExemplars { have: usize, need: usize },
    #[error("exemplar id {0} overlaps the dataset")]
    OverlapsDataset(String),
}

/// Bundled default exemplars (3-shot).
pub fn default_shots() -> Vec<Exemplar> {
    parse_shots(include_str!("../../shots/default_shots.jsonl")).expect("bundled shots parse")
}

pub fn load_shots(path: &Path) -> Result<Vec<Exemplar>, PromptError> {
    parse_shots(&std::fs::read_to_string(path)?)
}

fn parse_shots(text: &str) -> Result<Vec<Exemplar>, PromptError> {
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let ex: Exemplar = serde_json::from_str(line)
            .map_err(|e| PromptError::Parse { line: i + 1, message: e.to_string() })?;
        out.push(ex);
    }
    Ok(out)
}

/// Build the generation prompt for one item: `shots_count` worked examples
/// followed by the target question. Exemplars must be disjoint from the
/// dataset by id.
pub fn build_prompt(
    item: &QAItem,
    shots: &[Exemplar],
    shots_count: usize,
    dataset_ids: &BTreeSet<String>,
) -> Result<Prompt, PromptError> {
    if shots.len() < shots_count {
        return Err(PromptError::MissingExemplars { have: shots.len(), need: shots_count });
    }
    for ex in &shots[..shots_count] {
        if dataset_ids.contains(&ex.id) {
            return Err(PromptError::OverlapsDataset(ex.id.clone()));
        }
    }
    Ok(Prompt {
        system: GENERATOR_SYSTEM.to_string(),
        shots: shots[..shots_count].to_vec(),
        question: item.question.clone(),
        image: item.image.clone(),
        history: Vec::new(),
    })
}

/// Lower a prompt to the wire document.
pub fn prompt_to_request(p: &Prompt, id: &str, image_path: String, image_svg: Option<String>) -> ModelRequest {
    ModelRequest {
        id: id.to_string(),
        question: p.question.clone(),
        image_path,
        image_svg,
        system: p.system.clone(),
        shots: p
            .shots
            .iter()
            .map(|s| ShotDoc {
                question: s.question.clone(),
                image_path: s.image.clone(),
                answer: s.answer.clone(),
            })
            .collect(),
        history: p
            .history
            .iter()
            .map(|(role, content)| HistoryTurn { role: role.clone(), content: content.clone() })
            .collect(),
        decoding_hint: DecodingHint::default(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::tests_support::tiny_item;

    #[test]
    fn three_shot_prompt() {
        let shots = default_shots();
        assert!(shots.len() >= 3);
        let item = tiny_item("x-1");
        let p = build_prompt(&item, &shots, 3, &BTreeSet::new()).unwrap();
        assert_eq!(p.shots.len(), 3);
        assert_eq!(p.question, item.question);
    }

    #[test]
    fn zero_shot_prompt() {
        let item = tiny_item("x-1");
        let p = build_prompt(&item, &default_shots(), 0, &BTreeSet::new()).unwrap();
        assert!(p.shots.is_empty());
    }

    #[test]
    fn overlapping_exemplar_is_an_error() {
        let shots = default_shots();
        let item = tiny_item("x-1");
        let ids: BTreeSet<String> = [shots[0].id.clone()].into();
        assert!(matches!(
            build_prompt(&item, &shots, 3, &ids),
            Err(PromptError::OverlapsDataset(_))
        ));
    }
}
