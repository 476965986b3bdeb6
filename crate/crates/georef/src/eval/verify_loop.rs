//! The verify-and-regenerate loop and its generation-from-verifier
//! ablation.
//!
//! Verify-and-regenerate: the generator answers, a verifier judges the
//! image-question-answer triplet with reasoning and a binary judgment,
//! and the generator then regenerates conditioned on the full dialogue
//! history. Regeneration happens regardless of the judgment unless
//! configured otherwise. Generation-from-verifier instead asks the
//! verifier to supply the corrected answer directly in `<new_answer>`
//! tags, falling back to the initial answer when the tags are absent.

use super::adapter::{AdapterError, AnswerModel, ModelRequest};
use super::prompt::{Prompt, FROM_VERIFIER_SYSTEM, VERIFIER_SYSTEM};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Judgment {
    Correct,
    Incorrect,
    Unparseable,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct VerifyTrace {
    pub initial_answer: String,
    pub verifier_reasoning: String,
    pub verifier_judgment: Judgment,
    pub final_answer: String,
    pub mode: String,
}

/// First `<tag>...</tag>` span in `text`.
pub fn tag_content<'a>(text: &'a str, tag: &str) -> Option<&'a str> {
    let open = format!("<{tag}>");
    let close = format!("</{tag}>");
    let start = text.find(&open)? + open.len();
    let end = text[start..].find(&close)? + start;
    Some(&text[start..end])
}

fn parse_judgment(text: &str) -> (Judgment, String) {
    let reasoning = tag_content(text, "reasoning").unwrap_or(text).trim().to_string();
    match tag_content(text, "judgment").map(|j| j.trim().to_lowercase()) {
        Some(j) if j == "correct" => (Judgment::Correct, reasoning),
        Some(j) if j == "incorrect" => (Judgment::Incorrect, reasoning),
        _ => (Judgment::Unparseable, reasoning),
    }
}

fn with(req: &ModelRequest, system: &str, history: Vec<(&str, String)>, question: &str) -> ModelRequest {
    let mut out = req.clone();
    out.system = system.to_string();
    out.question = question.to_string();
    out.history = history
        .into_iter()
        .map(|(role, content)| super::adapter::HistoryTurn { role: role.into(), content })
        .collect();
    out
}

/// Run the three-call verify-and-regenerate chain for one item. When
/// `initial` is provided the first generator call is skipped and the loop
/// refines the given answer instead (used to re-run recorded answers).
pub fn verify_and_regenerate_from(
    initial: Option<String>,
    base_prompt: &Prompt,
    request: &ModelRequest,
    generator: &dyn AnswerModel,
    verifier: &dyn AnswerModel,
    skip_when_verified_correct: bool,
) -> Result<VerifyTrace, AdapterError> {
    let initial_answer = match initial {
        Some(a) => a,
        None => generator.answer(request)?,
    };

    let verify_req = with(
        request,
        VERIFIER_SYSTEM,
        vec![("user", base_prompt.question.clone()), ("assistant", initial_answer.clone())],
        "Is the proposed answer correct?",
    );
    let verdict_text = verifier.answer(&verify_req)?;
    let (verifier_judgment, verifier_reasoning) = parse_judgment(&verdict_text);

    if skip_when_verified_correct && verifier_judgment == Judgment::Correct {
        return Ok(VerifyTrace {
            initial_answer: initial_answer.clone(),
            verifier_reasoning,
            verifier_judgment,
            final_answer: initial_answer,
            mode: "regenerate".into(),
        });
    }

    let regen_req = with(
        request,
        &request.system,
        vec![
            ("user", base_prompt.question.clone()),
            ("assistant", initial_answer.clone()),
            (
                "user",
                format!(
                    "A verifier reviewed that answer and said: {verdict_text}\nGive your final answer to the original question."
                ),
            ),
        ],
        &base_prompt.question,
    );
    let final_answer = generator.answer(&regen_req)?;

    Ok(VerifyTrace {
        initial_answer,
        verifier_reasoning,
        verifier_judgment,
        final_answer,
        mode: "regenerate".into(),
    })
}

/// Two-call ablation: the verifier supplies the corrected answer itself.
pub fn generation_from_verifier_from(
    initial: Option<String>,
    base_prompt: &Prompt,
    request: &ModelRequest,
    generator: &dyn AnswerModel,
    verifier: &dyn AnswerModel,
) -> Result<VerifyTrace, AdapterError> {
    let initial_answer = match initial {
        Some(a) => a,
        None => generator.answer(request)?,
    };
    let verify_req = with(
        request,
        FROM_VERIFIER_SYSTEM,
        vec![("user", base_prompt.question.clone()), ("assistant", initial_answer.clone())],
        "Review the proposed answer and reply with <new_answer>...</new_answer>.",
    );
    let text = verifier.answer(&verify_req)?;
    let (final_answer, judgment) = match tag_content(&text, "new_answer") {
        Some(a) => (a.trim().to_string(), Judgment::Correct),
        None => (initial_answer.clone(), Judgment::Unparseable),
    };
    Ok(VerifyTrace {
        initial_answer,
        verifier_reasoning: text.trim().to_string(),
        verifier_judgment: judgment,
        final_answer,
        mode: "from_verifier".into(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tag_parsing() {
        let (j, r) = parse_judgment("<reasoning>looks wrong</reasoning><judgment>incorrect</judgment>");
        assert_eq!(j, Judgment::Incorrect);
        assert_eq!(r, "looks wrong");
        let (j, _) = parse_judgment("no tags at all");
        assert_eq!(j, Judgment::Unparseable);
        assert_eq!(tag_content("<new_answer>AD</new_answer>", "new_answer"), Some("AD"));
    }
}
