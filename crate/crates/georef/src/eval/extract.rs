//! Answer extraction from raw model output.
//!
//! Priority pipeline: text after the last "Answer:" marker; otherwise the
//! last non-empty line; then an entity-token scan over that base string.
//! Extraction never fails: the worst case returns the trimmed base.

use crate::qa::extract_entities;

const TYPE_WORDS: [&str; 6] = ["angle", "segment", "line", "triangle", "point", "circle"];

fn after_last_answer_marker(raw: &str) -> Option<&str> {
    let bytes = raw.as_bytes();
    let marker = b"answer:";
    let mut found = None;
    if bytes.len() >= marker.len() {
        for i in 0..=(bytes.len() - marker.len()) {
            if bytes[i..i + marker.len()].eq_ignore_ascii_case(marker) {
                found = Some(i + marker.len());
            }
        }
    }
    found.map(|i| raw[i..].trim())
}

fn last_non_empty_line(raw: &str) -> &str {
    raw.lines().rev().find(|l| !l.trim().is_empty()).unwrap_or("").trim()
}

/// Extract the answer span from a raw reply.
pub fn extract_answer(raw: &str) -> String {
    let base = match after_last_answer_marker(raw) {
        Some(b) if !b.is_empty() => b,
        _ => last_non_empty_line(raw),
    };
    let entities = extract_entities(base);
    let Some(last) = entities.last() else {
        return base.trim().to_string();
    };
    // Keep an immediately preceding element-type word, e.g. "angle FBA".
    if let Some(pos) = base.rfind(last.as_str()) {
        let before = base[..pos].trim_end();
        if let Some(word) = before.split_whitespace().last() {
            let clean = word.trim_matches(|c: char| !c.is_alphabetic()).to_lowercase();
            if TYPE_WORDS.contains(&clean.as_str()) {
                return format!("{clean} {last}");
            }
        }
        if before.ends_with('∠') {
            return format!("∠{last}");
        }
    }
    last.clone()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn marker_rule() {
        assert_eq!(
            extract_answer("the segments look parallel\nAnswer: angle FBA"),
            "angle FBA"
        );
    }

    #[test]
    fn token_scan() {
        let got = extract_answer("The tangent point is A.");
        assert!(got.contains('A'), "got {got:?}");
        assert_eq!(got, "A");
    }

    #[test]
    fn empty_input() {
        assert_eq!(extract_answer(""), "");
    }

    #[test]
    fn last_line_fallback() {
        assert_eq!(extract_answer("some reasoning\n\nAD\n"), "AD");
    }

    #[test]
    fn angle_sign_prefix_kept() {
        assert_eq!(extract_answer("the result is ∠FBA"), "∠FBA");
    }
}
