//! Answer normalization, equivalence-closed answer sets, and matching.
//!
//! Normalization rules: uppercase; strip whitespace, punctuation and the
//! element-type words (angle, segment, line, triangle, point, circle, and
//! the angle sign); two-letter tokens sort their letters; three-letter
//! angle tokens keep the middle (vertex) letter fixed and sort the outer
//! two; longer tokens are kept as-is. The function is idempotent.

use crate::facts::ElementRef;
use crate::geom::predicates::on_segment;
use crate::geom::ConcreteScene;
use crate::scene::PointId;
use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;
use thiserror::Error;

const TYPE_WORDS: [&str; 6] = ["ANGLE", "SEGMENT", "LINE", "TRIANGLE", "POINT", "CIRCLE"];

/// Normalize an answer string to its canonical compact form.
pub fn normalize_answer(text: &str) -> String {
    let upper = text.to_uppercase();
    let mut letters = String::new();
    for word in upper.split(|c: char| !c.is_ascii_alphanumeric()) {
        if word.is_empty() || TYPE_WORDS.contains(&word) {
            continue;
        }
        letters.push_str(word);
    }
    let chars: Vec<char> = letters.chars().collect();
    match chars.len() {
        2 => {
            let (a, b) = (chars[0], chars[1]);
            if a <= b {
                format!("{a}{b}")
            } else {
                format!("{b}{a}")
            }
        }
        3 => {
            let (a, v, b) = (chars[0], chars[1], chars[2]);
            if a <= b {
                format!("{a}{v}{b}")
            } else {
                format!("{b}{v}{a}")
            }
        }
        _ => letters,
    }
}

/// Entity tokens of a raw model reply: maximal uppercase runs of one to
/// four letters standing alone as words.
pub fn extract_entities(text: &str) -> Vec<String> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        if chars[i].is_ascii_uppercase() {
            let start = i;
            while i < chars.len() && chars[i].is_ascii_uppercase() {
                i += 1;
            }
            let len = i - start;
            let left_ok = start == 0 || !chars[start - 1].is_alphabetic();
            let right_ok = i >= chars.len() || !chars[i].is_alphabetic();
            if (1..=4).contains(&len) && left_ok && right_ok {
                out.push(chars[start..i].iter().collect());
            }
        } else {
            i += 1;
        }
    }
    out
}

/// The equivalence-closed set of acceptable surface forms for one answer.
/// Variants are stored normalized.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AnswerSet {
    pub canonical: String,
    pub variants: BTreeSet<String>,
}

impl AnswerSet {
    pub fn from_variants(canonical: &str, raw_variants: impl IntoIterator<Item = String>) -> Self {
        let canonical = normalize_answer(canonical);
        let mut variants: BTreeSet<String> =
            raw_variants.into_iter().map(|v| normalize_answer(&v)).collect();
        variants.insert(canonical.clone());
        AnswerSet { canonical, variants }
    }

    pub fn merge(&mut self, other: &AnswerSet) {
        self.variants.extend(other.variants.iter().cloned());
    }
}

#[derive(Debug, Error)]
pub enum AnswerError {
    #[error("unknown answer target: {0}")]
    UnknownTarget(String),
}

/// Build the closed answer set for one element.
///
/// Closure rules: points are the single letter; segments accept both
/// endpoint orders; angles accept both outer orders around the fixed
/// vertex, with or without a type prefix; polygons accept every rotation
/// and reflection of the vertex cycle. With `inherit` set (parallel /
/// perpendicular / collinear questions), every sub-segment named by two
/// labeled points lying on the target segment is also accepted.
pub fn build_answer_set(
    target: &ElementRef,
    scene: &ConcreteScene,
    inherit: bool,
) -> Result<AnswerSet, AnswerError> {
    let mut variants: Vec<String> = Vec::new();
    match target {
        ElementRef::Point { id } => {
            if !scene.coords.contains_key(id) {
                return Err(AnswerError::UnknownTarget(id.to_string()));
            }
            variants.push(id.to_string());
        }
        ElementRef::Circle { center } => {
            if scene.elements.find_circle(*center).is_none() {
                return Err(AnswerError::UnknownTarget(format!("circle {center}")));
            }
            variants.push(center.to_string());
        }
        ElementRef::Angle { a, vertex, b } => {
            for p in [a, vertex, b] {
                if !scene.coords.contains_key(p) {
                    return Err(AnswerError::UnknownTarget(format!("{a}{vertex}{b}")));
                }
            }
            variants.push(format!("{a}{vertex}{b}"));
            variants.push(format!("{b}{vertex}{a}"));
        }
        ElementRef::Polygon { vertices } => {
            for p in vertices {
                if !scene.coords.contains_key(p) {
                    return Err(AnswerError::UnknownTarget(target.letters()));
                }
            }
            let n = vertices.len();
            for shift in 0..n {
                let rot: String = (0..n).map(|i| vertices[(i + shift) % n].to_string()).collect();
                let refl: String =
                    (0..n).map(|i| vertices[(n + shift - i) % n].to_string()).collect();
                variants.push(rot);
                variants.push(refl);
            }
        }
        ElementRef::Linear { a, b, .. } => {
            let (pa, pb) = match (scene.coords.get(a), scene.coords.get(b)) {
                (Some(x), Some(y)) => (*x, *y),
                _ => return Err(AnswerError::UnknownTarget(format!("{a}{b}"))),
            };
            variants.push(format!("{a}{b}"));
            variants.push(format!("{b}{a}"));
            if inherit {
                // Sub-segments: labeled point pairs on the target span.
                let on: Vec<PointId> = scene
                    .coords
                    .iter()
                    .filter(|(_, p)| on_segment(**p, pa, pb, 1e-6))
                    .map(|(id, _)| *id)
                    .collect();
                for i in 0..on.len() {
                    for j in (i + 1)..on.len() {
                        variants.push(format!("{}{}", on[i], on[j]));
                        variants.push(format!("{}{}", on[j], on[i]));
                    }
                }
            }
        }
    }
    let canonical = variants[0].clone();
    Ok(AnswerSet::from_variants(&canonical, variants))
}

/// True iff the prediction names an accepted answer, either wholesale or
/// through any embedded entity token.
pub fn answers_match(prediction: &str, answers: &AnswerSet) -> bool {
    if answers.variants.contains(&normalize_answer(prediction)) {
        return true;
    }
    extract_entities(prediction)
        .iter()
        .any(|tok| answers.variants.contains(&normalize_answer(tok)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::Vec2;
    use crate::scene::{parse_program, IdentifierScheme};
    use std::collections::BTreeMap;

    #[test]
    fn normalize_examples() {
        assert_eq!(normalize_answer("angle FBA"), "ABF");
        assert_eq!(normalize_answer("segment d a"), "AD");
        assert_eq!(normalize_answer("ABF"), "ABF");
        assert_eq!(normalize_answer("∠FBA"), "ABF");
        assert_eq!(normalize_answer(""), "");
    }

    #[test]
    fn normalize_is_idempotent() {
        for input in ["angle FBA", "segment AD", "ABCD", "x", "  D A "] {
            let once = normalize_answer(input);
            assert_eq!(once, normalize_answer(&once), "input {input:?}");
        }
    }

    fn sub_segment_scene() -> ConcreteScene {
        let p = parse_program(
            "t",
            "point A; point D; point E; segment A D; constraint collinear(A, E, D); point M = midpoint(A, D)",
        )
        .unwrap();
        let id = |c: char| crate::scene::PointId::new(c).unwrap();
        let mut coords = BTreeMap::new();
        coords.insert(id('A'), Vec2::new(0.0, 0.0));
        coords.insert(id('D'), Vec2::new(100.0, 0.0));
        coords.insert(id('E'), Vec2::new(40.0, 0.0));
        ConcreteScene::from_parts(p, coords, IdentifierScheme::Common, 0, (512.0, 512.0))
    }

    #[test]
    fn segment_set_accepts_both_orders() {
        let s = sub_segment_scene();
        let id = |c: char| crate::scene::PointId::new(c).unwrap();
        let set = build_answer_set(&ElementRef::segment(id('A'), id('D')), &s, false).unwrap();
        assert!(answers_match("AD", &set));
        assert!(answers_match("DA", &set));
        assert!(!answers_match("AE", &set));
    }

    #[test]
    fn inherited_set_accepts_sub_segments() {
        let s = sub_segment_scene();
        let id = |c: char| crate::scene::PointId::new(c).unwrap();
        let set = build_answer_set(&ElementRef::segment(id('A'), id('D')), &s, true).unwrap();
        for accepted in ["AD", "DA", "AE", "EA", "ED", "DE", "AM", "MD", "EM"] {
            assert!(answers_match(accepted, &set), "{accepted} should match");
        }
        assert!(!answers_match("AB", &set));
    }

    #[test]
    fn angle_set_fixes_vertex() {
        let p = parse_program("t", "point A; point B; point F; segment A B; segment B F; point M = midpoint(A, F)").unwrap();
        let id = |c: char| crate::scene::PointId::new(c).unwrap();
        let mut coords = BTreeMap::new();
        coords.insert(id('A'), Vec2::new(0.0, 0.0));
        coords.insert(id('B'), Vec2::new(100.0, 0.0));
        coords.insert(id('F'), Vec2::new(100.0, 80.0));
        let s = ConcreteScene::from_parts(p, coords, IdentifierScheme::Common, 0, (512.0, 512.0));
        let set =
            build_answer_set(&ElementRef::angle(id('A'), id('B'), id('F')), &s, false).unwrap();
        assert!(answers_match("ABF", &set));
        assert!(answers_match("FBA", &set));
        assert!(answers_match("∠FBA", &set));
        assert!(answers_match("angle FBA", &set));
        assert!(!answers_match("BAF", &set));
    }

    #[test]
    fn entity_tokens() {
        assert_eq!(extract_entities("The tangent point is A."), vec!["A"]);
        assert_eq!(extract_entities("so AD and DA"), vec!["AD", "DA"]);
        assert!(extract_entities("plain words only").is_empty());
        // Uppercase runs glued to lowercase letters are not entities.
        assert!(extract_entities("Therefore").is_empty());
    }
}
