//! Question/answer-set generation from verified facts.
//!
//! Facts with the same kind and the same mentioned elements are grouped
//! into a single open-ended question whose answer set is the union of the
//! group's targets: when several elements genuinely satisfy the question,
//! naming any of them is correct. A seed-driven fraction of eligible
//! relationship questions is rewritten as two-step compositions.

use super::answers::{build_answer_set, AnswerSet};
use super::catalog::{inner_phrase, QuestionCatalog};
use crate::facts::{Category, ElementRef, Fact, FactKind};
use crate::geom::{ConcreteScene, LinearKind};
use crate::scene::IdentifierScheme;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

/// One referring-expression question with its closed answer set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QAItem {
    pub id: String,
    pub image: String,
    pub category: Category,
    pub question: String,
    pub answers: AnswerSet,
    /// Reasoning steps: 1 for direct questions, 2 for compositions.
    pub steps: u8,
    pub fact_kind: FactKind,
    pub template_id: String,
    pub scheme: IdentifierScheme,
    pub seed: u64,
}

#[derive(Debug, Clone)]
pub struct QAConfig {
    /// Fraction of eligible relationship questions rewritten as two-step
    /// compositions.
    pub two_step_ratio: f64,
    pub catalog: QuestionCatalog,
}

impl Default for QAConfig {
    fn default() -> Self {
        Self { two_step_ratio: 0.1, catalog: QuestionCatalog::default_catalog() }
    }
}

/// Kinds whose accepted answers inherit to named sub-segments.
fn inherits(kind: FactKind) -> bool {
    matches!(
        kind,
        FactKind::ParallelPair | FactKind::PerpendicularPair | FactKind::CollinearTriple
    )
}

fn type_word(target: &ElementRef) -> &'static str {
    match target {
        ElementRef::Point { .. } => "point",
        ElementRef::Linear { kind, .. } => match kind {
            LinearKind::Segment => "segment",
            LinearKind::Line => "line",
            LinearKind::Ray => "ray",
        },
        ElementRef::Circle { .. } => "circle",
        ElementRef::Angle { .. } => "angle",
        ElementRef::Polygon { .. } => "shape",
    }
}

fn render_template(text: &str, mentions: &[String], target_type: &str) -> String {
    let mut out = text.to_string();
    for (i, m) in mentions.iter().enumerate() {
        out = out.replace(&format!("{{m{}}}", i + 1), m);
    }
    out.replace("{target_type}", target_type)
}

/// A group of facts answering the same question.
struct Group {
    kind: FactKind,
    mention_phrases: Vec<String>,
    rep: Fact,
    targets: Vec<ElementRef>,
}

fn group_facts(facts: &[Fact]) -> Vec<Group> {
    let mut groups: Vec<Group> = Vec::new();
    for fact in facts {
        let mentions: Vec<String> = fact.mentioned().iter().map(|m| m.phrase()).collect();
        match groups
            .iter_mut()
            .find(|g| g.kind == fact.kind && g.mention_phrases == mentions)
        {
            Some(g) => {
                if !g.targets.contains(&fact.answer_target) {
                    g.targets.push(fact.answer_target.clone());
                }
            }
            None => groups.push(Group {
                kind: fact.kind,
                mention_phrases: mentions,
                rep: fact.clone(),
                targets: vec![fact.answer_target.clone()],
            }),
        }
    }
    groups
}

fn group_answers(g: &Group, scene: &ConcreteScene) -> Option<AnswerSet> {
    let mut set: Option<AnswerSet> = None;
    for target in &g.targets {
        match build_answer_set(target, scene, inherits(g.kind)) {
            Ok(s) => match &mut set {
                Some(acc) => acc.merge(&s),
                None => set = Some(s),
            },
            Err(_) => return None,
        }
    }
    set
}

/// Generate every question for a scene's facts.
///
/// `image` is the relative image reference recorded on each item; item ids
/// are `<stem>-q<index>` in emission order. Deterministic for fixed
/// inputs.
pub fn generate_qa(
    scene: &ConcreteScene,
    facts: &[Fact],
    cfg: &QAConfig,
    seed: u64,
    stem: &str,
    image: &str,
) -> Vec<QAItem> {
    let groups = group_facts(facts);

    // Eligibility for two-step rewriting: a relationship question whose
    // mentioned element is itself the target of another fact that has a
    // noun-phrase form.
    let mut eligible: Vec<usize> = Vec::new();
    for (gi, g) in groups.iter().enumerate() {
        if g.rep.category != Category::Relationship || g.rep.mentioned().len() != 1 {
            continue;
        }
        if find_inner(&groups, gi).is_some() {
            eligible.push(gi);
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut order = eligible.clone();
    order.shuffle(&mut rng);
    let take = ((cfg.two_step_ratio * eligible.len() as f64) + 0.5).floor() as usize;
    let two_step: Vec<usize> = order.into_iter().take(take.min(eligible.len())).collect();

    let mut items = Vec::new();
    let mut index = 0usize;
    for (gi, g) in groups.iter().enumerate() {
        let Some(answers) = group_answers(g, scene) else { continue };
        let target_type = type_word(&g.targets[0]);
        if two_step.contains(&gi) {
            if let Some((_, phrase)) = find_inner(&groups, gi) {
                // Composition keeps the outer question's answer set.
                let template = &cfg.catalog.templates(g.kind)[0];
                let question = render_template(&template.text, &[phrase], target_type);
                items.push(QAItem {
                    id: format!("{stem}-q{index:03}"),
                    image: image.to_string(),
                    category: g.rep.category,
                    question,
                    answers: answers.clone(),
                    steps: 2,
                    fact_kind: g.kind,
                    template_id: format!("{}+two_step", template.id),
                    scheme: scene.scheme,
                    seed: scene.seed,
                });
                index += 1;
                continue;
            }
        }
        for template in cfg.catalog.templates(g.kind) {
            let question = render_template(&template.text, &g.mention_phrases, target_type);
            items.push(QAItem {
                id: format!("{stem}-q{index:03}"),
                image: image.to_string(),
                category: g.rep.category,
                question,
                answers: answers.clone(),
                steps: 1,
                fact_kind: g.kind,
                template_id: template.id.clone(),
                scheme: scene.scheme,
                seed: scene.seed,
            });
            index += 1;
        }
    }
    items
}

/// Inner fact for a two-step rewrite of group `gi`: another group whose
/// sole target equals the outer group's mentioned element and whose kind
/// has a noun-phrase form. Returns the chosen group and the rendered
/// phrase.
fn find_inner(groups: &[Group], gi: usize) -> Option<(usize, String)> {
    let outer = &groups[gi];
    let mentioned = outer.rep.mentioned();
    let mentioned = mentioned.first()?;
    for (i, g) in groups.iter().enumerate() {
        if i == gi || g.targets.len() != 1 || g.rep.mentioned().len() != 1 {
            continue;
        }
        if &g.targets[0] != *mentioned {
            continue;
        }
        let inner_mention = g.rep.mentioned()[0].phrase();
        if let Some(phrase) = inner_phrase(g.kind, &inner_mention) {
            return Some((i, phrase));
        }
    }
    None
}

/// Compose a two-step question from a chainable pair in `facts`, if any:
/// a fact whose answer target is the mentioned subject of a relationship
/// fact. Returns None when no chain exists.
pub fn compose_two_step(
    scene: &ConcreteScene,
    facts: &[Fact],
    cfg: &QAConfig,
    seed: u64,
    stem: &str,
    image: &str,
) -> Option<QAItem> {
    let groups = group_facts(facts);
    let mut candidates: Vec<usize> = (0..groups.len())
        .filter(|gi| {
            groups[*gi].rep.category == Category::Relationship
                && groups[*gi].rep.mentioned().len() == 1
                && find_inner(&groups, *gi).is_some()
        })
        .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    candidates.shuffle(&mut rng);
    let gi = *candidates.first()?;
    let g = &groups[gi];
    let (_, phrase) = find_inner(&groups, gi)?;
    let answers = group_answers(g, scene)?;
    let template = &cfg.catalog.templates(g.kind)[0];
    Some(QAItem {
        id: format!("{stem}-twostep"),
        image: image.to_string(),
        category: g.rep.category,
        question: render_template(&template.text, &[phrase], type_word(&g.targets[0])),
        answers,
        steps: 2,
        fact_kind: g.kind,
        template_id: format!("{}+two_step", template.id),
        scheme: scene.scheme,
        seed: scene.seed,
    })
}
