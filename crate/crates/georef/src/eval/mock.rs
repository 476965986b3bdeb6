//! Bundled mock adapters: `oracle` (answers ground truth), `null` (always
//! "X"), `shuffle(seed)` (answers another item's ground truth), and
//! `oracle-verifier` (judges or corrects by consulting the answer set).
//! They exist so the whole harness can be exercised without a model.

use super::adapter::{AdapterError, AnswerModel, ModelRequest};
use crate::dataset::DatasetManifest;
use crate::qa::{answers_match, AnswerSet};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::collections::BTreeMap;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MockKind {
    Oracle,
    Null,
    Shuffle(u64),
    OracleVerifier,
}

pub struct MockAdapter {
    kind: MockKind,
    answers: BTreeMap<String, AnswerSet>,
    shuffled: BTreeMap<String, String>,
}

impl MockAdapter {
    pub fn new(kind: MockKind, manifest: &DatasetManifest) -> Self {
        let answers: BTreeMap<String, AnswerSet> = manifest
            .items
            .iter()
            .map(|i| (i.id.clone(), i.answers.clone()))
            .collect();
        let mut shuffled = BTreeMap::new();
        if let MockKind::Shuffle(seed) = kind {
            let ids: Vec<&String> = answers.keys().collect();
            let mut perm: Vec<&String> = ids.clone();
            perm.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
            for (id, other) in ids.iter().zip(perm.iter()) {
                shuffled.insert(
                    (*id).clone(),
                    answers[other.as_str()].canonical.clone(),
                );
            }
        }
        MockAdapter { kind, answers, shuffled }
    }

    /// Parse mock specs: `oracle`, `null`, `shuffle:SEED`, `oracle-verifier`.
    pub fn parse(spec: &str, manifest: &DatasetManifest) -> Result<Self, AdapterError> {
        let kind = if spec == "oracle" {
            MockKind::Oracle
        } else if spec == "null" {
            MockKind::Null
        } else if spec == "oracle-verifier" {
            MockKind::OracleVerifier
        } else if let Some(seed) = spec.strip_prefix("shuffle:") {
            let seed: u64 = seed
                .parse()
                .map_err(|_| AdapterError::BadSpec(format!("bad shuffle seed {seed:?}")))?;
            MockKind::Shuffle(seed)
        } else if spec == "shuffle" {
            MockKind::Shuffle(0)
        } else {
            return Err(AdapterError::BadSpec(format!("unknown mock {spec:?}")));
        };
        Ok(MockAdapter::new(kind, manifest))
    }
}

impl AnswerModel for MockAdapter {
    fn name(&self) -> String {
        match self.kind {
            MockKind::Oracle => "mock:oracle".into(),
            MockKind::Null => "mock:null".into(),
            MockKind::Shuffle(seed) => format!("mock:shuffle:{seed}"),
            MockKind::OracleVerifier => "mock:oracle-verifier".into(),
        }
    }

    fn answer(&self, req: &ModelRequest) -> Result<String, AdapterError> {
        match self.kind {
            MockKind::Null => Ok("X".to_string()),
            MockKind::Oracle => Ok(self
                .answers
                .get(&req.id)
                .map(|a| a.canonical.clone())
                .unwrap_or_else(|| "UNKNOWN".to_string())),
            MockKind::Shuffle(_) => Ok(self
                .shuffled
                .get(&req.id)
                .cloned()
                .unwrap_or_else(|| "UNKNOWN".to_string())),
            MockKind::OracleVerifier => {
                let answers = self
                    .answers
                    .get(&req.id)
                    .ok_or_else(|| AdapterError::MalformedResponse(format!("unknown item {}", req.id)))?;
                if req.system.contains("<new_answer>") {
                    return Ok(format!("<new_answer>{}</new_answer>", answers.canonical));
                }
                // Judge the proposed answer: the last assistant turn.
                let proposed = req
                    .history
                    .iter()
                    .rev()
                    .find(|t| t.role == "assistant")
                    .map(|t| t.content.as_str())
                    .unwrap_or("");
                let verdict = if answers_match(proposed, answers) { "correct" } else { "incorrect" };
                Ok(format!(
                    "<reasoning>compared the proposed answer against the ground-truth answer set</reasoning><judgment>{verdict}</judgment>"
                ))
            }
        }
    }
}
