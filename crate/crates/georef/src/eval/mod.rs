//! Evaluation harness: adapters over subprocess/HTTP transports, bundled
//! mocks, few-shot prompting, answer extraction, binary reward scoring,
//! and the verify-and-regenerate loop.

mod adapter;
mod extract;
mod mock;
mod prompt;
mod run;
mod verify_loop;

pub use adapter::{
    AdapterError, AnswerModel, DecodingHint, HistoryTurn, HttpAdapter, ModelRequest,
    ModelResponse, ShotDoc, SubprocessAdapter,
};
pub use extract::extract_answer;
pub use mock::{MockAdapter, MockKind};
pub use prompt::{
    build_prompt, default_shots, load_shots, prompt_to_request, Exemplar, Prompt, PromptError,
    FROM_VERIFIER_SYSTEM, GENERATOR_SYSTEM, VERIFIER_SYSTEM,
};
pub use run::{
    aggregate, evaluate, score_item, CategoryStats, EvalConfig, EvalError, EvalMode, EvalRecord,
    EvalReport,
};
pub use verify_loop::{
    generation_from_verifier_from, tag_content, verify_and_regenerate_from, Judgment, VerifyTrace,
};

use crate::dataset::DatasetManifest;
use std::time::Duration;

/// Transport configuration for a model adapter.
#[derive(Debug, Clone)]
pub struct ModelAdapterConfig {
    pub endpoint: String,
    pub timeout: Duration,
    pub max_retries: u32,
}

impl Default for ModelAdapterConfig {
    fn default() -> Self {
        Self { endpoint: String::new(), timeout: Duration::from_secs(120), max_retries: 2 }
    }
}

/// Parse an adapter spec into a live adapter.
///
/// Forms: `mock:oracle` | `mock:null` | `mock:shuffle:SEED` |
/// `mock:oracle-verifier` | `cmd:<command line>` | `http(s)://...`.
pub fn parse_adapter(
    spec: &str,
    manifest: &DatasetManifest,
    cfg: &ModelAdapterConfig,
) -> Result<Box<dyn AnswerModel>, AdapterError> {
    if let Some(mock) = spec.strip_prefix("mock:") {
        return Ok(Box::new(MockAdapter::parse(mock, manifest)?));
    }
    if let Some(cmd) = spec.strip_prefix("cmd:") {
        return Ok(Box::new(SubprocessAdapter::new(cmd, cfg.timeout, cfg.max_retries)?));
    }
    if spec.starts_with("http://") || spec.starts_with("https://") {
        return Ok(Box::new(HttpAdapter::new(spec, cfg.timeout, cfg.max_retries)?));
    }
    Err(AdapterError::BadSpec(format!(
        "{spec:?} (expected mock:..., cmd:..., or an http(s) URL)"
    )))
}
