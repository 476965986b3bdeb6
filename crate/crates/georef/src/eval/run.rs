//! The evaluation driver: query every item, score with the binary reward,
//! persist records incrementally, and aggregate per-category accuracy.

use super::adapter::AnswerModel;
use super::extract::extract_answer;
use super::prompt::{build_prompt, prompt_to_request, Exemplar, PromptError};
use super::verify_loop::{
    generation_from_verifier_from, verify_and_regenerate_from, VerifyTrace,
};
use crate::dataset::DatasetManifest;
use crate::facts::Category;
use crate::qa::{answers_match, QAItem};
use crate::util::{canonical_json, sha256_hex};
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet};
use std::io::Write as _;
use std::path::PathBuf;
use std::sync::Mutex;
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EvalMode {
    Plain,
    Regenerate,
    FromVerifier,
}

impl std::str::FromStr for EvalMode {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "plain" => Ok(EvalMode::Plain),
            "regenerate" => Ok(EvalMode::Regenerate),
            "from_verifier" | "from-verifier" => Ok(EvalMode::FromVerifier),
            other => Err(format!("unknown mode {other:?}")),
        }
    }
}

#[derive(Debug, Clone)]
pub struct EvalConfig {
    pub mode: EvalMode,
    pub shots_count: usize,
    pub concurrency: usize,
    pub skip_when_verified_correct: bool,
    pub config_hash: String,
    /// Directory the dataset file lives in; used to resolve image paths
    /// and inline SVG content.
    pub dataset_dir: Option<PathBuf>,
    /// Incremental record log enabling resume by item id.
    pub records_path: Option<PathBuf>,
}

impl Default for EvalConfig {
    fn default() -> Self {
        Self {
            mode: EvalMode::Plain,
            shots_count: 3,
            concurrency: 8,
            skip_when_verified_correct: false,
            config_hash: String::new(),
            dataset_dir: None,
            records_path: None,
        }
    }
}

/// Binary accuracy reward: 1 iff the prediction belongs to the item's
/// answer set. This single function serves evaluation accuracy and the
/// exported training-side reward.
pub fn score_item(prediction: &str, item: &QAItem) -> u8 {
    answers_match(prediction, &item.answers) as u8
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EvalRecord {
    pub item_id: String,
    pub category: Category,
    pub raw_output: String,
    pub extracted: String,
    pub correct: bool,
    pub reward: u8,
    pub latency_seconds: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trace: Option<VerifyTrace>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CategoryStats {
    pub n: usize,
    pub correct: usize,
    pub accuracy: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EvalReport {
    pub adapter: String,
    pub mode: EvalMode,
    pub config_hash: String,
    pub n: usize,
    pub correct: usize,
    pub per_category: BTreeMap<Category, CategoryStats>,
    pub overall_accuracy: f64,
    pub records: Vec<EvalRecord>,
}

impl EvalReport {
    /// Digest of the report with latency fields zeroed, so determinism
    /// checks ignore timing.
    pub fn digest_excluding_latency(&self) -> String {
        let mut clone = self.clone();
        for r in &mut clone.records {
            r.latency_seconds = 0.0;
        }
        sha256_hex(canonical_json(&clone).as_bytes())
    }

    pub fn summary(&self) -> String {
        use std::fmt::Write;
        let mut out = String::new();
        let pick = |c: Category| {
            self.per_category
                .get(&c)
                .map(|s| format!("{:.2}", s.accuracy))
                .unwrap_or_else(|| "-".to_string())
        };
        writeln!(out, "{:<26}{:>10}", "", "Accuracy").unwrap();
        writeln!(out, "{:<26}{:>10}", "Position", pick(Category::Position)).unwrap();
        writeln!(out, "{:<26}{:>10}", "Geometry Shape", pick(Category::Shape)).unwrap();
        writeln!(out, "{:<26}{:>10}", "Geometric Relationship", pick(Category::Relationship)).unwrap();
        writeln!(out, "{:<26}{:>10.2}", "Overall Accuracy", self.overall_accuracy).unwrap();
        out
    }
}

#[derive(Debug, Error)]
pub enum EvalError {
    #[error("prompt: {0}")]
    Prompt(#[from] PromptError),
    #[error("records i/o: {0}")]
    Io(#[from] std::io::Error),
    #[error("records log corrupt at line {line}: {message}")]
    Records { line: usize, message: String },
}

fn load_existing_records(path: &PathBuf) -> Result<Vec<EvalRecord>, EvalError> {
    if !path.exists() {
        return Ok(Vec::new());
    }
    let text = std::fs::read_to_string(path)?;
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let rec: EvalRecord = serde_json::from_str(line)
            .map_err(|e| EvalError::Records { line: i + 1, message: e.to_string() })?;
        out.push(rec);
    }
    Ok(out)
}

fn eval_one(
    item: &QAItem,
    generator: &dyn AnswerModel,
    verifier: Option<&dyn AnswerModel>,
    shots: &[Exemplar],
    dataset_ids: &BTreeSet<String>,
    cfg: &EvalConfig,
) -> Result<EvalRecord, PromptError> {
    let prompt = build_prompt(item, shots, cfg.shots_count, dataset_ids)?;
    let image_path = match &cfg.dataset_dir {
        Some(dir) => dir.join(&item.image).display().to_string(),
        None => item.image.clone(),
    };
    let image_svg = std::fs::read_to_string(&image_path).ok();
    let request = prompt_to_request(&prompt, &item.id, image_path, image_svg);

    let started = std::time::Instant::now();
    let outcome: Result<(String, Option<VerifyTrace>), super::adapter::AdapterError> =
        match cfg.mode {
            EvalMode::Plain => generator.answer(&request).map(|raw| (raw, None)),
            EvalMode::Regenerate => {
                let ver = verifier.unwrap_or(generator);
                verify_and_regenerate_from(
                    None,
                    &prompt,
                    &request,
                    generator,
                    ver,
                    cfg.skip_when_verified_correct,
                )
                .map(|t| (t.final_answer.clone(), Some(t)))
            }
            EvalMode::FromVerifier => {
                let ver = verifier.unwrap_or(generator);
                generation_from_verifier_from(None, &prompt, &request, generator, ver)
                    .map(|t| (t.final_answer.clone(), Some(t)))
            }
        };
    let latency_seconds = started.elapsed().as_secs_f64();

    let record = match outcome {
        Ok((raw, trace)) => {
            let reward = score_item(&raw, item);
            EvalRecord {
                item_id: item.id.clone(),
                category: item.category,
                extracted: extract_answer(&raw),
                raw_output: raw,
                correct: reward == 1,
                reward,
                latency_seconds,
                trace,
                error: None,
            }
        }
        // A per-item model failure scores the item incorrect and never
        // aborts the run.
        Err(e) => EvalRecord {
            item_id: item.id.clone(),
            category: item.category,
            raw_output: String::new(),
            extracted: String::new(),
            correct: false,
            reward: 0,
            latency_seconds,
            trace: None,
            error: Some(e.to_string()),
        },
    };
    Ok(record)
}

/// Aggregate records into the report. Records are sorted by item id, so
/// aggregation order is independent of completion order.
pub fn aggregate(
    adapter: String,
    mode: EvalMode,
    config_hash: String,
    mut records: Vec<EvalRecord>,
) -> EvalReport {
    records.sort_by(|a, b| a.item_id.cmp(&b.item_id));
    records.dedup_by(|a, b| a.item_id == b.item_id);
    let n = records.len();
    let correct = records.iter().filter(|r| r.correct).count();
    let mut per_category: BTreeMap<Category, CategoryStats> = BTreeMap::new();
    for r in &records {
        let s = per_category
            .entry(r.category)
            .or_insert(CategoryStats { n: 0, correct: 0, accuracy: 0.0 });
        s.n += 1;
        s.correct += r.correct as usize;
    }
    for s in per_category.values_mut() {
        s.accuracy = if s.n == 0 { 0.0 } else { s.correct as f64 / s.n as f64 * 100.0 };
    }
    let overall_accuracy = if n == 0 { 0.0 } else { correct as f64 / n as f64 * 100.0 };
    EvalReport { adapter, mode, config_hash, n, correct, per_category, overall_accuracy, records }
}

/// Evaluate a model over a dataset.
///
/// Every item is queried once (or through the configured verify flow);
/// records persist incrementally when a records path is set, and a rerun
/// resumes by item id. Per-item failures degrade to incorrect answers.
pub fn evaluate(
    manifest: &DatasetManifest,
    generator: &dyn AnswerModel,
    verifier: Option<&dyn AnswerModel>,
    shots: &[Exemplar],
    cfg: &EvalConfig,
) -> Result<EvalReport, EvalError> {
    let dataset_ids: BTreeSet<String> = manifest.items.iter().map(|i| i.id.clone()).collect();

    let mut done: Vec<EvalRecord> = Vec::new();
    if let Some(path) = &cfg.records_path {
        done = load_existing_records(path)?;
    }
    let done_ids: BTreeSet<String> = done.iter().map(|r| r.item_id.clone()).collect();
    let mut todo: Vec<&QAItem> =
        manifest.items.iter().filter(|i| !done_ids.contains(&i.id)).collect();
    todo.sort_by(|a, b| a.id.cmp(&b.id));

    // Fail fast on prompt configuration problems before spawning work.
    if let Some(first) = todo.first() {
        build_prompt(first, shots, cfg.shots_count, &dataset_ids)?;
    }

    let log: Option<Mutex<std::fs::File>> = match &cfg.records_path {
        Some(path) => {
            if let Some(parent) = path.parent() {
                std::fs::create_dir_all(parent)?;
            }
            Some(Mutex::new(
                std::fs::OpenOptions::new().create(true).append(true).open(path)?,
            ))
        }
        None => None,
    };

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.concurrency.max(1))
        .build()
        .expect("eval thread pool");
    let results: Vec<Result<EvalRecord, PromptError>> = pool.install(|| {
        use rayon::prelude::*;
        todo.par_iter()
            .map(|item| {
                let rec = eval_one(item, generator, verifier, shots, &dataset_ids, cfg)?;
                if let Some(log) = &log {
                    let mut file = log.lock().expect("records lock");
                    let line = serde_json::to_string(&rec).expect("record serializes");
                    let _ = writeln!(file, "{line}");
                }
                Ok(rec)
            })
            .collect()
    });

    let mut records = done;
    for r in results {
        records.push(r?);
    }
    Ok(aggregate(generator.name(), cfg.mode, cfg.config_hash.clone(), records))
}
