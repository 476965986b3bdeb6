//! Dataset persistence (JSONL), statistics, and the annotation-bias
//! splits.
//!
//! On disk a dataset is one JSONL file: a header line carrying the
//! manifest metadata, then one item per line. Every line has `v: 1` and a
//! `kind` discriminator; see `docs/dataset-format.md`.

use crate::facts::{Category, FactKind};
use crate::qa::QAItem;
use crate::scene::IdentifierScheme;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;
use thiserror::Error;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CreatedWith {
    pub tool_version: String,
    pub config_hash: String,
}

impl Default for CreatedWith {
    fn default() -> Self {
        Self {
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            config_hash: String::new(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetManifest {
    pub items: Vec<QAItem>,
    /// Directory (relative to the dataset file) holding the images.
    /// Empty disables image-existence checks.
    pub images_dir: String,
    pub created_with: CreatedWith,
}

#[derive(Debug, Error)]
pub enum DatasetError {
    #[error("dataset i/o: {0}")]
    Io(#[from] std::io::Error),
    #[error("{path}:{line}: schema violation: {message}")]
    Schema { path: String, line: usize, message: String },
    #[error("duplicate item id {0}")]
    DuplicateId(String),
    #[error("missing image file for item {id}: {path}")]
    MissingImage { id: String, path: String },
    #[error("insufficient items: need {needed} of scheme {scheme}, have {have}")]
    InsufficientItems { scheme: String, needed: usize, have: usize },
}

#[derive(Debug, Serialize, Deserialize)]
struct HeaderLine {
    v: u32,
    kind: String,
    images_dir: String,
    created_with: CreatedWith,
}

#[derive(Debug, Serialize, Deserialize)]
struct ItemLine {
    v: u32,
    kind: String,
    #[serde(flatten)]
    item: QAItem,
}

impl DatasetManifest {
    pub fn new(items: Vec<QAItem>, images_dir: &str, created_with: CreatedWith) -> Self {
        Self { items, images_dir: images_dir.to_string(), created_with }
    }

    /// Unique ids, and image files present when an images dir is set.
    pub fn validate(&self, base_dir: Option<&Path>) -> Result<(), DatasetError> {
        let mut seen = BTreeSet::new();
        for item in &self.items {
            if !seen.insert(item.id.clone()) {
                return Err(DatasetError::DuplicateId(item.id.clone()));
            }
            if !self.images_dir.is_empty() {
                if let Some(base) = base_dir {
                    let path = base.join(&item.image);
                    if !path.exists() {
                        return Err(DatasetError::MissingImage {
                            id: item.id.clone(),
                            path: path.display().to_string(),
                        });
                    }
                }
            }
        }
        Ok(())
    }
}

/// Write a dataset as JSONL: header line, then one item per line.
pub fn write_dataset(m: &DatasetManifest, path: &Path) -> Result<(), DatasetError> {
    m.validate(path.parent())?;
    let mut out = std::io::BufWriter::new(std::fs::File::create(path)?);
    let header = HeaderLine {
        v: SCHEMA_VERSION,
        kind: "header".into(),
        images_dir: m.images_dir.clone(),
        created_with: m.created_with.clone(),
    };
    writeln!(out, "{}", serde_json::to_string(&header).expect("header serializes"))?;
    for item in &m.items {
        let line = ItemLine { v: SCHEMA_VERSION, kind: "item".into(), item: item.clone() };
        writeln!(out, "{}", serde_json::to_string(&line).expect("item serializes"))?;
    }
    Ok(())
}

/// Read a dataset back; schema violations name the offending line.
pub fn read_dataset(path: &Path) -> Result<DatasetManifest, DatasetError> {
    let display = path.display().to_string();
    let schema_err = |line: usize, message: String| DatasetError::Schema {
        path: display.clone(),
        line,
        message,
    };
    let file = std::fs::File::open(path)?;
    let reader = BufReader::new(file);
    let mut images_dir = String::new();
    let mut created_with = CreatedWith::default();
    let mut saw_header = false;
    let mut items = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line_no = i + 1;
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let value: serde_json::Value = serde_json::from_str(&line)
            .map_err(|e| schema_err(line_no, format!("invalid JSON: {e}")))?;
        let v = value.get("v").and_then(|v| v.as_u64());
        if v != Some(SCHEMA_VERSION as u64) {
            return Err(schema_err(line_no, format!("unsupported schema version {v:?}")));
        }
        match value.get("kind").and_then(|k| k.as_str()) {
            Some("header") => {
                let header: HeaderLine = serde_json::from_value(value)
                    .map_err(|e| schema_err(line_no, e.to_string()))?;
                images_dir = header.images_dir;
                created_with = header.created_with;
                saw_header = true;
            }
            Some("item") => {
                let item: ItemLine = serde_json::from_value(value)
                    .map_err(|e| schema_err(line_no, e.to_string()))?;
                items.push(item.item);
            }
            other => {
                return Err(schema_err(line_no, format!("unknown line kind {other:?}")));
            }
        }
    }
    if !saw_header {
        return Err(schema_err(1, "missing header line".into()));
    }
    Ok(DatasetManifest { items, images_dir, created_with })
}

/// Counts in the shape of the dataset-statistics table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StatsReport {
    pub per_category: BTreeMap<Category, usize>,
    pub total_questions: usize,
    pub images: usize,
    pub per_scheme: BTreeMap<IdentifierScheme, usize>,
    pub per_fact_kind: BTreeMap<FactKind, usize>,
}

pub fn dataset_stats(m: &DatasetManifest) -> StatsReport {
    let mut per_category = BTreeMap::new();
    let mut per_scheme = BTreeMap::new();
    let mut per_fact_kind = BTreeMap::new();
    let mut images = BTreeSet::new();
    for item in &m.items {
        *per_category.entry(item.category).or_insert(0) += 1;
        *per_scheme.entry(item.scheme).or_insert(0) += 1;
        *per_fact_kind.entry(item.fact_kind).or_insert(0) += 1;
        images.insert(item.image.clone());
    }
    StatsReport {
        per_category,
        total_questions: m.items.len(),
        images: images.len(),
        per_scheme,
        per_fact_kind,
    }
}

impl fmt::Display for StatsReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let count = |c: Category| self.per_category.get(&c).copied().unwrap_or(0);
        writeln!(f, "{:<28}{:>10}", "", "Count")?;
        writeln!(f, "{:<28}{:>10}", "Position", count(Category::Position))?;
        writeln!(f, "{:<28}{:>10}", "Geometry Shape", count(Category::Shape))?;
        writeln!(f, "{:<28}{:>10}", "Geometric Relationship", count(Category::Relationship))?;
        writeln!(f, "{:<28}{:>10}", "Total Questions", self.total_questions)?;
        writeln!(f, "{:<28}{:>10}", "Images", self.images)?;
        Ok(())
    }
}

/// Build the three bias-study training splits: Cmn (Common labels only),
/// Rand (Random labels only), and Hybrid (a 1:1 mix). Each has exactly
/// `n` items; sampling is seed-deterministic and splits are disjoint when
/// the pools are large enough.
pub fn make_bias_splits(
    m: &DatasetManifest,
    n: usize,
    seed: u64,
) -> Result<(DatasetManifest, DatasetManifest, DatasetManifest), DatasetError> {
    let mut common: Vec<&QAItem> =
        m.items.iter().filter(|i| i.scheme == IdentifierScheme::Common).collect();
    let mut random: Vec<&QAItem> =
        m.items.iter().filter(|i| i.scheme == IdentifierScheme::Random).collect();
    common.sort_by(|a, b| a.id.cmp(&b.id));
    random.sort_by(|a, b| a.id.cmp(&b.id));
    if common.len() < n {
        return Err(DatasetError::InsufficientItems {
            scheme: "common".into(),
            needed: n,
            have: common.len(),
        });
    }
    if random.len() < n {
        return Err(DatasetError::InsufficientItems {
            scheme: "random".into(),
            needed: n,
            have: random.len(),
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    common.shuffle(&mut rng);
    random.shuffle(&mut rng);

    let take_wrapped = |pool: &[&QAItem], start: usize, count: usize| -> Vec<QAItem> {
        (0..count).map(|k| pool[(start + k) % pool.len()].clone()).collect()
    };

    let half_common = n.div_ceil(2);
    let half_random = n / 2;
    let mut cmn = take_wrapped(&common, 0, n);
    let mut rand_split = take_wrapped(&random, 0, n);
    let mut hybrid = take_wrapped(&common, n % common.len().max(1), half_common);
    hybrid.extend(take_wrapped(&random, n % random.len().max(1), half_random));

    // Hybrid sampling starts right after the pure splits, so it is
    // disjoint from them whenever the pools are big enough.
    cmn.sort_by(|a, b| a.id.cmp(&b.id));
    rand_split.sort_by(|a, b| a.id.cmp(&b.id));
    hybrid.sort_by(|a, b| a.id.cmp(&b.id));

    let wrap = |items: Vec<QAItem>| DatasetManifest {
        items,
        images_dir: m.images_dir.clone(),
        created_with: m.created_with.clone(),
    };
    Ok((wrap(cmn), wrap(rand_split), wrap(hybrid)))
}

#[cfg(test)]
pub(crate) mod tests_support {
    use super::*;
    use crate::qa::AnswerSet;

    /// Minimal valid item for harness tests.
    pub fn tiny_item(id: &str) -> QAItem {
        QAItem {
            id: id.to_string(),
            image: "img.svg".into(),
            category: Category::Position,
            question: "Which point is the midpoint of segment AB?".into(),
            answers: AnswerSet::from_variants("M", ["M".to_string()]),
            steps: 1,
            fact_kind: FactKind::Midpoint,
            template_id: "midpoint.of".into(),
            scheme: IdentifierScheme::Common,
            seed: 0,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qa::AnswerSet;

    pub(crate) fn synthetic_item(i: usize, category: Category, scheme: IdentifierScheme) -> QAItem {
        QAItem {
            id: format!("item-{i:05}"),
            image: format!("img-{}.svg", i % 7),
            category,
            question: format!("Which point is referred to ({i})?"),
            answers: AnswerSet::from_variants("A", ["A".to_string()]),
            steps: 1,
            fact_kind: match category {
                Category::Position => FactKind::Midpoint,
                Category::Shape => FactKind::Chord,
                Category::Relationship => FactKind::ParallelPair,
            },
            template_id: "t".into(),
            scheme,
            seed: i as u64,
        }
    }

    fn synthetic_manifest(pos: usize, shape: usize, rel: usize) -> DatasetManifest {
        let mut items = Vec::new();
        for i in 0..pos {
            items.push(synthetic_item(i, Category::Position, IdentifierScheme::Common));
        }
        for i in 0..shape {
            items.push(synthetic_item(pos + i, Category::Shape, IdentifierScheme::Random));
        }
        for i in 0..rel {
            let scheme = if i % 2 == 0 { IdentifierScheme::Common } else { IdentifierScheme::Random };
            items.push(synthetic_item(pos + shape + i, Category::Relationship, scheme));
        }
        DatasetManifest::new(items, "", CreatedWith::default())
    }

    #[test]
    fn category_counts_sum_to_total() {
        // Category rows follow the published table shape; the total is the
        // exact sum of the rows.
        let m = synthetic_manifest(7433, 8395, 14076);
        let stats = dataset_stats(&m);
        assert_eq!(stats.per_category[&Category::Position], 7433);
        assert_eq!(stats.per_category[&Category::Shape], 8395);
        assert_eq!(stats.per_category[&Category::Relationship], 14076);
        assert_eq!(stats.total_questions, 7433 + 8395 + 14076);
        assert_eq!(
            stats.per_category.values().sum::<usize>(),
            stats.total_questions
        );
    }

    #[test]
    fn empty_manifest_stats() {
        let m = DatasetManifest::new(vec![], "", CreatedWith::default());
        let stats = dataset_stats(&m);
        assert_eq!(stats.total_questions, 0);
        assert!(stats.per_category.is_empty());
        assert_eq!(stats.images, 0);
    }

    #[test]
    fn round_trip_identity() {
        let m = synthetic_manifest(5, 3, 4);
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("d.jsonl");
        write_dataset(&m, &path).unwrap();
        let back = read_dataset(&path).unwrap();
        assert_eq!(m, back);
    }

    #[test]
    fn truncated_line_names_line_number() {
        let m = synthetic_manifest(2, 0, 0);
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("d.jsonl");
        write_dataset(&m, &path).unwrap();
        let mut text = std::fs::read_to_string(&path).unwrap();
        text.truncate(text.len() - 20);
        std::fs::write(&path, text).unwrap();
        match read_dataset(&path).unwrap_err() {
            DatasetError::Schema { line, .. } => assert_eq!(line, 3),
            other => panic!("unexpected error {other}"),
        }
    }

    #[test]
    fn hybrid_split_is_one_to_one() {
        let m = synthetic_manifest(10, 10, 10);
        let (cmn, rand, hybrid) = make_bias_splits(&m, 2, 9).unwrap();
        assert_eq!(cmn.items.len(), 2);
        assert_eq!(rand.items.len(), 2);
        assert_eq!(hybrid.items.len(), 2);
        let commons = hybrid.items.iter().filter(|i| i.scheme == IdentifierScheme::Common).count();
        assert_eq!(commons, 1, "hybrid of n=2 holds one common and one random item");
    }

    #[test]
    fn oversized_split_errors() {
        let m = synthetic_manifest(4, 4, 4);
        assert!(make_bias_splits(&m, 100, 0).is_err());
    }

    #[test]
    fn splits_deterministic_under_seed() {
        let m = synthetic_manifest(30, 30, 40);
        let a = make_bias_splits(&m, 20, 5).unwrap();
        let b = make_bias_splits(&m, 20, 5).unwrap();
        assert_eq!(a.0, b.0);
        assert_eq!(a.1, b.1);
        assert_eq!(a.2, b.2);
    }
}
