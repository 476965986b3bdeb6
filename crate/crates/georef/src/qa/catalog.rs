//! Question phrasing catalog: per fact kind, one to three templates with
//! `{m1}`/`{m2}`/`{m3}` slots for the mentioned elements and
//! `{target_type}` for the answer element's type word. Shipped as a data
//! file and overridable by flag.

use crate::facts::FactKind;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::path::Path;
use thiserror::Error;

const DEFAULT_CATALOG: &str = include_str!("../../templates/questions.json");

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct QuestionTemplate {
    pub id: String,
    pub text: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct QuestionCatalog {
    #[serde(flatten)]
    pub by_kind: BTreeMap<String, Vec<QuestionTemplate>>,
}

#[derive(Debug, Error)]
pub enum CatalogError {
    #[error("catalog i/o: {0}")]
    Io(#[from] std::io::Error),
    #[error("catalog parse: {0}")]
    Parse(#[from] serde_json::Error),
    #[error("catalog has no templates for fact kind {0}")]
    MissingKind(String),
    #[error("catalog has {got} templates for {kind}; between 1 and 3 are allowed")]
    BadCount { kind: String, got: usize },
}

fn kind_name(kind: FactKind) -> String {
    format!("{kind:?}")
}

impl QuestionCatalog {
    pub fn default_catalog() -> Self {
        let catalog: QuestionCatalog =
            serde_json::from_str(DEFAULT_CATALOG).expect("bundled catalog parses");
        catalog.validate().expect("bundled catalog is complete");
        catalog
    }

    pub fn from_path(path: &Path) -> Result<Self, CatalogError> {
        let text = std::fs::read_to_string(path)?;
        let catalog: QuestionCatalog = serde_json::from_str(&text)?;
        catalog.validate()?;
        Ok(catalog)
    }

    /// Every fact kind must have one to three phrasings.
    pub fn validate(&self) -> Result<(), CatalogError> {
        for kind in FactKind::ALL {
            let name = kind_name(kind);
            match self.by_kind.get(&name) {
                None => return Err(CatalogError::MissingKind(name)),
                Some(ts) if ts.is_empty() || ts.len() > 3 => {
                    return Err(CatalogError::BadCount { kind: name, got: ts.len() })
                }
                Some(_) => {}
            }
        }
        Ok(())
    }

    pub fn templates(&self, kind: FactKind) -> &[QuestionTemplate] {
        self.by_kind
            .get(&kind_name(kind))
            .map(|v| v.as_slice())
            .unwrap_or(&[])
    }
}

/// Noun phrases used to reference a fact's target inside a two-step
/// question, e.g. "the vertical angle of angle DEA".
pub fn inner_phrase(kind: FactKind, mentioned: &str) -> Option<String> {
    let text = match kind {
        FactKind::VerticalAngles => format!("the vertical angle of {mentioned}"),
        FactKind::AlternateInteriorAngles => {
            format!("the angle forming alternate interior angles with {mentioned}")
        }
        FactKind::CorrespondingAngles => {
            format!("the angle forming corresponding angles with {mentioned}")
        }
        FactKind::EqualAngles => format!("the angle equal to {mentioned}"),
        FactKind::Midpoint => format!("the midpoint of {mentioned}"),
        _ => return None,
    };
    Some(text)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bundled_catalog_covers_every_kind() {
        let c = QuestionCatalog::default_catalog();
        for kind in FactKind::ALL {
            assert!(!c.templates(kind).is_empty(), "{kind:?} missing");
        }
    }
}
