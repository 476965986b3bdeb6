//! Fact engine: symbolic derivation of semantic facts in the three
//! categories, each verified numerically against coordinates.

mod angles;
mod derive;
mod kinds;
mod verify;

pub use derive::{angle_relations, derive_facts, DeriveCtx, Provability, FACT_EPS};
pub use kinds::{classify_fact, Category, Derivation, ElementRef, Fact, FactKind};
pub use verify::{verify_fact, VerifyFailure};

use crate::geom::ConcreteScene;
use serde::{Deserialize, Serialize};

/// A solved scene together with its verified facts: the on-disk scene
/// document. Serializes canonically (sorted keys) for golden tests.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SceneDocument {
    pub v: u32,
    #[serde(flatten)]
    pub scene: ConcreteScene,
    pub facts: Vec<Fact>,
}

impl SceneDocument {
    pub fn new(scene: ConcreteScene) -> Self {
        let facts = derive_facts(&scene);
        SceneDocument { v: 1, scene, facts }
    }

    pub fn canonical_json(&self) -> String {
        crate::util::canonical_json(self)
    }
}
