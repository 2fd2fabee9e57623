//! Reproducible collections of random bodies.
//!
//! ```json
//! {"entries": [{"family": "random_hull", "dim": 2, "params": {"count": 12},
//!               "first_seed": 1, "last_seed": 100}]}
//! ```

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{LabError, Result};
use crate::families::{Family, FamilySpec};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CorpusEntry {
    pub family: Family,
    pub dim: usize,
    #[serde(default)]
    pub params: BTreeMap<String, f64>,
    pub first_seed: u64,
    pub last_seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Corpus {
    #[serde(default)]
    pub description: String,
    pub entries: Vec<CorpusEntry>,
}

impl Corpus {
    pub fn from_json(text: &str) -> Result<Self> {
        let corpus: Corpus =
            serde_json::from_str(text).map_err(|e| LabError::InvalidInput(format!("corpus: {e}")))?;
        for e in &corpus.entries {
            if e.first_seed > e.last_seed {
                return Err(LabError::InvalidInput(format!(
                    "corpus seeds {}..{} are reversed",
                    e.first_seed, e.last_seed
                )));
            }
        }
        Ok(corpus)
    }

    /// Every member, in entry order and then seed order.
    pub fn specs(&self) -> Vec<FamilySpec> {
        self.entries
            .iter()
            .flat_map(|e| {
                (e.first_seed..=e.last_seed).map(move |seed| FamilySpec {
                    family: e.family,
                    dim: e.dim,
                    params: e.params.clone(),
                    seed,
                })
            })
            .collect()
    }
}
