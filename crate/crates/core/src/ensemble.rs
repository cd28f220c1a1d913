//! Strict-majority voting over per-model prediction labels.

use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::labelnet::RiskClass;
use crate::learners::{read_predictions, Prediction};

pub const ENSEMBLE_MODEL_NAME: &str = "trafficker_classifier";

/// Risky only when Risky votes are strictly more than half; a tie is Safe.
/// An empty ballot is Safe.
pub fn majority_vote(votes: &[RiskClass]) -> RiskClass {
    let risky = votes.iter().filter(|v| **v == RiskClass::Risky).count();
    if 2 * risky > votes.len() {
        RiskClass::Risky
    } else {
        RiskClass::Safe
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VoteSet {
    pub id: String,
    pub votes: BTreeMap<String, RiskClass>,
    /// Models that returned no label for this id.
    #[serde(default, skip_serializing_if = "BTreeSet::is_empty")]
    pub abstained: BTreeSet<String>,
    pub label: RiskClass,
    /// False when some model has no prediction for this id.
    pub complete: bool,
}

impl VoteSet {
    pub fn risky_fraction(&self) -> f64 {
        if self.votes.is_empty() {
            return 0.0;
        }
        let risky = self.votes.values().filter(|v| **v == RiskClass::Risky).count();
        risky as f64 / self.votes.len() as f64
    }

    pub fn to_prediction(&self) -> Prediction {
        Prediction {
            id: self.id.clone(),
            score: Some(self.risky_fraction()),
            label: Some(self.label),
            model_name: ENSEMBLE_MODEL_NAME.into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Ballot {
    pub models: Vec<String>,
    pub sets: Vec<VoteSet>,
}

impl Ballot {
    pub fn incomplete(&self) -> Vec<&str> {
        self.sets
            .iter()
            .filter(|s| !s.complete)
            .map(|s| s.id.as_str())
            .collect()
    }

    pub fn predictions(&self) -> Vec<Prediction> {
        self.sets.iter().map(VoteSet::to_prediction).collect()
    }
}

/// Group predictions by id and vote. Duplicate `(id, model_name)` pairs are
/// an error; ids missing from some model are kept but flagged. Abstentions
/// count as present but cast no vote.
pub fn tally(predictions: impl IntoIterator<Item = Prediction>) -> Result<Ballot> {
    let mut by_id: BTreeMap<String, BTreeMap<String, Option<RiskClass>>> = BTreeMap::new();
    let mut models = BTreeSet::new();
    for p in predictions {
        models.insert(p.model_name.clone());
        let slot = by_id.entry(p.id.clone()).or_default();
        if slot.insert(p.model_name.clone(), p.label).is_some() {
            return Err(Error::DuplicateVote {
                id: p.id,
                model: p.model_name,
            });
        }
    }
    let sets: Vec<VoteSet> = by_id
        .into_iter()
        .map(|(id, entries)| {
            let complete = entries.len() == models.len();
            let mut votes = BTreeMap::new();
            let mut abstained = BTreeSet::new();
            for (model, label) in entries {
                match label {
                    Some(l) => {
                        votes.insert(model, l);
                    }
                    None => {
                        abstained.insert(model);
                    }
                }
            }
            let ballot: Vec<RiskClass> = votes.values().copied().collect();
            VoteSet {
                complete,
                label: majority_vote(&ballot),
                id,
                votes,
                abstained,
            }
        })
        .collect();
    let flagged = sets.iter().filter(|s| !s.complete).count();
    if flagged > 0 {
        log::warn!("{flagged} ids lack a prediction from every model");
    }
    Ok(Ballot {
        models: models.into_iter().collect(),
        sets,
    })
}

pub fn load_predictions<P: AsRef<Path>>(paths: &[P]) -> Result<Ballot> {
    if paths.is_empty() {
        return Err(Error::InvalidInput("no prediction files given".into()));
    }
    let mut all = Vec::new();
    for p in paths {
        all.extend(read_predictions(p.as_ref())?);
    }
    tally(all)
}
