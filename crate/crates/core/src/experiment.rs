//! Training the native learners and cross-validating them with the
//! majority-vote ensemble.

use ndarray::{Array2, Axis};
use serde::{Deserialize, Serialize};

use crate::ensemble::{majority_vote, ENSEMBLE_MODEL_NAME};
use crate::error::{Error, Result};
use crate::evalkit::{cross_validate, EvalReport, FoldOutput};
use crate::labelnet::RiskClass;
use crate::learners::{
    label_for, train_ffnn, train_gbt, train_logreg, FfnnConfig, GbtGrid, GbtParams, LogRegConfig, Model,
    Validation,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModelKind {
    LogReg,
    Ffnn,
    Gbt,
}

impl ModelKind {
    pub const ALL: [ModelKind; 3] = [ModelKind::LogReg, ModelKind::Ffnn, ModelKind::Gbt];

    pub fn name(self) -> &'static str {
        match self {
            ModelKind::LogReg => "logreg",
            ModelKind::Ffnn => "ffnn",
            ModelKind::Gbt => "gbt",
        }
    }
}

impl std::str::FromStr for ModelKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "logreg" | "lr" | "logistic" => Ok(ModelKind::LogReg),
            "ffnn" | "mlp" => Ok(ModelKind::Ffnn),
            "gbt" | "xgboost" | "boosting" => Ok(ModelKind::Gbt),
            other => Err(Error::Config(format!("unknown model kind {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GbtSettings {
    pub grid: GbtGrid,
    pub lambda: f64,
    pub gamma: f64,
    pub min_child_weight: f64,
    /// Stratified holdout used to score grid cells.
    pub validation_fraction: f64,
    pub memory_budget_bytes: usize,
}

impl Default for GbtSettings {
    fn default() -> Self {
        let base = GbtParams::default();
        Self {
            grid: GbtGrid::default(),
            lambda: base.lambda,
            gamma: base.gamma,
            min_child_weight: base.min_child_weight,
            validation_fraction: 0.1,
            memory_budget_bytes: crate::learners::gbt::DEFAULT_MEMORY_BUDGET,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TrainConfig {
    pub logreg: LogRegConfig,
    pub ffnn: FfnnConfig,
    pub gbt: GbtSettings,
    pub seed: u64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            logreg: LogRegConfig::default(),
            ffnn: FfnnConfig::default(),
            gbt: GbtSettings::default(),
            seed: crate::rng::DEFAULT_SEED,
        }
    }
}

pub fn train_model(kind: ModelKind, x: &Array2<f64>, y: &[u8], cfg: &TrainConfig) -> Result<Model> {
    Ok(match kind {
        ModelKind::LogReg => Model::LogReg(train_logreg(x, y, &cfg.logreg)?.0),
        ModelKind::Ffnn => {
            let ffnn = FfnnConfig {
                seed: cfg.seed,
                ..cfg.ffnn.clone()
            };
            Model::Ffnn(train_ffnn(x, y, &ffnn)?.0)
        }
        ModelKind::Gbt => {
            let base = GbtParams {
                lambda: cfg.gbt.lambda,
                gamma: cfg.gbt.gamma,
                min_child_weight: cfg.gbt.min_child_weight,
                seed: cfg.seed,
                ..GbtParams::default()
            };
            let search = train_gbt(
                x,
                y,
                &cfg.gbt.grid,
                &base,
                Validation::Holdout {
                    fraction: cfg.gbt.validation_fraction,
                    seed: cfg.seed,
                },
                cfg.gbt.memory_budget_bytes,
            )?;
            log::info!("gbt grid winner: {:?}", search.best);
            Model::Gbt(search.model)
        }
    })
}

/// k-fold reports for each model kind, then for their majority vote (scored
/// by the fraction of Risky votes).
pub fn cross_validate_models(
    x: &Array2<f64>,
    y: &[u8],
    kinds: &[ModelKind],
    cfg: &TrainConfig,
    k: usize,
) -> Result<Vec<EvalReport>> {
    if kinds.is_empty() {
        return Err(Error::InvalidInput("no model kinds selected".into()));
    }
    cross_validate(y, k, cfg.seed, |f, fold| {
        let xtr = x.select(Axis(0), &fold.train);
        let ytr: Vec<u8> = fold.train.iter().map(|&i| y[i]).collect();
        let xte = x.select(Axis(0), &fold.test);
        let mut outputs = Vec::new();
        let mut ballots: Vec<Vec<RiskClass>> = vec![Vec::new(); fold.test.len()];
        for &kind in kinds {
            let model = train_model(kind, &xtr, &ytr, cfg)?;
            let scores = model.scores(xte.view())?;
            let labels: Vec<RiskClass> = scores.iter().map(|s| label_for(*s)).collect();
            for (b, l) in ballots.iter_mut().zip(&labels) {
                b.push(*l);
            }
            log::info!("fold {} {} done", f + 1, kind.name());
            outputs.push(FoldOutput {
                model: kind.name().into(),
                predicted: labels.iter().map(|l| l.as_target()).collect(),
                scores: Some(scores),
            });
        }
        let votes: Vec<RiskClass> = ballots.iter().map(|b| majority_vote(b)).collect();
        let frac: Vec<f64> = ballots
            .iter()
            .map(|b| b.iter().filter(|l| **l == RiskClass::Risky).count() as f64 / b.len() as f64)
            .collect();
        outputs.push(FoldOutput {
            model: ENSEMBLE_MODEL_NAME.into(),
            predicted: votes.iter().map(|l| l.as_target()).collect(),
            scores: Some(frac),
        });
        Ok(outputs)
    })
}
