use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::metrics::{ConfusionMatrix, Metrics};
use super::split::{stratified_kfold, Fold};
use crate::error::{Error, Result};

/// Per-fold rows for one model plus their mean.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub model: String,
    pub folds: Vec<Metrics>,
    pub mean: Metrics,
}

fn mean_of(rows: &[Metrics], get: impl Fn(&Metrics) -> f64) -> f64 {
    rows.iter().map(get).sum::<f64>() / rows.len() as f64
}

fn mean_opt(rows: &[Metrics], get: impl Fn(&Metrics) -> Option<f64>) -> Option<f64> {
    let vals: Vec<f64> = rows.iter().filter_map(get).collect();
    if vals.is_empty() {
        None
    } else {
        Some(vals.iter().sum::<f64>() / vals.len() as f64)
    }
}

impl EvalReport {
    pub fn new(model: impl Into<String>, folds: Vec<Metrics>) -> Result<Self> {
        if folds.is_empty() {
            return Err(Error::InvalidInput("report needs at least one fold".into()));
        }
        let confusion = folds.iter().fold(ConfusionMatrix::default(), |a, m| ConfusionMatrix {
            tp: a.tp + m.confusion.tp,
            fp: a.fp + m.confusion.fp,
            fn_: a.fn_ + m.confusion.fn_,
            tn: a.tn + m.confusion.tn,
        });
        let mean = Metrics {
            confusion,
            precision: mean_of(&folds, |m| m.precision),
            recall: mean_of(&folds, |m| m.recall),
            accuracy: mean_of(&folds, |m| m.accuracy),
            f1: mean_of(&folds, |m| m.f1),
            roc_auc: mean_opt(&folds, |m| m.roc_auc),
            pr_auc: mean_opt(&folds, |m| m.pr_auc),
            f1_safe: mean_of(&folds, |m| m.f1_safe),
            f1_risky: mean_of(&folds, |m| m.f1_risky),
            macro_precision: mean_of(&folds, |m| m.macro_precision),
            macro_recall: mean_of(&folds, |m| m.macro_recall),
            macro_f1: mean_of(&folds, |m| m.macro_f1),
            warnings: Vec::new(),
        };
        Ok(Self {
            model: model.into(),
            folds,
            mean,
        })
    }
}

fn opt(v: Option<f64>) -> String {
    v.map_or_else(|| "n/a".to_string(), |v| format!("{v:.4}"))
}

/// Mean rows, risky-class block then macro block, columns
/// Precision, Recall, Accuracy, ROC-AUC, F1 (PR-AUC appended).
pub fn render_table(reports: &[EvalReport]) -> String {
    let width = reports.iter().map(|r| r.model.len()).max().unwrap_or(5).max(5);
    let mut out = String::new();
    for (title, macro_avg) in [("risky class", false), ("macro average", true)] {
        let _ = writeln!(out, "[{title}]");
        let _ = writeln!(
            out,
            "{:<width$}  {:>9}  {:>9}  {:>9}  {:>9}  {:>9}  {:>9}",
            "Model", "Precision", "Recall", "Accuracy", "ROC-AUC", "F1", "PR-AUC"
        );
        for r in reports {
            let m = &r.mean;
            let (p, rc, f1) = if macro_avg {
                (m.macro_precision, m.macro_recall, m.macro_f1)
            } else {
                (m.precision, m.recall, m.f1)
            };
            let _ = writeln!(
                out,
                "{:<width$}  {:>9.4}  {:>9.4}  {:>9.4}  {:>9}  {:>9.4}  {:>9}",
                r.model,
                p,
                rc,
                m.accuracy,
                opt(m.roc_auc),
                f1,
                opt(m.pr_auc)
            );
        }
    }
    out
}

/// Predictions for one fold's test rows, in `fold.test` order.
#[derive(Debug, Clone)]
pub struct FoldOutput {
    pub model: String,
    pub predicted: Vec<u8>,
    pub scores: Option<Vec<f64>>,
}

/// Stratified k-fold driver. `run` receives each fold and returns one
/// output per model; reports come back in first-seen model order.
pub fn cross_validate<F>(y: &[u8], k: usize, seed: u64, mut run: F) -> Result<Vec<EvalReport>>
where
    F: FnMut(usize, &Fold) -> Result<Vec<FoldOutput>>,
{
    let folds = stratified_kfold(y, k, seed)?;
    let mut names: Vec<String> = Vec::new();
    let mut rows: Vec<Vec<Metrics>> = Vec::new();
    for (f, fold) in folds.iter().enumerate() {
        let truth: Vec<u8> = fold.test.iter().map(|&i| y[i]).collect();
        for out in run(f, fold)? {
            if out.predicted.len() != truth.len()
                || out.scores.as_ref().is_some_and(|s| s.len() != truth.len())
            {
                return Err(Error::InvalidInput(format!(
                    "model {} returned {} predictions for {} test rows",
                    out.model,
                    out.predicted.len(),
                    truth.len()
                )));
            }
            let m = Metrics::compute(&out.predicted, out.scores.as_deref(), &truth);
            match names.iter().position(|n| *n == out.model) {
                Some(i) => rows[i].push(m),
                None => {
                    names.push(out.model);
                    rows.push(vec![m]);
                }
            }
        }
    }
    names
        .into_iter()
        .zip(rows)
        .map(|(n, r)| EvalReport::new(n, r))
        .collect()
}
