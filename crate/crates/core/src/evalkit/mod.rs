//! Stratified splits, metrics and the cross-validation report.

pub mod metrics;
pub mod report;
pub mod split;

pub use metrics::{average_precision, roc_auc, ConfusionMatrix, Metrics};
pub use report::{cross_validate, EvalReport, FoldOutput};
pub use split::{stratified_holdout, stratified_kfold, Fold};
