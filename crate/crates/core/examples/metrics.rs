// Confusion-matrix metrics, threshold-free ranking metrics and stratified
// k-fold cross-validation of a trivial scorer.

use adrisk::evalkit::report::render_table;
use adrisk::evalkit::{cross_validate, EvalReport, FoldOutput, Metrics};

pub fn run_example() -> adrisk::Result<(Metrics, Vec<EvalReport>)> {
    let truth = [1, 1, 1, 0, 0, 0, 0, 1];
    let scores = [0.9, 0.7, 0.4, 0.35, 0.2, 0.6, 0.1, 0.8];
    let predicted: Vec<u8> = scores.iter().map(|s| (*s >= 0.5) as u8).collect();
    let m = Metrics::compute(&predicted, Some(&scores), &truth);
    println!(
        "precision {:.3} recall {:.3} f1 {:.3} roc-auc {:?} pr-auc {:?}",
        m.precision, m.recall, m.f1, m.roc_auc, m.pr_auc
    );

    let y: Vec<u8> = (0..40).map(|i| (i % 4 == 0) as u8).collect();
    let feature: Vec<f64> = (0..40).map(|i| if i % 4 == 0 { 0.8 } else { 0.2 } + (i % 3) as f64 * 0.1).collect();
    let reports = cross_validate(&y, 5, 42, |_, fold| {
        let scores: Vec<f64> = fold.test.iter().map(|&i| feature[i]).collect();
        Ok(vec![FoldOutput {
            model: "threshold".into(),
            predicted: scores.iter().map(|s| (*s >= 0.5) as u8).collect(),
            scores: Some(scores),
        }])
    })?;
    print!("{}", render_table(&reports));
    Ok((m, reports))
}

#[allow(dead_code)]
fn main() -> adrisk::Result<()> {
    run_example().map(|_| ())
}
