// Majority vote over per-model prediction rows, including a model that
// abstained on one ad.

use adrisk::ensemble::{tally, Ballot};
use adrisk::labelnet::RiskClass;
use adrisk::learners::Prediction;

fn row(id: &str, model: &str, label: Option<RiskClass>, score: Option<f64>) -> Prediction {
    Prediction {
        id: id.into(),
        score,
        label,
        model_name: model.into(),
    }
}

pub fn run_example() -> adrisk::Result<Ballot> {
    use RiskClass::*;
    let rows = vec![
        row("a", "logreg", Some(Risky), Some(0.8)),
        row("a", "ffnn", Some(Risky), Some(0.7)),
        row("a", "gbt", Some(Safe), Some(0.3)),
        row("b", "logreg", Some(Safe), Some(0.2)),
        row("b", "ffnn", Some(Risky), Some(0.6)),
        row("b", "gbt", None, None),
    ];
    let ballot = tally(rows)?;
    for p in ballot.predictions() {
        println!("{} -> {:?} (risky vote share {:?})", p.id, p.label, p.score);
    }
    Ok(ballot)
}

#[allow(dead_code)]
fn main() -> adrisk::Result<()> {
    run_example().map(|_| ())
}
