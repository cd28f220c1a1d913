// Synthetic corpus → network labels → pseudo-embeddings → 5-fold CV of the
// three native learners and their majority vote.

use adrisk::embedstore::{join, pseudo_embed, MissingPolicy};
use adrisk::evalkit::{report::render_table, EvalReport};
use adrisk::experiment::{cross_validate_models, ModelKind, TrainConfig};
use adrisk::labelnet::{assign_labels, build_graph};
use adrisk::learners::GbtGrid;
use adrisk::synthgen::{generate, ScenarioConfig};

pub fn run_example() -> adrisk::Result<Vec<EvalReport>> {
    let scenario = generate(&ScenarioConfig {
        n_legit_recruiters: 800,
        n_traffickers: 200,
        ads_per_entity: (5, 5),
        phones_per_entity: (1, 1),
        ..ScenarioConfig::default()
    })?;
    let graph = build_graph(&scenario.records, &scenario.domains)?;
    let labels: Vec<_> = assign_labels(&graph)
        .into_iter()
        .map(|(id, l)| (id, l.label))
        .collect();
    let matrix = pseudo_embed(scenario.job_ads(), 64, 42)?;
    let data = join(&matrix, &labels, MissingPolicy::Strict)?;

    let mut cfg = TrainConfig::default();
    cfg.gbt.grid = GbtGrid {
        n_trees: vec![100, 200],
        max_depth: vec![4],
        learning_rate: vec![0.1],
        subsample: vec![0.8],
        colsample: vec![0.8],
    };
    let reports = cross_validate_models(&data.x, &data.y, &ModelKind::ALL, &cfg, 5)?;
    print!("{}", render_table(&reports));
    Ok(reports)
}

#[allow(dead_code)]
fn main() -> adrisk::Result<()> {
    run_example().map(|_| ())
}
