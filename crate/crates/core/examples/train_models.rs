// Train the three native learners on a small labeled embedding set, save
// each to the versioned model file and predict from the reloaded copy.

use adrisk::embedstore::{join, pseudo_embed, MissingPolicy};
use adrisk::experiment::{train_model, ModelKind, TrainConfig};
use adrisk::labelnet::{assign_labels, build_graph};
use adrisk::learners::{load_model, predict, save_model, GbtGrid, GbtParams, Prediction};
use adrisk::synthgen::{generate, ScenarioConfig};

pub fn run_example() -> adrisk::Result<Vec<Vec<Prediction>>> {
    let scenario = generate(&ScenarioConfig {
        n_legit_recruiters: 80,
        n_traffickers: 20,
        ..ScenarioConfig::default()
    })?;
    let graph = build_graph(&scenario.records, &scenario.domains)?;
    let labels: Vec<_> = assign_labels(&graph).into_iter().map(|(id, l)| (id, l.label)).collect();
    let data = join(&pseudo_embed(scenario.job_ads(), 32, 42)?, &labels, MissingPolicy::Strict)?;

    let mut cfg = TrainConfig::default();
    cfg.ffnn.hidden = vec![32, 16];
    cfg.gbt.grid = GbtGrid::single(&GbtParams {
        n_trees: 50,
        max_depth: 3,
        ..GbtParams::default()
    });

    let dir = std::env::temp_dir().join(format!("adrisk-models-{}", std::process::id()));
    std::fs::create_dir_all(&dir).map_err(|e| adrisk::Error::io(&dir, e))?;
    let mut all = Vec::new();
    for kind in ModelKind::ALL {
        let model = train_model(kind, &data.x, &data.y, &cfg)?;
        let path = dir.join(format!("{}.json", kind.name()));
        save_model(&model, &path)?;
        let loaded = load_model(&path)?;
        let preds = predict(&loaded, &data.ids, data.x.view(), kind.name())?;
        let correct = preds
            .iter()
            .zip(&data.y)
            .filter(|(p, y)| p.label.map(|l| l.as_target()) == Some(**y))
            .count();
        println!("{:>6}: training accuracy {}/{}", kind.name(), correct, data.y.len());
        all.push(preds);
    }
    let _ = std::fs::remove_dir_all(&dir);
    Ok(all)
}

#[allow(dead_code)]
fn main() -> adrisk::Result<()> {
    run_example().map(|_| ())
}
