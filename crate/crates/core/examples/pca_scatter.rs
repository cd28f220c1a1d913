// Two-component projection of labeled embeddings for a scatter plot.

use adrisk::embedstore::{join, pseudo_embed, MissingPolicy};
use adrisk::labelnet::{assign_labels, build_graph, RiskClass};
use adrisk::learners::{pca_project, Pca};
use adrisk::synthgen::{generate, ScenarioConfig};

pub fn run_example() -> adrisk::Result<(Pca, Vec<u8>)> {
    let scenario = generate(&ScenarioConfig::default())?;
    let graph = build_graph(&scenario.records, &scenario.domains)?;
    let labels: Vec<_> = assign_labels(&graph).into_iter().map(|(id, l)| (id, l.label)).collect();
    let data = join(&pseudo_embed(scenario.job_ads(), 32, 42)?, &labels, MissingPolicy::Strict)?;
    let pca = pca_project(&data.x, 2, 42)?;
    println!("explained variance {:?}", pca.explained_variance);
    for class in [RiskClass::Safe, RiskClass::Risky] {
        let rows: Vec<usize> = (0..data.y.len()).filter(|&i| data.y[i] == class.as_target()).collect();
        let mean = |c: usize| rows.iter().map(|&i| pca.coords[[i, c]]).sum::<f64>() / rows.len() as f64;
        println!("{:>5}: n={} centroid ({:.3}, {:.3})", class.as_str(), rows.len(), mean(0), mean(1));
    }
    Ok((pca, data.y))
}

#[allow(dead_code)]
fn main() -> adrisk::Result<()> {
    run_example().map(|_| ())
}
