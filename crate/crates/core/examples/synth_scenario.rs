// Planted scenario generation. Trafficker ads are only detectable through
// phones cross-posted to escort domains, so with no cross-posting the
// network labels find nothing.

use adrisk::labelnet::{assign_labels, build_graph, RiskClass};
use adrisk::synthgen::{generate, Scenario, ScenarioConfig};

pub fn run_example() -> adrisk::Result<(Scenario, Scenario)> {
    let full = generate(&ScenarioConfig::default())?;
    let none = generate(&ScenarioConfig {
        cross_posting_prob: 0.0,
        ..ScenarioConfig::default()
    })?;
    for (name, s) in [("cross-posting 1.0", &full), ("cross-posting 0.0", &none)] {
        let planted = s.truth.values().filter(|l| **l == RiskClass::Risky).count();
        let found = assign_labels(&build_graph(&s.records, &s.domains)?)
            .values()
            .filter(|l| l.label == RiskClass::Risky)
            .count();
        println!(
            "{name}: {} job ads, {} escort ads, {planted} trafficker ads, {found} labeled risky",
            s.job_ads().len(),
            s.escort_ads,
        );
    }
    Ok((full, none))
}

#[allow(dead_code)]
fn main() -> adrisk::Result<()> {
    run_example().map(|_| ())
}
