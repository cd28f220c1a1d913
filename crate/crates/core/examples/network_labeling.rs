// Phone co-occurrence labeling on a planted scenario: a job ad is risky when
// one of its phones also appears on an escort domain.

use std::collections::BTreeMap;

use adrisk::corpus::AdId;
use adrisk::labelnet::{assign_labels, build_graph, risky_phones, RiskClass};
use adrisk::synthgen::{generate, ScenarioConfig};

pub fn run_example() -> adrisk::Result<(BTreeMap<AdId, RiskClass>, BTreeMap<AdId, RiskClass>)> {
    let scenario = generate(&ScenarioConfig::default())?;
    let graph = build_graph(&scenario.records, &scenario.domains)?;
    let labels = assign_labels(&graph);
    let risky = labels.values().filter(|l| l.label == RiskClass::Risky).count();
    println!(
        "{} job ads, {} risky, {} shared phones",
        labels.len(),
        risky,
        risky_phones(&labels).len()
    );
    if let Some((id, l)) = labels.iter().find(|(_, l)| l.label == RiskClass::Risky) {
        for e in &l.evidence {
            println!("  {id}: {} also on {}", e.phone.digits(), e.domain);
        }
    }
    let got = labels.into_iter().map(|(k, v)| (k, v.label)).collect();
    Ok((got, scenario.truth))
}

#[allow(dead_code)]
fn main() -> adrisk::Result<()> {
    let (got, truth) = run_example()?;
    println!("matches planted truth: {}", got == truth);
    Ok(())
}
