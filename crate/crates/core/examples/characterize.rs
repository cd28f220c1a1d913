// Attribute extraction and the safe/risky breakdown tables.

use std::collections::HashMap;

use adrisk::characterize::{build_report, AttributeRecord, CharacterizationReport, Lexicons};
use adrisk::labelnet::{assign_labels, build_graph};
use adrisk::synthgen::{generate, ScenarioConfig};

pub fn run_example() -> adrisk::Result<CharacterizationReport> {
    let scenario = generate(&ScenarioConfig::default())?;
    let graph = build_graph(&scenario.records, &scenario.domains)?;
    let labels: HashMap<_, _> = assign_labels(&graph).into_iter().map(|(id, l)| (id, l.label)).collect();
    let lex = Lexicons::builtin();
    let attrs: Vec<AttributeRecord> = scenario
        .job_ads()
        .iter()
        .map(|r| AttributeRecord::extract(r, &lex))
        .collect();
    let report = build_report(&attrs, &labels)?;
    println!("{} ads: {} safe, {} risky", report.total, report.safe, report.risky);
    if let Some(g) = report.dimension("gender") {
        for r in &g.rows {
            println!("  gender {:<12} safe {:>5.1}%  risky {:>5.1}%", r.value, r.safe_share_pct, r.risky_share_pct);
        }
    }
    for m in report.location_match.iter().filter(|m| m.safe + m.risky > 0) {
        println!("  {:<30} {:>4} {:>4}", m.name, m.safe, m.risky);
    }
    Ok(report)
}

#[allow(dead_code)]
fn main() -> adrisk::Result<()> {
    run_example().map(|_| ())
}
