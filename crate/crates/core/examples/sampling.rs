// Balanced and moderate training manifests drawn from one label set.

use adrisk::corpus::AdId;
use adrisk::labelnet::RiskClass;
use adrisk::sampler::{sample, SamplePlan, Strategy};

type Drawn = (SamplePlan, Vec<(AdId, RiskClass)>);

pub fn run_example() -> adrisk::Result<Vec<Drawn>> {
    let mut labels: Vec<(AdId, RiskClass)> = (0..300u64).map(|i| (AdId(i), RiskClass::Risky)).collect();
    labels.extend((300..5_000u64).map(|i| (AdId(i), RiskClass::Safe)));
    let mut out = Vec::new();
    for strategy in [Strategy::Balanced5050, Strategy::Moderate8020] {
        let (plan, picked) = sample(&labels, |(_, l)| *l, strategy, 42)?;
        println!(
            "{}: {} risky + {} safe = {}",
            strategy.name(),
            plan.risky_count,
            plan.safe_count,
            picked.len()
        );
        out.push((plan, picked));
    }
    Ok(out)
}

#[allow(dead_code)]
fn main() -> adrisk::Result<()> {
    run_example().map(|_| ())
}
