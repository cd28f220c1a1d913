//! Class rebalancing by downsampling the safe class.

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::corpus::AdId;
use crate::error::{Error, Result};
use crate::labelnet::RiskClass;
use crate::rng::DetRng;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Strategy {
    /// Risky records make up 20% of the sample.
    #[serde(rename = "moderate_80_20")]
    Moderate8020,
    /// Equal counts.
    #[serde(rename = "balanced_50_50")]
    Balanced5050,
}

impl Strategy {
    pub fn risky_fraction(self) -> f64 {
        match self {
            Strategy::Moderate8020 => 0.2,
            Strategy::Balanced5050 => 0.5,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Strategy::Moderate8020 => "moderate_80_20",
            Strategy::Balanced5050 => "balanced_50_50",
        }
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Strategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "moderate" | "moderate_80_20" | "80_20" => Ok(Strategy::Moderate8020),
            "balanced" | "balanced_50_50" | "50_50" => Ok(Strategy::Balanced5050),
            other => Err(Error::InvalidInput(format!("unknown sampling strategy `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SamplePlan {
    pub strategy: Strategy,
    pub seed: u64,
    pub risky_count: usize,
    pub safe_count: usize,
}

impl SamplePlan {
    /// `safe_count = round(risky_count * (1 - r) / r)`; exact for both
    /// supported ratios.
    pub fn new(strategy: Strategy, seed: u64, risky_count: usize) -> Self {
        let safe_count = match strategy {
            Strategy::Balanced5050 => risky_count,
            Strategy::Moderate8020 => risky_count * 4,
        };
        debug_assert_eq!(
            safe_count,
            (risky_count as f64 * (1.0 - strategy.risky_fraction()) / strategy.risky_fraction())
                .round() as usize
        );
        Self {
            strategy,
            seed,
            risky_count,
            safe_count,
        }
    }
}

/// Keep every risky item, draw the planned number of safe items uniformly
/// without replacement, then shuffle the union. Deterministic in
/// `(items, strategy, seed)`.
pub fn sample<T: Clone>(
    items: &[T],
    class_of: impl Fn(&T) -> RiskClass,
    strategy: Strategy,
    seed: u64,
) -> Result<(SamplePlan, Vec<T>)> {
    let (risky, mut safe): (Vec<&T>, Vec<&T>) =
        items.iter().partition(|t| class_of(t) == RiskClass::Risky);
    let plan = SamplePlan::new(strategy, seed, risky.len());
    if safe.len() < plan.safe_count {
        return Err(Error::InsufficientSafe {
            needed: plan.safe_count,
            available: safe.len(),
        });
    }
    let mut rng = DetRng::new(seed);
    rng.shuffle(&mut safe);
    let mut out: Vec<T> = risky
        .into_iter()
        .chain(safe.into_iter().take(plan.safe_count))
        .cloned()
        .collect();
    rng.shuffle(&mut out);
    Ok((plan, out))
}

/// Line of the sample manifest; `split` names the strategy that drew it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ManifestRow {
    pub id: AdId,
    pub label: RiskClass,
    pub split: Strategy,
}

pub fn write_manifest(path: &Path, rows: &[ManifestRow]) -> Result<()> {
    crate::io::write_jsonl(path, rows)
}

pub fn read_manifest(path: &Path) -> Result<Vec<ManifestRow>> {
    crate::io::read_jsonl(path)
}
