//! Phone-number co-occurrence network and the one-hop risk labeling rule.
//!
//! An ad on a labor-side domain is Risky when one of its phone numbers also
//! appears on a domain categorized as `escort`; otherwise Safe. Ads posted on
//! escort domains are label sources and receive no label themselves.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::corpus::{AdId, AdRecord, DomainInfo, NormalizedPhone, ESCORT, UNCATEGORIZED};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RiskClass {
    #[serde(alias = "Safe", alias = "SAFE")]
    Safe,
    #[serde(alias = "Risky", alias = "RISKY")]
    Risky,
}

impl RiskClass {
    pub fn as_target(self) -> u8 {
        match self {
            RiskClass::Safe => 0,
            RiskClass::Risky => 1,
        }
    }

    pub fn from_target(y: u8) -> Self {
        if y == 0 {
            RiskClass::Safe
        } else {
            RiskClass::Risky
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            RiskClass::Safe => "safe",
            RiskClass::Risky => "risky",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LabelSource {
    Direct,
    Augmented,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Evidence {
    pub phone: NormalizedPhone,
    pub domain: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RiskLabel {
    pub label: RiskClass,
    pub source: LabelSource,
    pub evidence: BTreeSet<Evidence>,
}

impl RiskLabel {
    fn direct(evidence: BTreeSet<Evidence>) -> Self {
        let label = if evidence.is_empty() {
            RiskClass::Safe
        } else {
            RiskClass::Risky
        };
        Self {
            label,
            source: LabelSource::Direct,
            evidence,
        }
    }
}

/// Bipartite ad↔phone and phone↔domain structure.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ContactGraph {
    pub ad_phones: BTreeMap<AdId, BTreeSet<NormalizedPhone>>,
    pub phone_domains: BTreeMap<NormalizedPhone, BTreeSet<String>>,
    pub domain_category: BTreeMap<String, String>,
    pub ad_domain: BTreeMap<AdId, String>,
}

impl ContactGraph {
    pub fn is_escort(&self, domain: &str) -> bool {
        self.domain_category.get(domain).map(String::as_str) == Some(ESCORT)
    }

    fn escort_evidence(&self, phones: &BTreeSet<NormalizedPhone>) -> BTreeSet<Evidence> {
        let mut evidence = BTreeSet::new();
        for phone in phones {
            if let Some(domains) = self.phone_domains.get(phone) {
                for d in domains.iter().filter(|d| self.is_escort(d)) {
                    evidence.insert(Evidence {
                        phone: *phone,
                        domain: d.clone(),
                    });
                }
            }
        }
        evidence
    }
}

fn category_map(domains: &[DomainInfo]) -> HashMap<&str, &str> {
    domains
        .iter()
        .map(|d| (d.name.as_str(), d.category.as_str()))
        .collect()
}

pub fn build_graph(records: &[AdRecord], domains: &[DomainInfo]) -> Result<ContactGraph> {
    let categories = category_map(domains);
    let mut offending: BTreeSet<String> = BTreeSet::new();
    let mut graph = ContactGraph::default();
    for r in records {
        match categories.get(r.domain.as_str()) {
            Some(cat) if *cat != UNCATEGORIZED => {
                graph
                    .domain_category
                    .insert(r.domain.clone(), cat.to_string());
            }
            _ => {
                offending.insert(r.domain.clone());
                continue;
            }
        }
        graph.ad_phones.insert(r.id, r.phones.clone());
        graph.ad_domain.insert(r.id, r.domain.clone());
        for p in &r.phones {
            graph
                .phone_domains
                .entry(*p)
                .or_default()
                .insert(r.domain.clone());
        }
    }
    if !offending.is_empty() {
        return Err(Error::UncategorizedDomains(offending.into_iter().collect()));
    }
    Ok(graph)
}

/// Label every ad that is not itself on an escort domain.
pub fn assign_labels(graph: &ContactGraph) -> BTreeMap<AdId, RiskLabel> {
    graph
        .ad_phones
        .iter()
        .filter(|(id, _)| !graph.is_escort(&graph.ad_domain[*id]))
        .map(|(id, phones)| (*id, RiskLabel::direct(graph.escort_evidence(phones))))
        .collect()
}

/// Phones carrying direct Risky evidence.
pub fn risky_phones(labels: &BTreeMap<AdId, RiskLabel>) -> BTreeSet<NormalizedPhone> {
    labels
        .values()
        .flat_map(|l| l.evidence.iter().map(|e| e.phone))
        .collect()
}

/// Externally sourced pages that share a risk-labeled phone become extra
/// Risky samples. Pages without such a phone are discarded, not labeled Safe.
pub fn augment_risky(
    graph: &ContactGraph,
    extra_records: &[AdRecord],
    risky: &BTreeSet<NormalizedPhone>,
) -> Vec<(AdRecord, RiskLabel)> {
    extra_records
        .iter()
        .filter_map(|r| {
            let triggering: BTreeSet<NormalizedPhone> =
                r.phones.intersection(risky).copied().collect();
            if triggering.is_empty() {
                return None;
            }
            let evidence = graph.escort_evidence(&triggering);
            Some((
                r.clone(),
                RiskLabel {
                    label: RiskClass::Risky,
                    source: LabelSource::Augmented,
                    evidence,
                },
            ))
        })
        .collect()
}

/// Brute-force labeling with no graph: for each labor-side ad and each of its
/// phones, scan every (ad, phone, domain) occurrence for an escort domain.
pub fn label_oracle(records: &[AdRecord], domains: &[DomainInfo]) -> BTreeMap<AdId, RiskLabel> {
    let categories = category_map(domains);
    let is_escort = |domain: &str| categories.get(domain).copied() == Some(ESCORT);
    let triples: Vec<(&NormalizedPhone, &str)> = records
        .iter()
        .flat_map(|r| r.phones.iter().map(move |p| (p, r.domain.as_str())))
        .collect();
    let mut out = BTreeMap::new();
    for ad in records {
        if is_escort(&ad.domain) {
            continue;
        }
        let mut evidence = BTreeSet::new();
        for phone in &ad.phones {
            for (p, d) in &triples {
                if *p == phone && is_escort(d) {
                    evidence.insert(Evidence {
                        phone: *phone,
                        domain: d.to_string(),
                    });
                }
            }
        }
        out.insert(ad.id, RiskLabel::direct(evidence));
    }
    out
}

/// Line of the labels file.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LabelRow {
    pub id: AdId,
    pub label: RiskClass,
    pub source: LabelSource,
    pub evidence: Vec<Evidence>,
}

impl LabelRow {
    pub fn new(id: AdId, label: &RiskLabel) -> Self {
        Self {
            id,
            label: label.label,
            source: label.source,
            evidence: label.evidence.iter().cloned().collect(),
        }
    }
}

pub fn write_labels(path: &Path, rows: &[LabelRow]) -> Result<()> {
    crate::io::write_jsonl(path, rows)
}

pub fn read_labels(path: &Path) -> Result<Vec<LabelRow>> {
    crate::io::read_jsonl(path)
}
