//! Synthetic ad ecosystems with planted ground truth.
//!
//! Legitimate recruiters post concrete job ads on job boards only.
//! Traffickers post vaguer job ads and, per phone with `cross_posting_prob`,
//! advertise the same number on escort domains.

use std::collections::{BTreeMap, BTreeSet, HashSet};

use serde::{Deserialize, Serialize};

use crate::characterize::AreaCodeTable;
use crate::corpus::{domain_infos, AdId, AdRecord, DomainInfo, NormalizedPhone, ESCORT, JOB_BOARD};
use crate::error::{Error, Result};
use crate::labelnet::RiskClass;
use crate::rng::DetRng;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScenarioConfig {
    pub n_job_domains: usize,
    pub n_escort_domains: usize,
    pub n_legit_recruiters: usize,
    pub n_traffickers: usize,
    /// Inclusive range of job ads per entity.
    pub ads_per_entity: (usize, usize),
    /// Inclusive range of phones owned per entity.
    pub phones_per_entity: (usize, usize),
    /// Chance an ad uses the entity's main phone rather than a random one
    /// from its pool.
    pub phone_reuse_prob: f64,
    /// Chance each trafficker phone is also advertised on escort domains.
    pub cross_posting_prob: f64,
    /// Chance each template slot is filled from the other class's phrases.
    pub cue_noise: f64,
    /// Chance an ad gets a Chinese or Russian token mixed in.
    pub mixing_prob: f64,
    pub seed: u64,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        Self {
            n_job_domains: 6,
            n_escort_domains: 2,
            n_legit_recruiters: 200,
            n_traffickers: 30,
            ads_per_entity: (2, 6),
            phones_per_entity: (1, 2),
            phone_reuse_prob: 0.7,
            cross_posting_prob: 1.0,
            cue_noise: 0.1,
            mixing_prob: 0.2,
            seed: crate::rng::DEFAULT_SEED,
        }
    }
}

impl ScenarioConfig {
    pub fn validate(&self) -> Result<()> {
        for (name, p) in [
            ("phone_reuse_prob", self.phone_reuse_prob),
            ("cross_posting_prob", self.cross_posting_prob),
            ("cue_noise", self.cue_noise),
            ("mixing_prob", self.mixing_prob),
        ] {
            if !(0.0..=1.0).contains(&p) {
                return Err(Error::Config(format!("{name} = {p} is outside [0, 1]")));
            }
        }
        let ranges = [
            ("ads_per_entity", self.ads_per_entity),
            ("phones_per_entity", self.phones_per_entity),
        ];
        for (name, (lo, hi)) in ranges {
            if lo == 0 || lo > hi {
                return Err(Error::Config(format!("{name} = ({lo}, {hi}) is not a valid range")));
            }
        }
        if self.n_job_domains == 0 {
            return Err(Error::Config("n_job_domains must be positive".into()));
        }
        if self.n_traffickers > 0 && self.cross_posting_prob > 0.0 && self.n_escort_domains == 0 {
            return Err(Error::Config("cross-posting needs at least one escort domain".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Author {
    Legit,
    Trafficker,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TruthRow {
    pub id: AdId,
    pub label: RiskClass,
    pub author: Author,
    pub entity: usize,
}

#[derive(Debug, Clone)]
pub struct Scenario {
    /// Job ads followed by escort ads.
    pub records: Vec<AdRecord>,
    pub domains: Vec<DomainInfo>,
    /// Job ads only.
    pub truth: BTreeMap<AdId, RiskClass>,
    pub truth_rows: Vec<TruthRow>,
    pub escort_ads: usize,
}

impl Scenario {
    pub fn job_ads(&self) -> &[AdRecord] {
        &self.records[..self.records.len() - self.escort_ads]
    }
}

const CITIES: &[&str] = &["New York", "Los Angeles", "Atlanta", "Houston", "Boston", "Philadelphia", "Chicago", "Seattle"];
const JOB_DOMAIN_STEMS: &[&str] = &["chineseinla", "chineseinny", "rusrek", "jobsboard", "huarenwork", "careerhub"];
const ESCORT_DOMAIN_STEMS: &[&str] = &["escortlistings", "adultdate", "erosguide"];

const SAFE_ROLES: &[&str] = &["office assistant", "bookkeeper", "restaurant server", "line cook", "nanny", "receptionist", "cashier", "warehouse clerk", "dental assistant", "delivery driver"];
const SAFE_DUTIES: &[&str] = &[
    "Duties include answering phones, filing invoices and scheduling appointments.",
    "Responsibilities: prepare food orders, keep the kitchen clean, follow safety rules.",
    "You will reconcile accounts, enter data into QuickBooks and prepare monthly reports.",
    "Care for two children after school, help with homework and prepare dinner.",
    "Greet customers, process payments and restock shelves.",
    "Load and unload trucks, scan inventory and pack customer orders.",
];
const SAFE_PAY: &[&str] = &[
    "Pay is $18 per hour with overtime after 40 hours.",
    "Salary $42,000 per year plus health insurance and paid vacation.",
    "Starting wage $16.50 per hour, raises after a 90 day review.",
    "Weekly paycheck, $20 per hour, direct deposit.",
];
const SAFE_SCHEDULE: &[&str] = &[
    "Schedule Monday to Friday, 9 am to 5 pm.",
    "Part time, weekday mornings, some Saturdays.",
    "Full time position with a fixed weekly schedule.",
];
const SAFE_CONTACT: &[&str] = &[
    "Send your resume to hr@{company}.com or call {phone}.",
    "Apply in person at our office or email jobs@{company}.com. Phone {phone}.",
    "Interviews held at the store. Questions: {phone} or careers@{company}.com.",
];
const COMPANIES: &[&str] = &["goldenriver", "sunrisedental", "eastwoodlogistics", "lotuskitchen", "brightpath", "harborcpa", "maplecare", "unionmarket"];

const RISKY_ROLES: &[&str] = &["girls", "young ladies", "hostess", "massage therapist", "model", "new staff"];
const RISKY_HOOK: &[&str] = &[
    "Urgent hiring today!",
    "Start immediately, urgent!",
    "Hiring now, limited spots!",
    "Easy money, start tonight!",
];
const RISKY_DUTIES: &[&str] = &[
    "Easy work, no experience needed, we train you.",
    "Simple job, details when you call.",
    "Flexible duties, relaxed environment, must be open minded.",
    "Young and attractive preferred, no documents needed.",
];
const RISKY_PAY: &[&str] = &[
    "High income, earn big cash daily!",
    "Top pay, cash paid every night, tips very high.",
    "Make thousands per week, huge income guaranteed.",
];
const RISKY_CONTACT: &[&str] = &[
    "Text only {phone}.",
    "Call or text {phone}, serious inquiries only, no email.",
    "Contact {phone} now, housing provided.",
];
const ESCORT_LINES: &[&str] = &[
    "Sweet companion available now in {city}. Call {phone}.",
    "New in town, upscale companion, outcall only. {phone}",
    "Available tonight, private visits in {city}, text {phone}.",
];
const MIXED_TOKENS: &[&str] = &["欢迎", "招聘", "包吃住", "срочно", "работа", "вакансия"];

fn format_phone(p: &NormalizedPhone, style: usize) -> String {
    let d = p.digits();
    match style % 4 {
        0 => format!("({}) {}-{}", &d[..3], &d[3..6], &d[6..]),
        1 => format!("{}-{}-{}", &d[..3], &d[3..6], &d[6..]),
        2 => format!("{} {} {}", &d[..3], &d[3..6], &d[6..]),
        _ => d.to_string(),
    }
}

struct PhoneFactory {
    codes: Vec<u16>,
    used: HashSet<NormalizedPhone>,
}

impl PhoneFactory {
    fn new() -> Self {
        let table = AreaCodeTable::builtin();
        let codes = (200u16..1000)
            .filter(|c| {
                let p: NormalizedPhone = format!("{c}5550100").parse().expect("valid digits");
                table.lookup(&p).is_some()
            })
            .collect();
        Self {
            codes,
            used: HashSet::new(),
        }
    }

    fn fresh(&mut self, rng: &mut DetRng) -> NormalizedPhone {
        loop {
            let code = *rng.choose(&self.codes);
            let exchange = rng.range_inclusive(200, 999);
            let line = rng.range_inclusive(0, 9999);
            let p: NormalizedPhone = format!("{code}{exchange}{line:04}").parse().expect("ten digits");
            if self.used.insert(p) {
                return p;
            }
        }
    }
}

struct Entity {
    author: Author,
    phones: Vec<NormalizedPhone>,
    company: &'static str,
    city: &'static str,
}

fn pick<'a>(rng: &mut DetRng, own: &'a [&'a str], other: &'a [&'a str], noise: f64) -> &'a str {
    if rng.bernoulli(noise) {
        rng.choose(other)
    } else {
        rng.choose(own)
    }
}

fn job_text(e: &Entity, phone: &NormalizedPhone, serial: usize, cfg: &ScenarioConfig, rng: &mut DetRng) -> (String, String) {
    let phone_s = format_phone(phone, rng.range_inclusive(0, 3));
    let noise = cfg.cue_noise;
    let (title, mut parts) = match e.author {
        Author::Legit => {
            let role = rng.choose(SAFE_ROLES);
            let title = format!("Ref {serial}: {} hiring {role} in {}", e.company, e.city);
            let parts = vec![
                pick(rng, SAFE_DUTIES, RISKY_DUTIES, noise).to_string(),
                pick(rng, SAFE_PAY, RISKY_PAY, noise).to_string(),
                rng.choose(SAFE_SCHEDULE).to_string(),
                pick(rng, SAFE_CONTACT, RISKY_CONTACT, noise).to_string(),
            ];
            (title, parts)
        }
        Author::Trafficker => {
            let role = rng.choose(RISKY_ROLES);
            let title = format!("Ref {serial}: {} {role} wanted in {}", rng.choose(RISKY_HOOK), e.city);
            let parts = vec![
                pick(rng, RISKY_DUTIES, SAFE_DUTIES, noise).to_string(),
                pick(rng, RISKY_PAY, SAFE_PAY, noise).to_string(),
                pick(rng, RISKY_CONTACT, SAFE_CONTACT, noise).to_string(),
            ];
            (title, parts)
        }
    };
    if rng.bernoulli(cfg.mixing_prob) {
        parts.push(rng.choose(MIXED_TOKENS).to_string());
    }
    let body = parts
        .join(" ")
        .replace("{phone}", &phone_s)
        .replace("{company}", e.company);
    (title, body)
}

pub fn generate(cfg: &ScenarioConfig) -> Result<Scenario> {
    cfg.validate()?;
    let mut rng = DetRng::new(cfg.seed);
    let mut phones = PhoneFactory::new();
    let job_domains: Vec<String> = (0..cfg.n_job_domains)
        .map(|i| format!("{}{}.com", JOB_DOMAIN_STEMS[i % JOB_DOMAIN_STEMS.len()], i))
        .collect();
    let escort_domains: Vec<String> = (0..cfg.n_escort_domains)
        .map(|i| format!("{}{}.com", ESCORT_DOMAIN_STEMS[i % ESCORT_DOMAIN_STEMS.len()], i))
        .collect();

    let mut entities = Vec::new();
    for (author, n) in [(Author::Legit, cfg.n_legit_recruiters), (Author::Trafficker, cfg.n_traffickers)] {
        for _ in 0..n {
            let k = rng.range_inclusive(cfg.phones_per_entity.0, cfg.phones_per_entity.1);
            entities.push(Entity {
                author,
                phones: (0..k).map(|_| phones.fresh(&mut rng)).collect(),
                company: rng.choose(COMPANIES),
                city: rng.choose(CITIES),
            });
        }
    }

    let mut records = Vec::new();
    let mut truth = BTreeMap::new();
    let mut truth_rows = Vec::new();
    let mut serial = 1000;
    let mut seen = HashSet::new();
    for (idx, e) in entities.iter().enumerate() {
        let n_ads = rng.range_inclusive(cfg.ads_per_entity.0, cfg.ads_per_entity.1);
        // every phone appears in at least one job ad when the ad count allows
        let n_ads = n_ads.max(e.phones.len());
        for a in 0..n_ads {
            let phone = if a < e.phones.len() {
                e.phones[a]
            } else if rng.bernoulli(cfg.phone_reuse_prob) {
                e.phones[0]
            } else {
                *rng.choose(&e.phones)
            };
            let domain = rng.choose(&job_domains).clone();
            serial += 1;
            let (title, body) = job_text(e, &phone, serial, cfg, &mut rng);
            let record = AdRecord::new(&domain, &title, &body)?;
            debug_assert_eq!(record.phones, BTreeSet::from([phone]));
            if !seen.insert(record.id) {
                continue;
            }
            let label = match e.author {
                Author::Legit => RiskClass::Safe,
                Author::Trafficker => RiskClass::Risky,
            };
            truth.insert(record.id, label);
            truth_rows.push(TruthRow {
                id: record.id,
                label,
                author: e.author,
                entity: idx,
            });
            records.push(record);
        }
    }

    let mut escort_ads = 0;
    for e in entities.iter().filter(|e| e.author == Author::Trafficker) {
        for phone in &e.phones {
            if !rng.bernoulli(cfg.cross_posting_prob) {
                continue;
            }
            for _ in 0..rng.range_inclusive(1, 2) {
                let domain = rng.choose(&escort_domains).clone();
                serial += 1;
                let body = rng
                    .choose(ESCORT_LINES)
                    .replace("{city}", e.city)
                    .replace("{phone}", &format_phone(phone, rng.range_inclusive(0, 3)));
                let record = AdRecord::new(&domain, &format!("Ref {serial}"), &body)?;
                if seen.insert(record.id) {
                    records.push(record);
                    escort_ads += 1;
                }
            }
        }
    }

    let escort_set: HashSet<&String> = escort_domains.iter().collect();
    let mut domains: Vec<DomainInfo> = domain_infos(&records)
        .into_iter()
        .map(|d| DomainInfo {
            category: if escort_set.contains(&d.name) { ESCORT } else { JOB_BOARD }.to_string(),
            ..d
        })
        .collect();
    domains.sort_by(|a, b| a.name.cmp(&b.name));
    Ok(Scenario {
        records,
        domains,
        truth,
        truth_rows,
        escort_ads,
    })
}
