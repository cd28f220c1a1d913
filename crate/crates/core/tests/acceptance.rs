//! Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any
//! failure.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::time::{Duration, Instant};

use adrisk::characterize::{match_category, MatchCategory, UsState};
use adrisk::corpus::{
    extract_phones, read_corpus, scrub_phones, write_corpus, AdId, AdRecord, CanonicalAd, DomainInfo,
    ESCORT, JOB_BOARD,
};
use adrisk::embedstore::{join, pseudo_embed, MissingPolicy};
use adrisk::ensemble::{majority_vote, ENSEMBLE_MODEL_NAME};
use adrisk::evalkit::roc_auc;
use adrisk::experiment::{cross_validate_models, ModelKind, TrainConfig};
use adrisk::io::read_jsonl;
use adrisk::labelnet::{assign_labels, build_graph, label_oracle, RiskClass};
use adrisk::learners::logreg::{gradient, objective};
use adrisk::learners::{FfnnModel, GbtGrid};
use adrisk::rng::DetRng;
use adrisk::sampler::{read_manifest, sample, write_manifest, ManifestRow, Strategy};
use adrisk::synthgen::{generate, ScenarioConfig};
use ndarray::Array2;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn random_corpus(rng: &mut DetRng, n_ads: usize, n_phones: usize) -> (Vec<AdRecord>, Vec<DomainInfo>) {
    let n_domains = rng.range_inclusive(2, 30);
    let cats = [JOB_BOARD, ESCORT, "social_media", "classifieds"];
    let mut domains: Vec<DomainInfo> = (0..n_domains)
        .map(|i| DomainInfo {
            name: format!("d{i}.com"),
            category: cats[rng.below(cats.len() as u64) as usize].to_string(),
            post_count: 0,
        })
        .collect();
    domains[0].category = JOB_BOARD.into();
    let phones: Vec<String> = (0..n_phones)
        .map(|i| format!("{}{:03}{:04}", 200 + (i % 700), 200 + rng.below(700), i))
        .collect();
    let mut records = Vec::with_capacity(n_ads);
    for a in 0..n_ads {
        let d = rng.below(n_domains as u64) as usize;
        domains[d].post_count += 1;
        let k = rng.below(4);
        let body: Vec<String> = (0..k)
            .map(|_| format!("call {}", phones[rng.below(n_phones as u64) as usize]))
            .collect();
        let body = format!("ad number {a}. {}", body.join(" or "));
        records.push(AdRecord::new(&domains[d].name, "", &body).expect("valid ad"));
    }
    (records, domains)
}

fn labeling_oracle_equivalence() -> Outcome {
    let start = Instant::now();
    let mut rng = DetRng::new(42);
    let mut pipeline_time = Duration::ZERO;
    let mut ads_total = 0;
    for trial in 0..50 {
        let n_ads = rng.range_inclusive(100, 10_000);
        let n_phones = rng.range_inclusive(10, 2_000);
        let (records, domains) = random_corpus(&mut rng, n_ads, n_phones);
        ads_total += n_ads;
        let t = Instant::now();
        let got = match build_graph(&records, &domains) {
            Ok(g) => assign_labels(&g),
            Err(e) => return outcome(false, format!("trial {trial}: {e}")),
        };
        pipeline_time += t.elapsed();
        let want = label_oracle(&records, &domains);
        if got != want {
            let diff = want.iter().filter(|(k, v)| got.get(*k) != Some(*v)).count();
            return outcome(false, format!("trial {trial}: {diff} labels differ"));
        }
    }
    let total = start.elapsed();
    outcome(
        total < Duration::from_secs(10),
        format!(
            "50 corpora, {ads_total} ads, 100% agreement; total {:.2}s (labeling {:.2}s)",
            total.as_secs_f64(),
            pipeline_time.as_secs_f64()
        ),
    )
}

fn planted_truth_recovery() -> Outcome {
    let labels_of = |cfg: &ScenarioConfig| -> adrisk::Result<(BTreeMap<AdId, RiskClass>, BTreeMap<AdId, RiskClass>)> {
        let s = generate(cfg)?;
        let g = build_graph(&s.records, &s.domains)?;
        let got = assign_labels(&g).into_iter().map(|(k, v)| (k, v.label)).collect();
        Ok((got, s.truth))
    };
    let full = ScenarioConfig::default();
    let none = ScenarioConfig {
        cross_posting_prob: 0.0,
        ..ScenarioConfig::default()
    };
    match (labels_of(&full), labels_of(&none)) {
        (Ok((got1, truth1)), Ok((got0, _))) => {
            let exact = got1 == truth1;
            let risky0 = got0.values().filter(|l| **l == RiskClass::Risky).count();
            let risky1 = truth1.values().filter(|l| **l == RiskClass::Risky).count();
            outcome(
                exact && risky0 == 0 && risky1 > 0,
                format!("p=1: exact={exact} ({risky1} risky of {}); p=0: {risky0} risky", truth1.len()),
            )
        }
        (Err(e), _) | (_, Err(e)) => outcome(false, e.to_string()),
    }
}

fn sampling_exactness() -> Outcome {
    let mut labels: Vec<(AdId, RiskClass)> = (0..2816u64).map(|i| (AdId(i * 2 + 1), RiskClass::Risky)).collect();
    labels.extend((0..20_000u64).map(|i| (AdId(i * 2 + 100_000), RiskClass::Safe)));
    let dir = tempfile::tempdir().expect("tempdir");
    let write = |strategy: Strategy, name: &str| -> adrisk::Result<Vec<u8>> {
        let (_, picked) = sample(&labels, |(_, l)| *l, strategy, 42)?;
        let rows: Vec<ManifestRow> = picked
            .into_iter()
            .map(|(id, label)| ManifestRow { id, label, split: strategy })
            .collect();
        let path = dir.path().join(name);
        write_manifest(&path, &rows)?;
        Ok(std::fs::read(&path).expect("manifest written"))
    };
    let run = || -> adrisk::Result<Outcome> {
        let b1 = write(Strategy::Balanced5050, "b1.jsonl")?;
        let b2 = write(Strategy::Balanced5050, "b2.jsonl")?;
        let m1 = write(Strategy::Moderate8020, "m1.jsonl")?;
        let m2 = write(Strategy::Moderate8020, "m2.jsonl")?;
        let balanced_lines = b1.iter().filter(|&&c| c == b'\n').count();
        let moderate = read_manifest(&dir.path().join("m1.jsonl"))?;
        let risky = moderate.iter().filter(|r| r.label == RiskClass::Risky).count();
        let frac = risky as f64 / moderate.len() as f64;
        let tol = 1.0 / moderate.len() as f64;
        let same = b1 == b2 && m1 == m2;
        Ok(outcome(
            balanced_lines == 5632 && (frac - 0.2).abs() <= tol && same,
            format!(
                "balanced {balanced_lines} lines; moderate risky fraction {frac:.4} of {}; byte-identical reruns: {same}",
                moderate.len()
            ),
        ))
    };
    run().unwrap_or_else(|e| outcome(false, e.to_string()))
}

fn rel_err(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(1e-8)
}

#[allow(clippy::needless_range_loop)]
fn gradient_checks() -> Outcome {
    let h = 1e-5;
    let mut rng = DetRng::new(42);
    let mut worst_lr = 0.0f64;
    for _ in 0..20 {
        let n = rng.range_inclusive(5, 30);
        let d = rng.range_inclusive(1, 6);
        let x = Array2::from_shape_simple_fn((n, d), || rng.normal());
        let mut y: Vec<u8> = (0..n).map(|_| rng.bernoulli(0.5) as u8).collect();
        y[0] = 0;
        y[1] = 1;
        let w: ndarray::Array1<f64> = (0..d).map(|_| rng.normal()).collect();
        let b = rng.normal();
        let c = [0.1, 1.0, 10.0][rng.below(3) as usize];
        let (gw, gb) = gradient(w.view(), b, x.view(), &y, c);
        for j in 0..d {
            let mut wp = w.clone();
            let mut wm = w.clone();
            wp[j] += h;
            wm[j] -= h;
            let num = (objective(wp.view(), b, x.view(), &y, c) - objective(wm.view(), b, x.view(), &y, c)) / (2.0 * h);
            worst_lr = worst_lr.max(rel_err(gw[j], num));
        }
        let num = (objective(w.view(), b + h, x.view(), &y, c) - objective(w.view(), b - h, x.view(), &y, c)) / (2.0 * h);
        worst_lr = worst_lr.max(rel_err(gb, num));
    }

    let mut worst_nn = 0.0f64;
    for _ in 0..20 {
        let n = rng.range_inclusive(4, 12);
        let x = Array2::from_shape_simple_fn((n, 4), || rng.normal());
        let y: Vec<u8> = (0..n).map(|_| rng.bernoulli(0.5) as u8).collect();
        let mut model = FfnnModel::init(&[4, 2, 2, 1], 0.2, &mut rng);
        for l in &mut model.layers {
            l.b.mapv_inplace(|_| 0.1 * rng.normal());
        }
        let (_, grads) = model.loss_and_grad(x.view(), &y);
        for li in 0..model.layers.len() {
            let shape = model.layers[li].w.dim();
            for r in 0..shape.0 {
                for c in 0..shape.1 {
                    let mut p = model.clone();
                    p.layers[li].w[[r, c]] += h;
                    let mut m = model.clone();
                    m.layers[li].w[[r, c]] -= h;
                    let num = (p.loss(x.view(), &y) - m.loss(x.view(), &y)) / (2.0 * h);
                    worst_nn = worst_nn.max(rel_err(grads[li].w[[r, c]], num));
                }
            }
            for c in 0..model.layers[li].b.len() {
                let mut p = model.clone();
                p.layers[li].b[c] += h;
                let mut m = model.clone();
                m.layers[li].b[c] -= h;
                let num = (p.loss(x.view(), &y) - m.loss(x.view(), &y)) / (2.0 * h);
                worst_nn = worst_nn.max(rel_err(grads[li].b[c], num));
            }
        }
    }
    outcome(
        worst_lr < 1e-4 && worst_nn < 1e-3,
        format!("max relative error: logreg {worst_lr:.2e} (< 1e-4), ffnn 4-2-2-1 {worst_nn:.2e} (< 1e-3)"),
    )
}

fn pairwise_auc(scores: &[f64], y: &[u8]) -> Option<f64> {
    let (mut twice_hits, mut pairs) = (0u64, 0u64);
    for i in 0..y.len() {
        for j in 0..y.len() {
            if y[i] == 1 && y[j] == 0 {
                pairs += 1;
                if scores[i] > scores[j] {
                    twice_hits += 2;
                } else if scores[i] == scores[j] {
                    twice_hits += 1;
                }
            }
        }
    }
    (pairs > 0).then(|| twice_hits as f64 / (2 * pairs) as f64)
}

fn metric_oracles() -> Outcome {
    let hand = roc_auc(&[0.9, 0.8, 0.7, 0.6], &[1, 0, 1, 0]);
    let mut rng = DetRng::new(42);
    let mut mismatches = 0;
    for _ in 0..1000 {
        let n = rng.range_inclusive(1, 200);
        let levels = rng.range_inclusive(2, 50) as u64;
        let scores: Vec<f64> = (0..n).map(|_| rng.below(levels) as f64 / levels as f64).collect();
        let y: Vec<u8> = (0..n).map(|_| rng.bernoulli(0.4) as u8).collect();
        if roc_auc(&scores, &y) != pairwise_auc(&scores, &y) {
            mismatches += 1;
        }
    }
    outcome(
        hand == Some(0.75) && mismatches == 0,
        format!("hand case {hand:?}; {mismatches} of 1000 random trials differ from pairwise counting"),
    )
}

const TABLE_ROWS: [&str; 12] = [
    "All Match",
    "All Mismatch",
    "Phone Loc Mismatch",
    "Domain Loc Mismatch",
    "Job Loc Mismatch",
    "Domain Loc Unspec (Match)",
    "Domain Loc Unspec (Mismatch)",
    "Phone Loc Unknown (Match)",
    "Phone Loc Unknown (Mismatch)",
    "Job Loc Unknown (Match)",
    "Job Loc Unknown (Mismatch)",
    "Not Comparable",
];

/// Independent restatement of the taxonomy, keyed by display name.
fn expected_category(d: Option<UsState>, j: Option<UsState>, p: Option<UsState>) -> &'static str {
    let unknown = [d, j, p].iter().filter(|v| v.is_none()).count();
    if unknown >= 2 {
        return "Not Comparable";
    }
    if unknown == 1 {
        let (field, a, b) = if d.is_none() {
            ("Domain Loc Unspec", j, p)
        } else if j.is_none() {
            ("Job Loc Unknown", d, p)
        } else {
            ("Phone Loc Unknown", d, j)
        };
        return match (field, a == b) {
            ("Domain Loc Unspec", true) => "Domain Loc Unspec (Match)",
            ("Domain Loc Unspec", false) => "Domain Loc Unspec (Mismatch)",
            ("Job Loc Unknown", true) => "Job Loc Unknown (Match)",
            ("Job Loc Unknown", false) => "Job Loc Unknown (Mismatch)",
            (_, true) => "Phone Loc Unknown (Match)",
            (_, false) => "Phone Loc Unknown (Mismatch)",
        };
    }
    let distinct: BTreeSet<_> = [d, j, p].into_iter().collect();
    match distinct.len() {
        1 => "All Match",
        3 => "All Mismatch",
        _ if d == j => "Phone Loc Mismatch",
        _ if d == p => "Job Loc Mismatch",
        _ => "Domain Loc Mismatch",
    }
}

fn taxonomy_totality() -> Outcome {
    let space: Vec<Option<UsState>> = std::iter::once(None).chain(UsState::all().map(Some)).collect();
    let mut hits: BTreeMap<MatchCategory, usize> = BTreeMap::new();
    let mut wrong = 0usize;
    let mut total = 0usize;
    for &d in &space {
        for &j in &space {
            for &p in &space {
                let c = match_category(d, j, p);
                total += 1;
                if c.display_name() != expected_category(d, j, p) {
                    wrong += 1;
                }
                *hits.entry(c).or_default() += 1;
            }
        }
    }
    let names: BTreeSet<&str> = MatchCategory::ALL.iter().map(|c| c.display_name()).collect();
    let table: BTreeSet<&str> = TABLE_ROWS.into_iter().collect();
    let bijection = names == table && names.len() == 12 && MatchCategory::ALL.len() == 12;
    outcome(
        wrong == 0 && hits.len() == 12 && bijection,
        format!(
            "{total} combinations, {} categories hit, {wrong} disagreements; names biject with the 12 table rows: {bijection}",
            hits.len()
        ),
    )
}

fn end_to_end_separability() -> Outcome {
    let start = Instant::now();
    let run = || -> adrisk::Result<(f64, f64, usize)> {
        let scenario = generate(&ScenarioConfig {
            n_legit_recruiters: 800,
            n_traffickers: 200,
            ads_per_entity: (5, 5),
            phones_per_entity: (1, 1),
            ..ScenarioConfig::default()
        })?;
        let graph = build_graph(&scenario.records, &scenario.domains)?;
        let labels: Vec<(AdId, RiskClass)> = assign_labels(&graph).into_iter().map(|(id, l)| (id, l.label)).collect();
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
        let ens = reports
            .iter()
            .find(|r| r.model == ENSEMBLE_MODEL_NAME)
            .expect("ensemble row present");
        Ok((ens.mean.roc_auc.unwrap_or(0.0), ens.mean.f1_risky, data.y.len()))
    };
    match run() {
        Ok((auc, f1, n)) => {
            let secs = start.elapsed().as_secs_f64();
            outcome(
                auc >= 0.90 && f1 >= 0.85 && secs < 300.0,
                format!("{n} ads, 5-fold ensemble ROC-AUC {auc:.4} (>= 0.90), risky F1 {f1:.4} (>= 0.85), {secs:.1}s"),
            )
        }
        Err(e) => outcome(false, e.to_string()),
    }
}

fn leakage_property() -> Outcome {
    let run = || -> adrisk::Result<Outcome> {
        let dir = tempfile::tempdir().expect("tempdir");
        let s = generate(&ScenarioConfig::default())?;
        let corpus = dir.path().join("corpus.jsonl");
        write_corpus(&s.records, &corpus)?;
        let canonical: HashMap<AdId, CanonicalAd> = read_jsonl::<CanonicalAd>(&corpus)?
            .into_iter()
            .map(|c| (c.record.id, c))
            .collect();
        let records = read_corpus(&corpus)?;
        let g = build_graph(&records, &s.domains)?;
        let labels: Vec<(AdId, RiskClass)> = assign_labels(&g).into_iter().map(|(k, v)| (k, v.label)).collect();
        let by_id: HashMap<AdId, &AdRecord> = records.iter().map(|r| (r.id, r)).collect();
        let (mut checked, mut leaks, mut had_phone) = (0, 0, 0);
        for strategy in [Strategy::Balanced5050, Strategy::Moderate8020] {
            let (_, picked) = sample(&labels, |(_, l)| *l, strategy, 42)?;
            for (id, _) in picked {
                let c = &canonical[&id];
                let stored = format!("{}\n{}", c.scrubbed_title, c.scrubbed_body);
                let fresh = scrub_phones(by_id[&id]).full_text();
                if !extract_phones(&stored).is_empty() || !extract_phones(&fresh).is_empty() {
                    leaks += 1;
                }
                if !by_id[&id].phones.is_empty() {
                    had_phone += 1;
                }
                checked += 1;
            }
        }
        Ok(outcome(
            leaks == 0 && checked > 0,
            format!("{checked} manifest records ({had_phone} with phones before scrubbing), {leaks} leaks"),
        ))
    };
    run().unwrap_or_else(|e| outcome(false, e.to_string()))
}

fn permutations(v: &[RiskClass]) -> Vec<Vec<RiskClass>> {
    if v.len() <= 1 {
        return vec![v.to_vec()];
    }
    let mut out = Vec::new();
    for i in 0..v.len() {
        let mut rest = v.to_vec();
        let head = rest.remove(i);
        for mut p in permutations(&rest) {
            p.insert(0, head);
            out.push(p);
        }
    }
    out
}

fn ensemble_properties() -> Outcome {
    let mut ballots = 0;
    let mut failures = Vec::new();
    for n in 1..=5usize {
        for mask in 0u32..(1 << n) {
            let votes: Vec<RiskClass> = (0..n)
                .map(|i| if mask >> i & 1 == 1 { RiskClass::Risky } else { RiskClass::Safe })
                .collect();
            ballots += 1;
            let result = majority_vote(&votes);
            let risky = mask.count_ones() as usize;
            if permutations(&votes).iter().any(|p| majority_vote(p) != result) {
                failures.push(format!("permutation {votes:?}"));
            }
            if n % 2 == 1 {
                let mut sorted = votes.clone();
                sorted.sort_by_key(|v| v.as_target());
                if sorted[n / 2] != result {
                    failures.push(format!("median {votes:?}"));
                }
            }
            if 2 * risky == n && result != RiskClass::Safe {
                failures.push(format!("tie {votes:?}"));
            }
            let margin = (2 * risky).abs_diff(n);
            for i in 0..n {
                let mut flipped = votes.clone();
                flipped[i] = match flipped[i] {
                    RiskClass::Risky => RiskClass::Safe,
                    RiskClass::Safe => RiskClass::Risky,
                };
                let after = majority_vote(&flipped);
                // a single flip moves the margin by exactly two
                if margin > 2 && after != result {
                    failures.push(format!("flip {votes:?} at {i}"));
                }
                let r = flipped.iter().filter(|v| **v == RiskClass::Risky).count();
                let expect = if 2 * r > n { RiskClass::Risky } else { RiskClass::Safe };
                if after != expect {
                    failures.push(format!("count {flipped:?}"));
                }
            }
        }
    }
    outcome(
        failures.is_empty(),
        format!("{ballots} ballots of 1-5 voters; failures: {failures:?}"),
    )
}

fn main() {
    type Check = fn() -> Outcome;
    let criteria: Vec<(&str, Check)> = vec![
        ("labeling oracle equivalence", labeling_oracle_equivalence),
        ("planted-truth recovery", planted_truth_recovery),
        ("sampling exactness", sampling_exactness),
        ("gradient checks", gradient_checks),
        ("metric oracles", metric_oracles),
        ("taxonomy totality", taxonomy_totality),
        ("end-to-end synthetic separability", end_to_end_separability),
        ("leakage property", leakage_property),
        ("ensemble properties", ensemble_properties),
    ];
    let mut failed = 0;
    for (name, check) in criteria {
        let o = check();
        if !o.pass {
            failed += 1;
        }
        println!("{} {name}: {}", if o.pass { "PASS" } else { "FAIL" }, o.detail);
    }
    if failed > 0 {
        println!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
}
