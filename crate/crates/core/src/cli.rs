//! Command-line stages. Each subcommand reads and writes files only, so
//! external predictions can join before `ensemble`.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};

use crate::characterize::{build_report, write_scatter_csv, AttributeRecord, LexiconPaths, Lexicons};
use crate::corpus::{
    categorize_domains, dedup, domain_infos, filter_domains, ingest, read_corpus, snippet_match, uncategorized,
    write_corpus, write_raw, AdId, CategoryLexicon, DomainInfo, DEFAULT_MIN_POSTS,
};
use crate::embedstore::{join, pseudo_embed, read_emb1, write_emb1, MissingPolicy};
use crate::ensemble::load_predictions;
use crate::evalkit::report::render_table;
use crate::evalkit::{EvalReport, Metrics};
use crate::error::{Error, Result};
use crate::experiment::{cross_validate_models, train_model, ModelKind, TrainConfig};
use crate::io::{read_jsonl, write_json, write_jsonl, write_text};
use crate::labelnet::{
    assign_labels, augment_risky, build_graph, risky_phones, write_labels, LabelRow, RiskClass,
};
use crate::learners::{load_model, pca_project, predict, read_predictions, save_model, write_predictions};
use crate::sampler::{sample, write_manifest, ManifestRow, Strategy};
use crate::synthgen::{generate, ScenarioConfig};

pub const DEFAULT_EMBED_DIM: usize = 256;

/// Pipeline settings from `--config`; command-line flags win.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PipelineConfig {
    pub seed: u64,
    pub min_posts: usize,
    pub strategy: Strategy,
    pub folds: usize,
    pub embed_dim: usize,
    pub paths: PathsConfig,
    pub lexicons: LexiconPaths,
    pub train: TrainConfig,
    pub synth: ScenarioConfig,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        Self {
            seed: crate::rng::DEFAULT_SEED,
            min_posts: DEFAULT_MIN_POSTS,
            strategy: Strategy::Balanced5050,
            folds: 5,
            embed_dim: DEFAULT_EMBED_DIM,
            paths: PathsConfig::default(),
            lexicons: LexiconPaths::default(),
            train: TrainConfig::default(),
            synth: ScenarioConfig::default(),
        }
    }
}

/// Default file locations used when a flag is omitted.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PathsConfig {
    pub corpus: Option<PathBuf>,
    pub domains: Option<PathBuf>,
    pub categories: Option<PathBuf>,
    pub labels: Option<PathBuf>,
    pub manifest: Option<PathBuf>,
    pub embeddings: Option<PathBuf>,
    pub models: Option<PathBuf>,
    pub reports: Option<PathBuf>,
}

impl PipelineConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let src = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut cfg: Self =
            toml::from_str(&src).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        let base = path.parent().unwrap_or(Path::new("."));
        let r = |p: &mut Option<PathBuf>| {
            if let Some(v) = p {
                *v = base.join(&*v);
            }
        };
        let p = &mut cfg.paths;
        for slot in [
            &mut p.corpus,
            &mut p.domains,
            &mut p.categories,
            &mut p.labels,
            &mut p.manifest,
            &mut p.embeddings,
            &mut p.models,
            &mut p.reports,
        ] {
            r(slot);
        }
        cfg.lexicons = cfg.lexicons.resolve(base);
        Ok(cfg)
    }

    /// One seed for every stage.
    fn apply_seed(&mut self, seed: Option<u64>) {
        if let Some(s) = seed {
            self.seed = s;
        }
        self.train.seed = self.seed;
        self.train.ffnn.seed = self.seed;
        self.synth.seed = self.seed;
    }
}

#[derive(Debug, Parser)]
#[command(name = "adrisk", version, about = "Job-ad risk labeling, classification and reporting")]
pub struct Cli {
    /// TOML pipeline configuration.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Seed for every randomized stage (default 42).
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Parse raw ads, drop exact duplicates, write the canonical corpus.
    Ingest(IngestArgs),
    /// Drop small domains and categorize the rest.
    Filter(FilterArgs),
    /// Label job ads by phone co-occurrence with escort domains.
    Label(LabelArgs),
    /// Draw a balanced or 80/20 training manifest.
    Sample(SampleArgs),
    /// Write random-projection embeddings of the scrubbed corpus.
    Embed(EmbedArgs),
    /// Fit one model on embeddings and a manifest.
    Train(TrainArgs),
    /// Score embeddings with a saved model.
    Predict(PredictArgs),
    /// Majority vote over prediction files.
    Ensemble(EnsembleArgs),
    /// Cross-validate models, or score prediction files against labels.
    Evaluate(EvaluateArgs),
    /// Attribute extraction and characterization reports.
    Characterize(CharacterizeArgs),
    /// Generate a synthetic corpus with planted ground truth.
    Synth(SynthArgs),
    /// Two-component projection for scatter plots.
    Pca(PcaArgs),
}

#[derive(Debug, Args)]
pub struct IngestArgs {
    #[arg(long = "in")]
    pub input: PathBuf,
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// JSON summary of accepted and rejected lines.
    #[arg(long)]
    pub report: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct FilterArgs {
    #[arg(long)]
    pub corpus: Option<PathBuf>,
    #[arg(long)]
    pub out: PathBuf,
    /// Where to write the categorized domain table (TOML).
    #[arg(long)]
    pub domains_out: Option<PathBuf>,
    #[arg(long)]
    pub min_posts: Option<usize>,
    /// Domain category lexicon (TOML); bundled default otherwise.
    #[arg(long)]
    pub categories: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct LabelArgs {
    #[arg(long)]
    pub corpus: Option<PathBuf>,
    #[arg(long)]
    pub domains: Option<PathBuf>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Extra pages (raw ad JSONL) to mine for further Risky samples.
    #[arg(long)]
    pub augment: Option<PathBuf>,
    /// Corpus file for accepted extra pages.
    #[arg(long, requires = "augment")]
    pub augmented_out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SampleArgs {
    #[arg(long)]
    pub labels: Option<PathBuf>,
    /// `balanced` (50/50) or `moderate` (80/20).
    #[arg(long)]
    pub strategy: Option<Strategy>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct EmbedArgs {
    /// One or more canonical corpus files.
    #[arg(long, num_args = 1.., required = true)]
    pub corpus: Vec<PathBuf>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub dim: Option<usize>,
}

#[derive(Debug, Args)]
pub struct TrainArgs {
    #[arg(long)]
    pub embeddings: Option<PathBuf>,
    #[arg(long)]
    pub manifest: Option<PathBuf>,
    #[arg(long)]
    pub model: ModelKind,
    #[arg(long)]
    pub out: PathBuf,
    /// Skip labeled ids that have no embedding instead of failing.
    #[arg(long)]
    pub drop_missing: bool,
}

#[derive(Debug, Args)]
pub struct PredictArgs {
    #[arg(long)]
    pub model: PathBuf,
    #[arg(long)]
    pub embeddings: Option<PathBuf>,
    /// JSONL with an `id` field restricting which rows are scored.
    #[arg(long)]
    pub ids: Option<PathBuf>,
    /// `model_name` written on each row; defaults to the model kind.
    #[arg(long)]
    pub name: Option<String>,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct EnsembleArgs {
    #[arg(long, num_args = 1.., required = true)]
    pub predictions: Vec<PathBuf>,
    #[arg(long)]
    pub out: PathBuf,
    /// Also write the per-id vote breakdown (JSONL).
    #[arg(long)]
    pub votes_out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct EvaluateArgs {
    #[arg(long)]
    pub embeddings: Option<PathBuf>,
    #[arg(long)]
    pub manifest: Option<PathBuf>,
    #[arg(long)]
    pub folds: Option<usize>,
    /// Comma-separated subset of logreg, ffnn, gbt.
    #[arg(long, value_delimiter = ',')]
    pub models: Vec<ModelKind>,
    /// Score these prediction files against `--labels` instead of
    /// cross-validating.
    #[arg(long, num_args = 1..)]
    pub predictions: Vec<PathBuf>,
    #[arg(long)]
    pub labels: Option<PathBuf>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Text table; printed to stdout when omitted.
    #[arg(long)]
    pub table: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct CharacterizeArgs {
    #[arg(long)]
    pub corpus: Option<PathBuf>,
    /// Any JSONL with `id` and `label` (labels, manifest or predictions).
    #[arg(long)]
    pub labels: Option<PathBuf>,
    #[arg(long)]
    pub out_dir: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SynthArgs {
    #[arg(long)]
    pub out_dir: PathBuf,
    #[arg(long)]
    pub cross_posting_prob: Option<f64>,
    #[arg(long)]
    pub traffickers: Option<usize>,
    #[arg(long)]
    pub recruiters: Option<usize>,
}

#[derive(Debug, Args)]
pub struct PcaArgs {
    #[arg(long)]
    pub embeddings: Option<PathBuf>,
    #[arg(long)]
    pub labels: Option<PathBuf>,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long, default_value_t = 2)]
    pub k: usize,
}

fn need(flag: Option<PathBuf>, fallback: &Option<PathBuf>, name: &str) -> Result<PathBuf> {
    flag.or_else(|| fallback.clone())
        .ok_or_else(|| Error::Config(format!("--{name} is required (or set paths.{name} in the config)")))
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct DomainTable {
    #[serde(default)]
    domain: Vec<DomainInfo>,
}

pub fn write_domains(path: &Path, domains: &[DomainInfo]) -> Result<()> {
    let text = toml::to_string(&DomainTable {
        domain: domains.to_vec(),
    })
    .map_err(|e| Error::Config(e.to_string()))?;
    write_text(path, &text)
}

pub fn read_domains(path: &Path) -> Result<Vec<DomainInfo>> {
    let src = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let t: DomainTable = toml::from_str(&src).map_err(|e| Error::schema(path.display().to_string(), e.to_string()))?;
    Ok(t.domain)
}

/// `id` plus optional `label` from any of the JSONL outputs.
#[derive(Debug, Clone, Deserialize)]
struct IdLabel {
    id: String,
    #[serde(default)]
    label: Option<RiskClass>,
}

fn read_id_labels(path: &Path) -> Result<Vec<(AdId, RiskClass)>> {
    let rows: Vec<IdLabel> = read_jsonl(path)?;
    let mut out = Vec::with_capacity(rows.len());
    let mut seen = BTreeSet::new();
    for (i, r) in rows.into_iter().enumerate() {
        let ctx = format!("{}:{}", path.display(), i + 1);
        let id: AdId = r.id.parse().map_err(|_| Error::schema(ctx.clone(), format!("bad id {:?}", r.id)))?;
        let label = r.label.ok_or_else(|| Error::schema(ctx.clone(), "row has no label"))?;
        if !seen.insert(id) {
            return Err(Error::schema(ctx, format!("duplicate id {id}")));
        }
        out.push((id, label));
    }
    Ok(out)
}

fn summary(value: serde_json::Value) {
    println!("{value}");
}

pub fn execute(cli: Cli) -> Result<()> {
    let mut cfg = match &cli.config {
        Some(p) => PipelineConfig::load(p)?,
        None => PipelineConfig::default(),
    };
    cfg.apply_seed(cli.seed);
    let paths = cfg.paths.clone();
    match cli.command {
        Command::Ingest(a) => {
            let out = need(a.out, &paths.corpus, "corpus")?;
            let (records, report) = ingest(&a.input)?;
            let before = records.len();
            let records = dedup(records);
            write_corpus(&records, &out)?;
            if let Some(r) = &a.report {
                write_json(r, &report)?;
            }
            summary(serde_json::json!({
                "lines": report.lines,
                "accepted": report.accepted,
                "rejected": report.errors.len(),
                "duplicates": before - records.len(),
                "written": records.len(),
            }));
        }
        Command::Filter(a) => {
            let corpus = need(a.corpus, &paths.corpus, "corpus")?;
            let records = read_corpus(&corpus)?;
            let lexicon = match a.categories.or(paths.categories.clone()) {
                Some(p) => CategoryLexicon::load(&p)?,
                None => CategoryLexicon::builtin(),
            };
            let (kept, dropped) = filter_domains(records, a.min_posts.unwrap_or(cfg.min_posts))?;
            let domains = categorize_domains(&domain_infos(&kept), &lexicon);
            let unplaced: Vec<&str> = uncategorized(&domains).iter().map(|d| d.name.as_str()).collect();
            if !unplaced.is_empty() {
                log::warn!("{} domains matched no category: {:?}", unplaced.len(), unplaced);
            }
            write_corpus(&kept, &a.out)?;
            let domains_out = need(a.domains_out, &paths.domains, "domains-out")?;
            write_domains(&domains_out, &domains)?;
            summary(serde_json::json!({
                "kept_records": kept.len(),
                "kept_domains": domains.len(),
                "dropped_domains": dropped.iter().map(|d| &d.name).collect::<Vec<_>>(),
                "uncategorized": unplaced,
            }));
        }
        Command::Label(a) => {
            let records = read_corpus(&need(a.corpus, &paths.corpus, "corpus")?)?;
            let domains = read_domains(&need(a.domains, &paths.domains, "domains")?)?;
            let out = need(a.out, &paths.labels, "labels")?;
            let graph = build_graph(&records, &domains)?;
            let labels = assign_labels(&graph);
            let mut rows: Vec<LabelRow> = labels.iter().map(|(id, l)| LabelRow::new(*id, l)).collect();
            let mut augmented = 0;
            if let Some(pages) = &a.augment {
                let (extra, _) = ingest(pages)?;
                let risky = risky_phones(&labels);
                // a page with a search snippet counts only if the snippet shows the number
                let extra: Vec<_> = dedup(extra)
                    .into_iter()
                    .filter(|r| !labels.contains_key(&r.id))
                    .filter(|r| match &r.snippet {
                        Some(s) => r.phones.intersection(&risky).any(|p| snippet_match(s, p)),
                        None => true,
                    })
                    .collect();
                let accepted = augment_risky(&graph, &extra, &risky);
                augmented = accepted.len();
                rows.extend(accepted.iter().map(|(r, l)| LabelRow::new(r.id, l)));
                let pages_out = a
                    .augmented_out
                    .ok_or_else(|| Error::Config("--augmented-out is required with --augment".into()))?;
                let recs: Vec<_> = accepted.into_iter().map(|(r, _)| r).collect();
                write_corpus(&recs, &pages_out)?;
            }
            write_labels(&out, &rows)?;
            let risky = rows.iter().filter(|r| r.label == RiskClass::Risky).count();
            summary(serde_json::json!({
                "labeled": rows.len(),
                "risky": risky,
                "safe": rows.len() - risky,
                "augmented": augmented,
            }));
        }
        Command::Sample(a) => {
            let labels = read_id_labels(&need(a.labels, &paths.labels, "labels")?)?;
            let strategy = a.strategy.unwrap_or(cfg.strategy);
            let (plan, picked) = sample(&labels, |(_, l)| *l, strategy, cfg.seed)?;
            let rows: Vec<ManifestRow> = picked
                .into_iter()
                .map(|(id, label)| ManifestRow {
                    id,
                    label,
                    split: strategy,
                })
                .collect();
            write_manifest(&need(a.out, &paths.manifest, "manifest")?, &rows)?;
            summary(serde_json::to_value(plan)?);
        }
        Command::Embed(a) => {
            let mut records = Vec::new();
            for c in &a.corpus {
                records.extend(read_corpus(c)?);
            }
            let records = dedup(records);
            let dim = a.dim.unwrap_or(cfg.embed_dim);
            let matrix = pseudo_embed(&records, dim, cfg.seed)?;
            write_emb1(&matrix, &need(a.out, &paths.embeddings, "embeddings")?)?;
            summary(serde_json::json!({"rows": matrix.len(), "dim": dim}));
        }
        Command::Train(a) => {
            let matrix = read_emb1(&need(a.embeddings, &paths.embeddings, "embeddings")?)?;
            let labels = read_id_labels(&need(a.manifest, &paths.manifest, "manifest")?)?;
            let policy = if a.drop_missing { MissingPolicy::Drop } else { MissingPolicy::Strict };
            let data = join(&matrix, &labels, policy)?;
            let model = train_model(a.model, &data.x, &data.y, &cfg.train)?;
            save_model(&model, &a.out)?;
            summary(serde_json::json!({
                "model": a.model.name(),
                "rows": data.y.len(),
                "dropped": data.missing.len(),
            }));
        }
        Command::Predict(a) => {
            let model = load_model(&a.model)?;
            let matrix = read_emb1(&need(a.embeddings, &paths.embeddings, "embeddings")?)?;
            let wanted: Option<BTreeSet<u64>> = match &a.ids {
                Some(p) => {
                    let rows: Vec<IdLabel> = read_jsonl(p)?;
                    let mut set = BTreeSet::new();
                    for r in rows {
                        let id: AdId = r
                            .id
                            .parse()
                            .map_err(|_| Error::schema(p.display().to_string(), format!("bad id {:?}", r.id)))?;
                        set.insert(id.0);
                    }
                    Some(set)
                }
                None => None,
            };
            let rows: Vec<usize> = (0..matrix.len())
                .filter(|&i| wanted.as_ref().is_none_or(|w| w.contains(&matrix.ids()[i])))
                .collect();
            if let Some(w) = &wanted {
                if rows.len() < w.len() {
                    return Err(Error::MissingEmbedding(format!("{} requested ids", w.len() - rows.len())));
                }
            }
            let mut x = ndarray::Array2::<f64>::zeros((rows.len(), matrix.dim()));
            for (r, &i) in rows.iter().enumerate() {
                for (c, v) in matrix.row(i).iter().enumerate() {
                    x[[r, c]] = *v as f64;
                }
            }
            let ids: Vec<AdId> = rows.iter().map(|&i| AdId(matrix.ids()[i])).collect();
            let name = a.name.unwrap_or_else(|| model.kind().to_string());
            let preds = predict(&model, &ids, x.view(), &name)?;
            write_predictions(&a.out, &preds)?;
            let risky = preds.iter().filter(|p| p.label == Some(RiskClass::Risky)).count();
            summary(serde_json::json!({"rows": preds.len(), "risky": risky}));
        }
        Command::Ensemble(a) => {
            let ballot = load_predictions(&a.predictions)?;
            write_predictions(&a.out, &ballot.predictions())?;
            if let Some(v) = &a.votes_out {
                write_jsonl(v, &ballot.sets)?;
            }
            let incomplete = ballot.incomplete();
            summary(serde_json::json!({
                "models": ballot.models,
                "ids": ballot.sets.len(),
                "risky": ballot.sets.iter().filter(|s| s.label == RiskClass::Risky).count(),
                "incomplete": incomplete,
            }));
        }
        Command::Evaluate(a) => {
            let reports = if a.predictions.is_empty() {
                let matrix = read_emb1(&need(a.embeddings, &paths.embeddings, "embeddings")?)?;
                let labels = read_id_labels(&need(a.manifest, &paths.manifest, "manifest")?)?;
                let data = join(&matrix, &labels, MissingPolicy::Strict)?;
                let kinds = if a.models.is_empty() { ModelKind::ALL.to_vec() } else { a.models };
                cross_validate_models(&data.x, &data.y, &kinds, &cfg.train, a.folds.unwrap_or(cfg.folds))?
            } else {
                let truth: HashMap<AdId, RiskClass> =
                    read_id_labels(&need(a.labels, &paths.labels, "labels")?)?.into_iter().collect();
                score_prediction_files(&a.predictions, &truth)?
            };
            let table = render_table(&reports);
            if let Some(out) = &a.out {
                write_json(out, &reports)?;
            }
            match &a.table {
                Some(t) => write_text(t, &table)?,
                None => print!("{table}"),
            }
        }
        Command::Characterize(a) => {
            let records = read_corpus(&need(a.corpus, &paths.corpus, "corpus")?)?;
            let labels: HashMap<AdId, RiskClass> =
                read_id_labels(&need(a.labels, &paths.labels, "labels")?)?.into_iter().collect();
            let dir = need(a.out_dir, &paths.reports, "reports")?;
            std::fs::create_dir_all(&dir).map_err(|e| Error::io(&dir, e))?;
            let lex = Lexicons::with_overrides(&cfg.lexicons)?;
            let attrs: Vec<AttributeRecord> = records
                .iter()
                .filter(|r| labels.contains_key(&r.id))
                .map(|r| AttributeRecord::extract(r, &lex))
                .collect();
            if attrs.len() < labels.len() {
                log::warn!("{} labeled ids are not in the corpus", labels.len() - attrs.len());
            }
            let report = build_report(&attrs, &labels)?;
            write_jsonl(&dir.join("attributes.jsonl"), &attrs)?;
            write_json(&dir.join("characterization.json"), &report)?;
            report.write_dimensions_csv(&dir.join("dimensions.csv"))?;
            report.write_match_csv(&dir.join("location_match.csv"))?;
            summary(serde_json::json!({
                "records": report.total,
                "risky": report.risky,
                "flagged_sex_work": report.flagged,
            }));
        }
        Command::Synth(a) => {
            let mut sc = cfg.synth.clone();
            if let Some(p) = a.cross_posting_prob {
                sc.cross_posting_prob = p;
            }
            if let Some(n) = a.traffickers {
                sc.n_traffickers = n;
            }
            if let Some(n) = a.recruiters {
                sc.n_legit_recruiters = n;
            }
            let s = generate(&sc)?;
            std::fs::create_dir_all(&a.out_dir).map_err(|e| Error::io(&a.out_dir, e))?;
            write_raw(&s.records, &a.out_dir.join("raw.jsonl"))?;
            write_jsonl(&a.out_dir.join("truth.jsonl"), &s.truth_rows)?;
            write_domains(&a.out_dir.join("domains.toml"), &s.domains)?;
            summary(serde_json::json!({
                "records": s.records.len(),
                "job_ads": s.truth.len(),
                "escort_ads": s.escort_ads,
                "risky_truth": s.truth.values().filter(|l| **l == RiskClass::Risky).count(),
            }));
        }
        Command::Pca(a) => {
            let matrix = read_emb1(&need(a.embeddings, &paths.embeddings, "embeddings")?)?;
            let labels = read_id_labels(&need(a.labels, &paths.labels, "labels")?)?;
            let data = join(&matrix, &labels, MissingPolicy::Drop)?;
            let pca = pca_project(&data.x, a.k, cfg.seed)?;
            let classes: Vec<RiskClass> = data.y.iter().map(|&t| RiskClass::from_target(t)).collect();
            write_scatter_csv(&a.out, &data.ids, &pca.coords, &classes)?;
            summary(serde_json::json!({
                "rows": data.ids.len(),
                "components": pca.len(),
                "explained_variance": pca.explained_variance,
            }));
        }
    }
    Ok(())
}

/// One report per model name, each a single fold over the labeled ids it
/// covers.
pub fn score_prediction_files(
    paths: &[PathBuf],
    truth: &HashMap<AdId, RiskClass>,
) -> Result<Vec<EvalReport>> {
    let mut by_model: BTreeMap<String, Vec<(u8, u8, Option<f64>)>> = BTreeMap::new();
    for p in paths {
        for row in read_predictions(p)? {
            let Some(label) = row.label else { continue };
            let Ok(id) = row.id.parse::<AdId>() else { continue };
            if let Some(t) = truth.get(&id) {
                by_model
                    .entry(row.model_name)
                    .or_default()
                    .push((label.as_target(), t.as_target(), row.score));
            }
        }
    }
    if by_model.is_empty() {
        return Err(Error::InvalidInput("no predictions overlap the labels".into()));
    }
    by_model
        .into_iter()
        .map(|(name, rows)| {
            let pred: Vec<u8> = rows.iter().map(|r| r.0).collect();
            let truth: Vec<u8> = rows.iter().map(|r| r.1).collect();
            let scores: Option<Vec<f64>> = rows.iter().map(|r| r.2).collect();
            EvalReport::new(name, vec![Metrics::compute(&pred, scores.as_deref(), &truth)])
        })
        .collect()
}

#[derive(Serialize)]
struct ErrorReport<'a> {
    error: &'a str,
    message: String,
    exit_code: i32,
}

/// Parse arguments, run, and map failures to an exit code with a JSON
/// error line on stderr.
pub fn run() -> i32 {
    let _ = env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn"))
        .format_timestamp(None)
        .try_init();
    run_from(std::env::args_os())
}

pub fn run_from<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = e.print();
                return 0;
            }
            let rep = ErrorReport {
                error: "usage",
                message: e.to_string().trim().to_string(),
                exit_code: 2,
            };
            eprintln!("{}", serde_json::to_string(&rep).unwrap_or_default());
            return 2;
        }
    };
    match execute(cli) {
        Ok(()) => 0,
        Err(e) => {
            let rep = ErrorReport {
                error: e.kind(),
                message: e.to_string(),
                exit_code: e.exit_code(),
            };
            eprintln!("{}", serde_json::to_string(&rep).unwrap_or_default());
            rep.exit_code
        }
    }
}
