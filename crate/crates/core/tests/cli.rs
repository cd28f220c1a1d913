use std::path::{Path, PathBuf};
use std::process::{Command, Output};

const BIN: &str = env!("CARGO_BIN_EXE_adrisk");

const CONFIG: &str = r#"
seed = 42
min_posts = 1

[train.ffnn]
hidden = [16, 8]
max_epochs = 5

[train.gbt.grid]
n_trees = [30]
max_depth = [3]
learning_rate = [0.1]
subsample = [1.0]
colsample = [1.0]
"#;

fn run(dir: &Path, args: &[&str]) -> Output {
    Command::new(BIN)
        .current_dir(dir)
        .args(args)
        .output()
        .expect("binary runs")
}

fn ok(dir: &Path, args: &[&str]) -> Output {
    let out = run(dir, args);
    assert!(
        out.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    out
}

const OUTPUTS: &[&str] = &[
    "synth/raw.jsonl",
    "synth/truth.jsonl",
    "corpus.jsonl",
    "filtered.jsonl",
    "domains.toml",
    "labels.jsonl",
    "manifest.jsonl",
    "emb.emb1",
    "gbt.json",
    "logreg.json",
    "p_gbt.jsonl",
    "p_logreg.jsonl",
    "p_ens.jsonl",
    "cv.json",
    "char/characterization.json",
    "char/dimensions.csv",
    "scatter.csv",
];

fn pipeline(dir: &Path) {
    std::fs::write(dir.join("cfg.toml"), CONFIG).unwrap();
    let c = ["--config", "cfg.toml"];
    let with = |rest: &[&str]| -> Vec<String> { c.iter().chain(rest).map(|s| s.to_string()).collect() };
    let go = |rest: &[&str]| {
        let args = with(rest);
        let refs: Vec<&str> = args.iter().map(String::as_str).collect();
        ok(dir, &refs)
    };
    go(&["synth", "--out-dir", "synth"]);
    go(&["ingest", "--in", "synth/raw.jsonl", "--out", "corpus.jsonl"]);
    go(&["filter", "--corpus", "corpus.jsonl", "--out", "filtered.jsonl", "--domains-out", "domains.toml"]);
    go(&["label", "--corpus", "filtered.jsonl", "--domains", "domains.toml", "--out", "labels.jsonl"]);
    go(&["sample", "--labels", "labels.jsonl", "--strategy", "balanced", "--out", "manifest.jsonl"]);
    go(&["embed", "--corpus", "filtered.jsonl", "--out", "emb.emb1", "--dim", "32"]);
    for m in ["gbt", "logreg"] {
        go(&["train", "--embeddings", "emb.emb1", "--manifest", "manifest.jsonl", "--model", m, "--out", &format!("{m}.json")]);
        go(&["predict", "--model", &format!("{m}.json"), "--embeddings", "emb.emb1", "--ids", "manifest.jsonl", "--out", &format!("p_{m}.jsonl")]);
    }
    go(&["ensemble", "--predictions", "p_gbt.jsonl", "p_logreg.jsonl", "--out", "p_ens.jsonl"]);
    go(&["evaluate", "--embeddings", "emb.emb1", "--manifest", "manifest.jsonl", "--folds", "5", "--models", "logreg,gbt", "--out", "cv.json", "--table", "cv.txt"]);
    go(&["characterize", "--corpus", "filtered.jsonl", "--labels", "labels.jsonl", "--out-dir", "char"]);
    go(&["pca", "--embeddings", "emb.emb1", "--labels", "manifest.jsonl", "--out", "scatter.csv"]);
}

#[test]
fn pipeline_is_byte_deterministic() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    pipeline(a.path());
    pipeline(b.path());
    for f in OUTPUTS {
        let x = std::fs::read(a.path().join(f)).unwrap_or_else(|e| panic!("{f}: {e}"));
        let y = std::fs::read(b.path().join(f)).unwrap();
        assert!(!x.is_empty(), "{f} is empty");
        assert!(x == y, "{f} differs between runs");
    }

    let cv: serde_json::Value = serde_json::from_slice(&std::fs::read(a.path().join("cv.json")).unwrap()).unwrap();
    let reports = cv.as_array().unwrap();
    let names: Vec<&str> = reports.iter().map(|r| r["model"].as_str().unwrap()).collect();
    assert_eq!(names, ["logreg", "gbt", "trafficker_classifier"]);
    for r in reports {
        assert_eq!(r["folds"].as_array().unwrap().len(), 5);
        assert!(r["mean"].is_object());
    }
    let table = std::fs::read_to_string(a.path().join("cv.txt")).unwrap();
    assert!(table.contains("trafficker_classifier"));

    let ens = std::fs::read_to_string(a.path().join("p_ens.jsonl")).unwrap();
    assert!(ens.lines().all(|l| l.contains("\"model_name\":\"trafficker_classifier\"")));
}

fn synthetic_labels(dir: &Path, risky: usize, safe: usize) -> PathBuf {
    let mut text = String::new();
    for i in 0..risky + safe {
        let label = if i < risky { "risky" } else { "safe" };
        text.push_str(&format!(
            "{{\"id\":\"{:016x}\",\"label\":\"{label}\",\"source\":\"direct\",\"evidence\":[]}}\n",
            i as u64 * 7919 + 1
        ));
    }
    let p = dir.join("labels.jsonl");
    std::fs::write(&p, text).unwrap();
    p
}

#[test]
fn sample_sizes_and_repeatability() {
    let dir = tempfile::tempdir().unwrap();
    synthetic_labels(dir.path(), 2816, 15_000);
    for (strategy, lines) in [("balanced", 5632), ("moderate", 14_080)] {
        let mut bytes = Vec::new();
        for run_no in 0..2 {
            let out = format!("{strategy}{run_no}.jsonl");
            ok(dir.path(), &["sample", "--labels", "labels.jsonl", "--strategy", strategy, "--seed", "42", "--out", &out]);
            bytes.push(std::fs::read(dir.path().join(&out)).unwrap());
        }
        assert_eq!(bytes[0], bytes[1]);
        let text = String::from_utf8(bytes.remove(0)).unwrap();
        assert_eq!(text.lines().count(), lines);
        let risky = text.lines().filter(|l| l.contains("\"risky\"")).count();
        assert_eq!(risky, 2816);
    }
}

fn error_json(out: &Output) -> serde_json::Value {
    let stderr = String::from_utf8_lossy(&out.stderr);
    let line = stderr.lines().rev().find(|l| l.starts_with('{')).expect("JSON error line");
    serde_json::from_str(line).unwrap()
}

#[test]
fn exit_codes_by_error_kind() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();

    let usage = run(d, &["sample", "--strategy", "lopsided"]);
    assert_eq!(usage.status.code(), Some(2));

    let missing = run(d, &["ingest", "--in", "nope.jsonl", "--out", "c.jsonl"]);
    assert_eq!(missing.status.code(), Some(3));
    let e = error_json(&missing);
    assert_eq!(e["error"], "missing_file");
    assert_eq!(e["exit_code"], 3);

    std::fs::write(d.join("bad.jsonl"), "{\"id\": 5}\n").unwrap();
    let schema = run(d, &["sample", "--labels", "bad.jsonl", "--strategy", "balanced", "--out", "m.jsonl"]);
    assert_eq!(schema.status.code(), Some(4));
    assert_eq!(error_json(&schema)["error"], "schema");

    std::fs::write(d.join("cfg.toml"), "bogus_key = 1\n").unwrap();
    let config = run(d, &["--config", "cfg.toml", "synth", "--out-dir", "s"]);
    assert_eq!(config.status.code(), Some(5));
    assert_eq!(error_json(&config)["error"], "config");

    synthetic_labels(d, 10, 5);
    let data = run(d, &["sample", "--labels", "labels.jsonl", "--strategy", "balanced", "--out", "m.jsonl"]);
    assert_eq!(data.status.code(), Some(6));
    assert_eq!(error_json(&data)["error"], "data");
}

#[test]
fn help_and_version_succeed() {
    let dir = tempfile::tempdir().unwrap();
    let help = ok(dir.path(), &["--help"]);
    let text = String::from_utf8_lossy(&help.stdout);
    for sub in ["ingest", "filter", "label", "sample", "train", "predict", "ensemble", "evaluate", "characterize", "synth"] {
        assert!(text.contains(sub), "help lacks {sub}");
    }
    ok(dir.path(), &["--version"]);
}
