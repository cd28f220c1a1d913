//! File formats shared with the external embedding adapter and with
//! baseline models that write their own prediction files.

use std::io::Write;

use adrisk::corpus::AdRecord;
use adrisk::embedstore::{pseudo_embed, read_emb1, write_emb1, EmbeddingMatrix};
use adrisk::ensemble::load_predictions;
use adrisk::labelnet::RiskClass;
use adrisk::learners::{read_predictions, write_predictions, Prediction};

/// Byte layout an adapter produces, built by hand.
fn adapter_bytes(ids: &[u64], dim: usize, rows: &[Vec<f32>]) -> Vec<u8> {
    let mut out = format!("EMB1 {} {}\n", ids.len(), dim).into_bytes();
    for (id, row) in ids.iter().zip(rows) {
        out.extend_from_slice(&id.to_le_bytes());
        for v in row {
            out.extend_from_slice(&v.to_le_bytes());
        }
    }
    out
}

#[test]
fn adapter_file_for_three_documents_round_trips() {
    let docs = [
        AdRecord::new("jobsboard.com", "Cook", "Line cook, call 213-555-0101").unwrap(),
        AdRecord::new("jobsboard.com", "Spa", "Spa girls wanted 213-555-0199").unwrap(),
        AdRecord::new("careerhub.com", "Driver", "Weekend delivery driver").unwrap(),
    ];
    let dim = 8;
    let ids: Vec<u64> = docs.iter().map(|d| d.id.0).collect();
    let rows: Vec<Vec<f32>> = (0..3).map(|i| (0..dim).map(|j| (i * dim + j) as f32 * 0.25 - 1.0).collect()).collect();
    let bytes = adapter_bytes(&ids, dim, &rows);
    assert!(bytes.starts_with(b"EMB1 3 8\n"));
    assert_eq!(bytes.len(), 9 + 3 * (8 + 4 * dim));

    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("adapter.emb1");
    std::fs::write(&path, &bytes).unwrap();
    let m = read_emb1(&path).unwrap();
    assert_eq!(m.ids(), ids.as_slice());
    assert_eq!(m.dim(), dim);
    for (i, row) in rows.iter().enumerate() {
        assert_eq!(m.row(i), row.as_slice());
    }
    let out = dir.path().join("rewritten.emb1");
    write_emb1(&m, &out).unwrap();
    assert_eq!(std::fs::read(&out).unwrap(), bytes);
}

#[test]
fn native_embedder_writes_same_layout() {
    let docs = [
        AdRecord::new("jobsboard.com", "A", "first ad body").unwrap(),
        AdRecord::new("jobsboard.com", "B", "second ad body").unwrap(),
        AdRecord::new("jobsboard.com", "C", "third ad body").unwrap(),
    ];
    let m = pseudo_embed(&docs, 16, 42).unwrap();
    let bytes = m.to_bytes();
    assert!(bytes.starts_with(b"EMB1 3 16\n"));
    let rows: Vec<Vec<f32>> = (0..3).map(|i| m.row(i).to_vec()).collect();
    assert_eq!(bytes, adapter_bytes(m.ids(), 16, &rows));
}

#[test]
fn malformed_adapter_files_are_rejected() {
    let good = adapter_bytes(&[1, 2], 2, &[vec![0.0, 1.0], vec![1.0, 0.0]]);
    assert!(EmbeddingMatrix::from_bytes(&good).is_ok());
    assert!(EmbeddingMatrix::from_bytes(&good[..good.len() - 1]).is_err());
    assert!(EmbeddingMatrix::from_bytes(b"EMB2 2 2\n").is_err());
    let dup = adapter_bytes(&[1, 1], 2, &[vec![0.0, 1.0], vec![1.0, 0.0]]);
    assert!(EmbeddingMatrix::from_bytes(&dup).is_err());
    let nan = adapter_bytes(&[1], 2, &[vec![f32::NAN, 0.0]]);
    assert!(EmbeddingMatrix::from_bytes(&nan).is_err());
}

#[test]
fn prediction_lines_follow_the_shared_schema() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("baseline.jsonl");
    let mut f = std::fs::File::create(&path).unwrap();
    writeln!(f, r#"{{"id":"00000000000000a1","score":0.9,"label":"risky","model_name":"gpt4"}}"#).unwrap();
    writeln!(f, r#"{{"id":"00000000000000a2","label":"safe","model_name":"gpt4"}}"#).unwrap();
    writeln!(f, r#"{{"id":"00000000000000a3","label":null,"model_name":"gpt4"}}"#).unwrap();
    drop(f);
    let rows = read_predictions(&path).unwrap();
    assert_eq!(rows[0].label, Some(RiskClass::Risky));
    assert_eq!(rows[1].score, None);
    assert_eq!(rows[2].label, None);

    let out = dir.path().join("out.jsonl");
    write_predictions(&out, &rows).unwrap();
    let text = std::fs::read_to_string(&out).unwrap();
    let third: serde_json::Value = serde_json::from_str(text.lines().nth(2).unwrap()).unwrap();
    assert!(third["label"].is_null());
    assert!(third.get("score").is_none());
    assert_eq!(read_predictions(&out).unwrap(), rows);
}

#[test]
fn out_of_range_scores_are_schema_errors() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.jsonl");
    std::fs::write(&path, r#"{"id":"a","score":1.5,"label":"risky","model_name":"m"}"#).unwrap();
    let err = read_predictions(&path).unwrap_err();
    assert_eq!(err.kind(), "schema");
}

#[test]
fn abstentions_cast_no_vote_in_the_ensemble() {
    let dir = tempfile::tempdir().unwrap();
    let mk = |model: &str, label: Option<RiskClass>| Prediction {
        id: "ad".into(),
        score: None,
        label,
        model_name: model.into(),
    };
    let paths: Vec<_> = [
        ("a", Some(RiskClass::Risky)),
        ("b", Some(RiskClass::Risky)),
        ("c", Some(RiskClass::Safe)),
        ("d", None),
    ]
    .iter()
    .map(|(m, l)| {
        let p = dir.path().join(format!("{m}.jsonl"));
        write_predictions(&p, &[mk(m, *l)]).unwrap();
        p
    })
    .collect();
    let ballot = load_predictions(&paths).unwrap();
    let set = &ballot.sets[0];
    assert!(set.complete);
    assert_eq!(set.votes.len(), 3);
    assert_eq!(set.label, RiskClass::Risky);
    assert!((set.risky_fraction() - 2.0 / 3.0).abs() < 1e-12);
}
