// Pseudo-embeddings of scrubbed text, an EMB1 round trip and the join with
// labels that feeds the learners.

use adrisk::corpus::AdRecord;
use adrisk::embedstore::{join, pseudo_embed, read_emb1, write_emb1, Joined, MissingPolicy};
use adrisk::labelnet::RiskClass;

pub fn run_example() -> adrisk::Result<Joined> {
    let records = vec![
        AdRecord::new("jobsboard.com", "Cook", "Line cook needed, call 213-555-0101")?,
        AdRecord::new("jobsboard.com", "Massage", "Young girls wanted for massage, 213-555-0199")?,
        AdRecord::new("careerhub.com", "Driver", "Delivery driver, weekends")?,
    ];
    let matrix = pseudo_embed(&records, 16, 42)?;
    let dir = std::env::temp_dir().join(format!("adrisk-emb-{}", std::process::id()));
    std::fs::create_dir_all(&dir).map_err(|e| adrisk::Error::io(&dir, e))?;
    let path = dir.join("ads.emb1");
    write_emb1(&matrix, &path)?;
    let back = read_emb1(&path)?;
    let _ = std::fs::remove_dir_all(&dir);
    assert_eq!(back, matrix);
    println!("EMB1 {} x {} round-tripped", back.len(), back.dim());

    let labels = vec![
        (records[0].id, RiskClass::Safe),
        (records[1].id, RiskClass::Risky),
        (records[2].id, RiskClass::Safe),
    ];
    let joined = join(&back, &labels, MissingPolicy::Strict)?;
    println!("joined {} rows, targets {:?}", joined.x.nrows(), joined.y);
    Ok(joined)
}

#[allow(dead_code)]
fn main() -> adrisk::Result<()> {
    run_example().map(|_| ())
}
