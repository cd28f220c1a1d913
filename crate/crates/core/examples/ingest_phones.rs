// Raw JSONL → validated records: phone extraction, normalization, scrubbing
// and a per-line ingest report.

use adrisk::corpus::{extract_phones, ingest_str, scrub_phones, AdRecord, IngestReport};

pub fn run_example() -> (Vec<AdRecord>, IngestReport) {
    let raw = r#"{"domain":"ChineseInLA.com","title":"Restaurant help","body":"Waitress wanted. Call (626) 555-0142 or text 626.555.0199"}
{"domain":"jobsboard.com","title":"Nail salon","body":"Experienced tech, +1 718 555 2020, email hr@example.com"}
not json at all
{"domain":"jobsboard.com","title":"Empty","body":"   "}"#;
    let (records, report) = ingest_str(raw);
    for r in &records {
        let phones: Vec<&str> = r.phones.iter().map(|p| p.digits()).collect();
        println!("{} {} phones={:?}", r.id, r.domain, phones);
        let clean = scrub_phones(r);
        println!("  scrubbed: {}", clean.body);
        assert!(extract_phones(&clean.full_text()).is_empty());
    }
    println!("{} of {} lines accepted", report.accepted, report.lines);
    for e in &report.errors {
        println!("  line {}: {}", e.line, e.reason);
    }
    (records, report)
}

#[allow(dead_code)]
fn main() {
    run_example();
}
