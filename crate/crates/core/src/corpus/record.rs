use std::collections::{BTreeSet, HashSet};
use std::fmt;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use sha2::{Digest, Sha256};

use super::phone::{extract_phones, scrub_text, NormalizedPhone};
use crate::error::{Error, Result};
use crate::lexicon::is_cjk;

/// Content hash identifying one advertisement.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct AdId(pub u64);

impl fmt::Display for AdId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:016x}", self.0)
    }
}

impl fmt::Debug for AdId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "AdId({self})")
    }
}

impl FromStr for AdId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        u64::from_str_radix(s, 16)
            .map(AdId)
            .map_err(|_| Error::InvalidInput(format!("`{s}` is not a hex ad id")))
    }
}

impl Serialize for AdId {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for AdId {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

fn collapse_ws(text: &str) -> String {
    text.split_whitespace().collect::<Vec<_>>().join(" ").to_lowercase()
}

/// Deterministic id from lowercased, whitespace-collapsed title and body plus
/// the domain: the first eight bytes (big-endian) of a SHA-256 digest.
pub fn content_id(title: &str, body: &str, domain: &str) -> AdId {
    let mut hasher = Sha256::new();
    hasher.update(collapse_ws(title).as_bytes());
    hasher.update([0x1f]);
    hasher.update(collapse_ws(body).as_bytes());
    hasher.update([0x1f]);
    hasher.update(normalize_domain(domain).as_bytes());
    let digest = hasher.finalize();
    let mut head = [0u8; 8];
    head.copy_from_slice(&digest[..8]);
    AdId(u64::from_be_bytes(head))
}

/// Lowercase and strip scheme, `www.`, port and path.
pub fn normalize_domain(domain: &str) -> String {
    let d = domain.trim().to_lowercase();
    let d = d
        .strip_prefix("https://")
        .or_else(|| d.strip_prefix("http://"))
        .unwrap_or(&d);
    let d = d.strip_prefix("www.").unwrap_or(d);
    let d = d.split(['/', '?', '#']).next().unwrap_or("");
    d.split(':').next().unwrap_or("").to_string()
}

/// Script-majority guess: Han/kana/hangul → `zh`, Cyrillic → `ru`, Latin →
/// `en`, otherwise `und`.
pub fn detect_language(text: &str) -> String {
    let (mut cjk, mut cyr, mut lat) = (0usize, 0usize, 0usize);
    for c in text.chars() {
        if is_cjk(c) {
            cjk += 1;
        } else if ('\u{0400}'..='\u{04FF}').contains(&c) {
            cyr += 1;
        } else if c.is_ascii_alphabetic() {
            lat += 1;
        }
    }
    // one Han character carries roughly a word; weight accordingly
    let scores = [("zh", cjk * 3), ("ru", cyr), ("en", lat)];
    match scores.iter().max_by_key(|(_, s)| *s) {
        Some((lang, s)) if *s > 0 => lang.to_string(),
        _ => "und".to_string(),
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AdRecord {
    pub id: AdId,
    pub domain: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub url: Option<String>,
    pub title: String,
    pub body: String,
    pub language: String,
    pub phones: BTreeSet<NormalizedPhone>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub snippet: Option<String>,
}

impl AdRecord {
    pub fn new(domain: &str, title: &str, body: &str) -> Result<Self> {
        Self::from_raw(RawAd {
            domain: domain.to_string(),
            url: None,
            title: title.to_string(),
            body: body.to_string(),
            language: None,
            snippet: None,
        })
    }

    fn from_raw(raw: RawAd) -> Result<Self> {
        if raw.body.trim().is_empty() {
            return Err(Error::InvalidInput("empty body".into()));
        }
        let domain = normalize_domain(&raw.domain);
        if domain.is_empty() {
            return Err(Error::InvalidInput("empty domain".into()));
        }
        let id = content_id(&raw.title, &raw.body, &domain);
        let mut phones = extract_phones(&raw.title);
        phones.extend(extract_phones(&raw.body));
        let language = match raw.language {
            Some(l) if !l.trim().is_empty() => l.trim().to_string(),
            _ => detect_language(&format!("{} {}", raw.title, raw.body)),
        };
        Ok(Self {
            id,
            domain,
            url: raw.url,
            title: raw.title,
            body: raw.body,
            language,
            phones,
            snippet: raw.snippet,
        })
    }

    /// Title and body joined the way attribute extraction reads them.
    pub fn full_text(&self) -> String {
        format!("{}\n{}", self.title, self.body)
    }
}

/// One input line of the raw ad corpus.
#[derive(Debug, Clone, Deserialize, Serialize)]
pub struct RawAd {
    pub domain: String,
    #[serde(default)]
    pub url: Option<String>,
    pub title: String,
    pub body: String,
    #[serde(default)]
    pub language: Option<String>,
    #[serde(default)]
    pub snippet: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct IngestIssue {
    /// 1-based line number.
    pub line: usize,
    pub reason: String,
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct IngestReport {
    pub lines: usize,
    pub accepted: usize,
    pub errors: Vec<IngestIssue>,
}

/// Parse raw JSONL text. Bad lines are reported, never fatal.
pub fn ingest_str(src: &str) -> (Vec<AdRecord>, IngestReport) {
    ingest_lines(src.lines().map(|l| Ok(l.to_string())))
        .expect("in-memory lines cannot fail")
}

pub fn ingest(path: &Path) -> Result<(Vec<AdRecord>, IngestReport)> {
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    let reader = BufReader::new(file);
    ingest_lines(reader.lines().map(|l| l.map_err(|e| Error::io(path, e))))
}

fn ingest_lines(lines: impl Iterator<Item = Result<String>>) -> Result<(Vec<AdRecord>, IngestReport)> {
    let mut records = Vec::new();
    let mut report = IngestReport::default();
    for (idx, line) in lines.enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        report.lines += 1;
        let parsed = serde_json::from_str::<RawAd>(&line)
            .map_err(|e| Error::InvalidInput(e.to_string()))
            .and_then(AdRecord::from_raw);
        match parsed {
            Ok(rec) => records.push(rec),
            Err(e) => report.errors.push(IngestIssue {
                line: idx + 1,
                reason: match e {
                    Error::InvalidInput(m) => m,
                    other => other.to_string(),
                },
            }),
        }
    }
    report.accepted = records.len();
    Ok((records, report))
}

/// Keep the first record for each id, preserving input order.
pub fn dedup(records: Vec<AdRecord>) -> Vec<AdRecord> {
    let mut seen = HashSet::with_capacity(records.len());
    records.into_iter().filter(|r| seen.insert(r.id)).collect()
}

/// Copy of `record` with phone numbers in title and body replaced by
/// `<PHONE>`. `phones` and `id` are kept for labeling.
pub fn scrub_phones(record: &AdRecord) -> AdRecord {
    AdRecord {
        title: scrub_text(&record.title),
        body: scrub_text(&record.body),
        ..record.clone()
    }
}

/// Line of the canonical corpus file.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CanonicalAd {
    #[serde(flatten)]
    pub record: AdRecord,
    pub scrubbed_title: String,
    pub scrubbed_body: String,
}

impl CanonicalAd {
    pub fn from_record(record: &AdRecord) -> Self {
        let scrubbed = scrub_phones(record);
        Self {
            record: record.clone(),
            scrubbed_title: scrubbed.title,
            scrubbed_body: scrubbed.body,
        }
    }
}

pub fn write_corpus(records: &[AdRecord], path: &Path) -> Result<()> {
    let rows: Vec<CanonicalAd> = records.iter().map(CanonicalAd::from_record).collect();
    crate::io::write_jsonl(path, &rows)
}

pub fn read_corpus(path: &Path) -> Result<Vec<AdRecord>> {
    let rows: Vec<CanonicalAd> = crate::io::read_jsonl(path)?;
    Ok(rows.into_iter().map(|c| c.record).collect())
}

/// Write the records as raw input lines (the format [`ingest`] reads).
pub fn write_raw(records: &[AdRecord], path: &Path) -> Result<()> {
    let file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
    let mut out = BufWriter::new(file);
    for r in records {
        let raw = RawAd {
            domain: r.domain.clone(),
            url: r.url.clone(),
            title: r.title.clone(),
            body: r.body.clone(),
            language: Some(r.language.clone()),
            snippet: r.snippet.clone(),
        };
        serde_json::to_writer(&mut out, &raw)?;
        out.write_all(b"\n").map_err(|e| Error::io(path, e))?;
    }
    out.flush().map_err(|e| Error::io(path, e))
}
