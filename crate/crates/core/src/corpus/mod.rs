//! Ingestion, cleaning and phone handling for advertisement records.

mod domain;
mod phone;
mod record;

pub use domain::{
    categorize_domains, domain_infos, filter_domains, uncategorized, CategoryLexicon, DomainInfo,
    DEFAULT_MIN_POSTS, ESCORT, JOB_BOARD, UNCATEGORIZED,
};
pub use phone::{
    extract_phones, find_phones, scrub_text, snippet_match, NormalizedPhone, PhoneMatch,
    PHONE_PLACEHOLDER,
};
pub use record::{
    content_id, dedup, detect_language, ingest, ingest_str, normalize_domain, read_corpus,
    scrub_phones, write_corpus, write_raw, AdId, AdRecord, CanonicalAd, IngestIssue, IngestReport,
    RawAd,
};
