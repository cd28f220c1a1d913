use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::record::AdRecord;
use crate::error::{Error, Result};
use crate::lexicon::KeywordLexicon;

pub const JOB_BOARD: &str = "job_board";
pub const ESCORT: &str = "escort";
pub const UNCATEGORIZED: &str = "uncategorized";

pub const DEFAULT_MIN_POSTS: usize = 5;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DomainInfo {
    pub name: String,
    pub category: String,
    pub post_count: usize,
}

impl DomainInfo {
    pub fn is_escort(&self) -> bool {
        self.category == ESCORT
    }
}

/// Keyword lexicon for domain categories; `job_board` and `escort` are
/// mandatory.
#[derive(Debug, Clone)]
pub struct CategoryLexicon(KeywordLexicon);

impl CategoryLexicon {
    pub fn new(lexicon: KeywordLexicon) -> Result<Self> {
        for reserved in [JOB_BOARD, ESCORT] {
            if !lexicon.contains_category(reserved) {
                return Err(Error::Config(format!(
                    "domain lexicon lacks reserved category `{reserved}`"
                )));
            }
        }
        if lexicon.contains_category(UNCATEGORIZED) {
            return Err(Error::Config(format!("`{UNCATEGORIZED}` is reserved for unmatched domains")));
        }
        Ok(Self(lexicon))
    }

    pub fn from_toml_str(src: &str) -> Result<Self> {
        Self::new(KeywordLexicon::from_toml_str(src)?)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::new(KeywordLexicon::load(path)?)
    }

    pub fn builtin() -> Self {
        Self::from_toml_str(crate::defaults::DOMAIN_CATEGORIES).expect("bundled lexicon is valid")
    }

    pub fn category_of(&self, domain: &str) -> &str {
        self.0.match_substring(domain).unwrap_or(UNCATEGORIZED)
    }

    pub fn lexicon(&self) -> &KeywordLexicon {
        &self.0
    }
}

/// Count posts per domain. Categories start out as `uncategorized`.
pub fn domain_infos(records: &[AdRecord]) -> Vec<DomainInfo> {
    let mut counts: BTreeMap<&str, usize> = BTreeMap::new();
    for r in records {
        *counts.entry(r.domain.as_str()).or_default() += 1;
    }
    counts
        .into_iter()
        .map(|(name, post_count)| DomainInfo {
            name: name.to_string(),
            category: UNCATEGORIZED.to_string(),
            post_count,
        })
        .collect()
}

/// Drop every domain with fewer than `min_posts` records, together with its
/// records. Record contents are untouched.
pub fn filter_domains(
    records: Vec<AdRecord>,
    min_posts: usize,
) -> Result<(Vec<AdRecord>, Vec<DomainInfo>)> {
    if min_posts == 0 {
        return Err(Error::InvalidInput("min_posts must be at least 1".into()));
    }
    let infos = domain_infos(&records);
    let (keep, dropped): (Vec<_>, Vec<_>) =
        infos.into_iter().partition(|d| d.post_count >= min_posts);
    let keep: std::collections::HashSet<String> = keep.into_iter().map(|d| d.name).collect();
    let kept = records
        .into_iter()
        .filter(|r| keep.contains(&r.domain))
        .collect();
    Ok((kept, dropped))
}

/// Assign each domain the first category whose keyword occurs in its name.
pub fn categorize_domains(domains: &[DomainInfo], lexicon: &CategoryLexicon) -> Vec<DomainInfo> {
    domains
        .iter()
        .map(|d| DomainInfo {
            category: lexicon.category_of(&d.name).to_string(),
            ..d.clone()
        })
        .collect()
}

/// Domains the lexicon could not place; candidates for keyword expansion.
pub fn uncategorized(domains: &[DomainInfo]) -> Vec<&DomainInfo> {
    domains.iter().filter(|d| d.category == UNCATEGORIZED).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lexicon() -> CategoryLexicon {
        CategoryLexicon::from_toml_str(
            r#"
            priority = ["escort", "job_board"]
            [categories]
            job_board = ["work", "chinesein", "ren"]
            escort = ["escort", "sex"]
            "#,
        )
        .unwrap()
    }

    fn posts(domain: &str, n: usize) -> Vec<AdRecord> {
        (0..n)
            .map(|i| AdRecord::new(domain, "t", &format!("post {i}")).unwrap())
            .collect()
    }

    #[test]
    fn four_posts_dropped_five_kept() {
        let mut recs = posts("four.com", 4);
        recs.extend(posts("five.com", 5));
        let (kept, dropped) = filter_domains(recs, DEFAULT_MIN_POSTS).unwrap();
        assert_eq!(kept.len(), 5);
        assert!(kept.iter().all(|r| r.domain == "five.com"));
        assert_eq!(dropped.len(), 1);
        assert_eq!(dropped[0].name, "four.com");
        assert_eq!(dropped[0].post_count, 4);
    }

    #[test]
    fn mixed_fixture_drops_only_small_domain() {
        let mut recs = posts("a.com", 3);
        recs.extend(posts("b.com", 5));
        recs.extend(posts("c.com", 100));
        let before: Vec<_> = recs.iter().filter(|r| r.domain != "a.com").cloned().collect();
        let (kept, dropped) = filter_domains(recs, 5).unwrap();
        assert_eq!(kept, before);
        assert_eq!(dropped.iter().map(|d| d.name.as_str()).collect::<Vec<_>>(), ["a.com"]);
    }

    #[test]
    fn zero_min_posts_rejected() {
        assert!(filter_domains(vec![], 0).is_err());
    }

    #[test]
    fn categorize_examples() {
        let infos = ["chineseinla.com", "bestescorts.net", "500work.com", "example.org"]
            .iter()
            .map(|n| DomainInfo {
                name: n.to_string(),
                category: UNCATEGORIZED.into(),
                post_count: 5,
            })
            .collect::<Vec<_>>();
        let out = categorize_domains(&infos, &lexicon());
        let cats: Vec<_> = out.iter().map(|d| d.category.as_str()).collect();
        assert_eq!(cats, [JOB_BOARD, ESCORT, JOB_BOARD, UNCATEGORIZED]);
        assert_eq!(uncategorized(&out).len(), 1);
    }

    #[test]
    fn reserved_categories_required() {
        let err = CategoryLexicon::from_toml_str("[categories]\njob_board = [\"work\"]\n");
        assert!(matches!(err, Err(Error::Config(_))));
    }

    #[test]
    fn builtin_lexicon_loads() {
        let lex = CategoryLexicon::builtin();
        assert_eq!(lex.category_of("chineseinla"), JOB_BOARD);
        assert_eq!(lex.category_of("500work"), JOB_BOARD);
    }
}
