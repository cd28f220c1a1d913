//! Ordered keyword lexicons loaded from TOML.
//!
//! ```toml
//! priority = ["job_board", "escort"]
//!
//! [categories]
//! job_board = ["work", "chinesein"]
//! escort = ["escort", "sex"]
//! ```
//!
//! Categories are consulted in `priority` order; categories missing from
//! `priority` follow in name order. A keyword may belong to only one category.

use std::collections::{BTreeMap, HashMap};
use std::path::Path;

use serde::Deserialize;

use crate::error::{Error, Result};

#[derive(Debug, Deserialize)]
struct RawLexicon {
    #[serde(default)]
    priority: Vec<String>,
    categories: BTreeMap<String, Vec<String>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct KeywordLexicon {
    /// Categories in match priority order, keywords lowercased.
    entries: Vec<(String, Vec<String>)>,
}

impl KeywordLexicon {
    pub fn from_toml_str(src: &str) -> Result<Self> {
        let raw: RawLexicon =
            toml::from_str(src).map_err(|e| Error::Config(format!("lexicon: {e}")))?;
        let mut order = Vec::new();
        for name in &raw.priority {
            if !raw.categories.contains_key(name) {
                return Err(Error::Config(format!(
                    "priority lists unknown category `{name}`"
                )));
            }
            if order.contains(name) {
                return Err(Error::Config(format!("category `{name}` repeated in priority")));
            }
            order.push(name.clone());
        }
        for name in raw.categories.keys() {
            if !order.contains(name) {
                order.push(name.clone());
            }
        }

        let mut owner: HashMap<String, String> = HashMap::new();
        let mut entries = Vec::with_capacity(order.len());
        for name in order {
            let keywords: Vec<String> = raw.categories[&name]
                .iter()
                .map(|k| k.trim().to_lowercase())
                .filter(|k| !k.is_empty())
                .collect();
            if keywords.is_empty() {
                return Err(Error::Config(format!("category `{name}` has no keywords")));
            }
            for kw in &keywords {
                if let Some(prev) = owner.insert(kw.clone(), name.clone()) {
                    if prev != name {
                        return Err(Error::Config(format!(
                            "keyword `{kw}` appears in both `{prev}` and `{name}`"
                        )));
                    }
                }
            }
            entries.push((name, keywords));
        }
        Ok(Self { entries })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let src = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_toml_str(&src)
    }

    pub fn categories(&self) -> impl Iterator<Item = &str> {
        self.entries.iter().map(|(name, _)| name.as_str())
    }

    pub fn contains_category(&self, name: &str) -> bool {
        self.entries.iter().any(|(n, _)| n == name)
    }

    pub fn keywords(&self, category: &str) -> Option<&[String]> {
        self.entries
            .iter()
            .find(|(n, _)| n == category)
            .map(|(_, k)| k.as_slice())
    }

    /// First category (priority order) with a keyword that is a plain
    /// case-insensitive substring of `text`. Used for domain names, which
    /// have no word boundaries.
    pub fn match_substring(&self, text: &str) -> Option<&str> {
        let text = text.to_lowercase();
        self.entries
            .iter()
            .find(|(_, kws)| kws.iter().any(|kw| text.contains(kw.as_str())))
            .map(|(name, _)| name.as_str())
    }

    /// First category (priority order) with a keyword found in running text
    /// under [`find_keyword`] rules.
    pub fn match_text(&self, text: &str) -> Option<&str> {
        let text = text.to_lowercase();
        self.entries
            .iter()
            .find(|(_, kws)| kws.iter().any(|kw| find_keyword(&text, kw).is_some()))
            .map(|(name, _)| name.as_str())
    }

    /// Earliest byte offset (in the lowercased text) of any keyword of
    /// `category`.
    pub fn earliest(&self, lowered_text: &str, category: &str) -> Option<usize> {
        self.keywords(category)?
            .iter()
            .filter_map(|kw| find_keyword(lowered_text, kw))
            .min()
    }
}

pub(crate) fn is_cjk(c: char) -> bool {
    matches!(c as u32,
        0x3040..=0x30FF
        | 0x3400..=0x4DBF
        | 0x4E00..=0x9FFF
        | 0xAC00..=0xD7AF
        | 0xF900..=0xFAFF
        | 0x20000..=0x2A6DF)
}

fn is_word_char(c: char) -> bool {
    c.is_alphanumeric() && !is_cjk(c)
}

/// Locate `keyword` in `haystack`; both must already be lowercased.
///
/// Keywords containing CJK characters match as plain substrings. Any other
/// keyword must start at a word boundary and end at one, optionally after a
/// plural `s`/`es` suffix. CJK characters count as boundaries, so `female`
/// never yields a hit for `male`.
pub fn find_keyword(haystack: &str, keyword: &str) -> Option<usize> {
    if keyword.is_empty() {
        return None;
    }
    if keyword.chars().any(is_cjk) {
        return haystack.find(keyword);
    }
    let pluralizable = keyword
        .chars()
        .last()
        .map(|c| c.is_ascii_alphabetic())
        .unwrap_or(false);
    for (start, _) in haystack.match_indices(keyword) {
        let left_ok = haystack[..start]
            .chars()
            .next_back()
            .is_none_or(|c| !is_word_char(c));
        if !left_ok {
            continue;
        }
        let rest = &haystack[start + keyword.len()..];
        let ends_at_boundary =
            |tail: &str| tail.chars().next().is_none_or(|c| !is_word_char(c));
        if ends_at_boundary(rest)
            || (pluralizable
                && ["s", "es"]
                    .iter()
                    .any(|suf| rest.strip_prefix(suf).is_some_and(ends_at_boundary)))
        {
            return Some(start);
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;

    const SAMPLE: &str = r#"
        priority = ["job_board", "escort"]
        [categories]
        escort = ["escort", "sex"]
        job_board = ["work", "chinesein", "ren"]
        social_media = ["facebook"]
    "#;

    #[test]
    fn priority_order_then_name_order() {
        let lex = KeywordLexicon::from_toml_str(SAMPLE).unwrap();
        let cats: Vec<_> = lex.categories().collect();
        assert_eq!(cats, ["job_board", "escort", "social_media"]);
    }

    #[test]
    fn duplicate_keyword_is_config_error() {
        let src = r#"
            [categories]
            a = ["work"]
            b = ["WORK"]
        "#;
        assert!(matches!(
            KeywordLexicon::from_toml_str(src),
            Err(Error::Config(_))
        ));
    }

    #[test]
    fn empty_category_is_config_error() {
        let src = "[categories]\na = []\n";
        assert!(KeywordLexicon::from_toml_str(src).is_err());
    }

    #[test]
    fn substring_match_for_domains() {
        let lex = KeywordLexicon::from_toml_str(SAMPLE).unwrap();
        assert_eq!(lex.match_substring("ChineseInLA"), Some("job_board"));
        assert_eq!(lex.match_substring("500work"), Some("job_board"));
        assert_eq!(lex.match_substring("bestescorts"), Some("escort"));
        assert_eq!(lex.match_substring("example"), None);
    }

    #[test]
    fn word_boundaries_for_latin_keywords() {
        assert_eq!(find_keyword("experienced female masseuses", "male"), None);
        assert_eq!(find_keyword("male or female", "male"), Some(0));
        assert!(find_keyword("experienced female masseuses", "masseuse").is_some());
        assert!(find_keyword("two females wanted", "female").is_some());
        assert!(find_keyword("human resources", "man").is_none());
    }

    #[test]
    fn cjk_keywords_match_as_substrings() {
        assert!(find_keyword("招聘女技师", "女").is_some());
        assert!(find_keyword("招聘按摩师", "按摩").is_some());
        assert!(find_keyword("在atlanta工作", "atlanta").is_some());
    }
}
