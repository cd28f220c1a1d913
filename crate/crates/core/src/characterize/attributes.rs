use std::collections::BTreeSet;
use std::fmt;
use std::path::Path;
use std::sync::OnceLock;

use regex::Regex;
use serde::{Deserialize, Serialize};

use super::location::{AreaCodeTable, UsState};
use crate::corpus::{find_phones, AdId, AdRecord, NormalizedPhone};
use crate::defaults;
use crate::error::{Error, Result};
use crate::lexicon::{find_keyword, KeywordLexicon};

pub const UNCATEGORIZED_INDUSTRY: &str = "uncategorized";
pub const SEX_WORK_INDUSTRY: &str = "sex_work";

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Gender {
    Female,
    Male,
    Couple,
    Unspecified,
}

impl fmt::Display for Gender {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ContactMethod {
    Phone,
    Email,
    Wechat,
    OtherIm,
    InPerson,
}

impl ContactMethod {
    pub fn as_str(self) -> &'static str {
        match self {
            ContactMethod::Phone => "phone",
            ContactMethod::Email => "email",
            ContactMethod::Wechat => "wechat",
            ContactMethod::OtherIm => "other_im",
            ContactMethod::InPerson => "in_person",
        }
    }

    fn from_category(name: &str) -> Option<Self> {
        match name {
            "wechat" => Some(ContactMethod::Wechat),
            "other_im" => Some(ContactMethod::OtherIm),
            "in_person" => Some(ContactMethod::InPerson),
            _ => None,
        }
    }
}

/// Keyword tables used for attribute extraction.
#[derive(Debug, Clone)]
pub struct Lexicons {
    pub domain_location: KeywordLexicon,
    pub job_location: KeywordLexicon,
    pub industry: KeywordLexicon,
    pub gender: KeywordLexicon,
    pub contact: KeywordLexicon,
    pub area_codes: AreaCodeTable,
}

fn check_states(lex: &KeywordLexicon, what: &str) -> Result<()> {
    for c in lex.categories() {
        if UsState::from_code(c).is_none() {
            return Err(Error::Config(format!("{what} lexicon: {c} is not a state code")));
        }
    }
    Ok(())
}

impl Lexicons {
    pub fn new(
        domain_location: KeywordLexicon,
        job_location: KeywordLexicon,
        industry: KeywordLexicon,
        gender: KeywordLexicon,
        contact: KeywordLexicon,
        area_codes: AreaCodeTable,
    ) -> Result<Self> {
        check_states(&domain_location, "domain location")?;
        check_states(&job_location, "job location")?;
        for g in gender.categories() {
            if !matches!(g, "couple" | "female" | "male") {
                return Err(Error::Config(format!("gender lexicon: unknown category {g}")));
            }
        }
        for c in contact.categories() {
            if ContactMethod::from_category(c).is_none() {
                return Err(Error::Config(format!("contact lexicon: unknown category {c}")));
            }
        }
        if industry.contains_category(UNCATEGORIZED_INDUSTRY) {
            return Err(Error::Config("industry lexicon may not define `uncategorized`".into()));
        }
        Ok(Self {
            domain_location,
            job_location,
            industry,
            gender,
            contact,
            area_codes,
        })
    }

    pub fn builtin() -> Self {
        let lex = |s| KeywordLexicon::from_toml_str(s).expect("bundled lexicon is valid");
        Self::new(
            lex(defaults::DOMAIN_LOCATIONS),
            lex(defaults::JOB_LOCATIONS),
            lex(defaults::INDUSTRIES),
            lex(defaults::GENDER),
            lex(defaults::CONTACT_METHODS),
            AreaCodeTable::builtin(),
        )
        .expect("bundled lexicons are consistent")
    }

    /// Bundled tables with any given file replacing its counterpart.
    pub fn with_overrides(paths: &LexiconPaths) -> Result<Self> {
        let base = Self::builtin();
        let pick = |p: &Option<std::path::PathBuf>, d: KeywordLexicon| match p {
            Some(p) => KeywordLexicon::load(p),
            None => Ok(d),
        };
        Self::new(
            pick(&paths.domain_locations, base.domain_location)?,
            pick(&paths.job_locations, base.job_location)?,
            pick(&paths.industries, base.industry)?,
            pick(&paths.gender, base.gender)?,
            pick(&paths.contact_methods, base.contact)?,
            match &paths.area_codes {
                Some(p) => AreaCodeTable::load(p)?,
                None => base.area_codes,
            },
        )
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LexiconPaths {
    pub domain_locations: Option<std::path::PathBuf>,
    pub job_locations: Option<std::path::PathBuf>,
    pub industries: Option<std::path::PathBuf>,
    pub gender: Option<std::path::PathBuf>,
    pub contact_methods: Option<std::path::PathBuf>,
    pub area_codes: Option<std::path::PathBuf>,
}

impl LexiconPaths {
    pub fn resolve(&self, base: &Path) -> Self {
        let r = |p: &Option<std::path::PathBuf>| p.as_ref().map(|p| base.join(p));
        Self {
            domain_locations: r(&self.domain_locations),
            job_locations: r(&self.job_locations),
            industries: r(&self.industries),
            gender: r(&self.gender),
            contact_methods: r(&self.contact_methods),
            area_codes: r(&self.area_codes),
        }
    }
}

/// State from substrings of the domain name; `None` means Unspecified.
pub fn domain_location(domain: &str, lexicon: &KeywordLexicon) -> Option<UsState> {
    lexicon.match_substring(domain).and_then(UsState::from_code)
}

/// Claimed job location (`None` = Unknown) and industry.
pub fn job_attributes(
    text: &str,
    locations: &KeywordLexicon,
    industries: &KeywordLexicon,
) -> (Option<UsState>, String) {
    let loc = locations.match_text(text).and_then(UsState::from_code);
    let industry = industries
        .match_text(text)
        .unwrap_or(UNCATEGORIZED_INDUSTRY)
        .to_string();
    (loc, industry)
}

/// `None` means Unknown.
pub fn phone_location(phone: &NormalizedPhone, table: &AreaCodeTable) -> Option<UsState> {
    table.lookup(phone)
}

/// Couple wins over any gender mention; otherwise exactly one of
/// female/male decides, and both or neither is Unspecified.
pub fn gender_preference(text: &str, lexicon: &KeywordLexicon) -> Gender {
    let lowered = text.to_lowercase();
    let hit = |cat: &str| lexicon.earliest(&lowered, cat).is_some();
    if hit("couple") {
        return Gender::Couple;
    }
    match (hit("female"), hit("male")) {
        (true, false) => Gender::Female,
        (false, true) => Gender::Male,
        _ => Gender::Unspecified,
    }
}

fn email_pattern() -> &'static Regex {
    static RE: OnceLock<Regex> = OnceLock::new();
    RE.get_or_init(|| {
        Regex::new(r"[a-z0-9._%+\-]+@[a-z0-9\-]+(?:\.[a-z0-9\-]+)*\.[a-z]{2,}").expect("valid regex")
    })
}

/// All contact channels and the one mentioned first. Phone counts only when
/// the record carries extracted phones.
pub fn contact_methods(
    record: &AdRecord,
    lexicon: &KeywordLexicon,
) -> (BTreeSet<ContactMethod>, Option<ContactMethod>) {
    let lowered = record.full_text().to_lowercase();
    let mut found: Vec<(usize, ContactMethod)> = Vec::new();
    if !record.phones.is_empty() {
        let pos = find_phones(&lowered).first().map_or(usize::MAX, |m| m.start);
        found.push((pos, ContactMethod::Phone));
    }
    if let Some(m) = email_pattern().find(&lowered) {
        found.push((m.start(), ContactMethod::Email));
    }
    for cat in lexicon.categories() {
        if let (Some(pos), Some(method)) = (lexicon.earliest(&lowered, cat), ContactMethod::from_category(cat)) {
            found.push((pos, method));
        }
    }
    let primary = found.iter().min().map(|(_, m)| *m);
    (found.into_iter().map(|(_, m)| m).collect(), primary)
}

/// The phone mentioned first in the text, falling back to the smallest
/// extracted number.
pub fn primary_phone(record: &AdRecord) -> Option<NormalizedPhone> {
    find_phones(&record.full_text())
        .into_iter()
        .map(|m| m.phone)
        .find(|p| record.phones.contains(p))
        .or_else(|| record.phones.iter().next().copied())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AttributeRecord {
    pub id: AdId,
    /// `None` = Unspecified.
    pub domain_loc: Option<UsState>,
    /// `None` = Unknown.
    pub job_loc: Option<UsState>,
    /// `None` = Unknown.
    pub phone_loc: Option<UsState>,
    pub gender: Gender,
    pub industry: String,
    pub contact_methods: BTreeSet<ContactMethod>,
    pub primary_contact: Option<ContactMethod>,
    /// Set for sex-work industry rows, which are kept but set apart.
    pub flagged: bool,
}

impl AttributeRecord {
    pub fn extract(record: &AdRecord, lex: &Lexicons) -> Self {
        let text = record.full_text();
        let (job_loc, industry) = job_attributes(&text, &lex.job_location, &lex.industry);
        let (methods, primary) = contact_methods(record, &lex.contact);
        Self {
            id: record.id,
            domain_loc: domain_location(&record.domain, &lex.domain_location),
            job_loc,
            phone_loc: primary_phone(record).and_then(|p| phone_location(&p, &lex.area_codes)),
            gender: gender_preference(&text, &lex.gender),
            flagged: industry == SEX_WORK_INDUSTRY,
            industry,
            contact_methods: methods,
            primary_contact: primary,
        }
    }
}

pub fn location_label(loc: Option<UsState>, missing: &'static str) -> String {
    loc.map_or_else(|| missing.to_string(), |s| s.code().to_string())
}

/// Words like `female` must not trigger `male`.
pub fn mentions(text: &str, keyword: &str) -> bool {
    find_keyword(&text.to_lowercase(), &keyword.to_lowercase()).is_some()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lex() -> Lexicons {
        Lexicons::builtin()
    }

    fn st(c: &str) -> Option<UsState> {
        UsState::from_code(c)
    }

    #[test]
    fn domain_locations() {
        let l = lex();
        assert_eq!(domain_location("chineseinla", &l.domain_location), st("CA"));
        assert_eq!(domain_location("chineseinsfbay", &l.domain_location), st("CA"));
        assert_eq!(domain_location("500work", &l.domain_location), None);
        assert_eq!(domain_location("rusrek", &l.domain_location), None);
    }

    #[test]
    fn job_attribute_examples() {
        let l = lex();
        assert_eq!(
            job_attributes("Atlanta recruits masseuses", &l.job_location, &l.industry),
            (st("GA"), "massage".to_string())
        );
        assert_eq!(
            job_attributes("nothing to see here", &l.job_location, &l.industry),
            (None, UNCATEGORIZED_INDUSTRY.to_string())
        );
        assert_eq!(
            job_attributes(
                "Beauty shopping guide wanted, New York Chinese Information Network",
                &l.job_location,
                &l.industry
            ),
            (st("NY"), "clerical".to_string())
        );
    }

    #[test]
    fn gender_examples() {
        let g = &lex().gender;
        assert_eq!(gender_preference("recruits experienced female masseuses", g), Gender::Female);
        assert_eq!(gender_preference("seeking a married couple", g), Gender::Couple);
        assert_eq!(gender_preference("male or female welcome", g), Gender::Unspecified);
        assert_eq!(gender_preference("male cook wanted", g), Gender::Male);
        assert_eq!(gender_preference("招聘女服务员", g), Gender::Female);
        assert_eq!(gender_preference("男女不限", g), Gender::Unspecified);
        assert_eq!(gender_preference("hiring now", g), Gender::Unspecified);
    }

    #[test]
    fn contact_examples() {
        let l = lex();
        let r = AdRecord::new("x.com", "Shopping guide", "Contact number: 3474293421").unwrap();
        let (set, primary) = contact_methods(&r, &l.contact);
        assert_eq!(set, BTreeSet::from([ContactMethod::Phone]));
        assert_eq!(primary, Some(ContactMethod::Phone));

        let r = AdRecord::new("x.com", "Clerk", "send resume to jobs@example.com").unwrap();
        let (set, primary) = contact_methods(&r, &l.contact);
        assert_eq!(set, BTreeSet::from([ContactMethod::Email]));
        assert_eq!(primary, Some(ContactMethod::Email));

        let r = AdRecord::new("x.com", "Clerk", "call 347-429-3421 or add wechat abc").unwrap();
        let (set, primary) = contact_methods(&r, &l.contact);
        assert_eq!(set, BTreeSet::from([ContactMethod::Phone, ContactMethod::Wechat]));
        assert_eq!(primary, Some(ContactMethod::Phone));

        let r = AdRecord::new("x.com", "Clerk", "wechat first, then 347-429-3421").unwrap();
        assert_eq!(contact_methods(&r, &l.contact).1, Some(ContactMethod::Wechat));

        let r = AdRecord::new("x.com", "Clerk", "apply online").unwrap();
        assert_eq!(contact_methods(&r, &l.contact), (BTreeSet::new(), None));
    }

    #[test]
    fn full_record_extraction() {
        let r = AdRecord::new(
            "chineseinatlanta.com",
            "Atlanta recruits masseuses",
            "Recruits experienced female masseuses. Call 770-241-3449",
        )
        .unwrap();
        let a = AttributeRecord::extract(&r, &lex());
        assert_eq!(a.job_loc, st("GA"));
        assert_eq!(a.phone_loc, st("GA"));
        assert_eq!(a.domain_loc, st("GA"));
        assert_eq!(a.gender, Gender::Female);
        assert_eq!(a.industry, "massage");
        assert!(!a.flagged);
    }

    #[test]
    fn word_boundaries_for_latin_keywords() {
        assert!(!mentions("female only", "male"));
        assert!(mentions("Male staff", "male"));
    }
}
