use std::collections::HashMap;
use std::fmt;
use std::path::Path;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::corpus::NormalizedPhone;
use crate::error::{Error, Result};

const STATES: [(&str, &str); 51] = [
    ("AL", "Alabama"),
    ("AK", "Alaska"),
    ("AZ", "Arizona"),
    ("AR", "Arkansas"),
    ("CA", "California"),
    ("CO", "Colorado"),
    ("CT", "Connecticut"),
    ("DE", "Delaware"),
    ("DC", "District of Columbia"),
    ("FL", "Florida"),
    ("GA", "Georgia"),
    ("HI", "Hawaii"),
    ("ID", "Idaho"),
    ("IL", "Illinois"),
    ("IN", "Indiana"),
    ("IA", "Iowa"),
    ("KS", "Kansas"),
    ("KY", "Kentucky"),
    ("LA", "Louisiana"),
    ("ME", "Maine"),
    ("MD", "Maryland"),
    ("MA", "Massachusetts"),
    ("MI", "Michigan"),
    ("MN", "Minnesota"),
    ("MS", "Mississippi"),
    ("MO", "Missouri"),
    ("MT", "Montana"),
    ("NE", "Nebraska"),
    ("NV", "Nevada"),
    ("NH", "New Hampshire"),
    ("NJ", "New Jersey"),
    ("NM", "New Mexico"),
    ("NY", "New York"),
    ("NC", "North Carolina"),
    ("ND", "North Dakota"),
    ("OH", "Ohio"),
    ("OK", "Oklahoma"),
    ("OR", "Oregon"),
    ("PA", "Pennsylvania"),
    ("RI", "Rhode Island"),
    ("SC", "South Carolina"),
    ("SD", "South Dakota"),
    ("TN", "Tennessee"),
    ("TX", "Texas"),
    ("UT", "Utah"),
    ("VT", "Vermont"),
    ("VA", "Virginia"),
    ("WA", "Washington"),
    ("WV", "West Virginia"),
    ("WI", "Wisconsin"),
    ("WY", "Wyoming"),
];

/// One of the 50 states or DC.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct UsState(u8);

impl UsState {
    pub fn from_code(code: &str) -> Option<Self> {
        let code = code.trim().to_ascii_uppercase();
        STATES
            .iter()
            .position(|(c, _)| *c == code)
            .map(|i| UsState(i as u8))
    }

    pub fn code(self) -> &'static str {
        STATES[self.0 as usize].0
    }

    pub fn name(self) -> &'static str {
        STATES[self.0 as usize].1
    }

    pub fn all() -> impl Iterator<Item = UsState> {
        (0..STATES.len() as u8).map(UsState)
    }
}

impl fmt::Display for UsState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.code())
    }
}

impl Serialize for UsState {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(self.code())
    }
}

impl<'de> Deserialize<'de> for UsState {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        UsState::from_code(&s).ok_or_else(|| serde::de::Error::custom(format!("unknown state {s}")))
    }
}

/// Three-digit area code to state.
#[derive(Debug, Clone, Default)]
pub struct AreaCodeTable {
    map: HashMap<u16, UsState>,
}

#[derive(Deserialize)]
struct AreaRow {
    code: String,
    state: String,
}

impl AreaCodeTable {
    pub fn from_csv_str(src: &str) -> Result<Self> {
        let mut map = HashMap::new();
        let mut rdr = csv::Reader::from_reader(src.as_bytes());
        for (i, row) in rdr.deserialize::<AreaRow>().enumerate() {
            let row = row?;
            let ctx = format!("area-code row {}", i + 2);
            let code: u16 = match row.code.trim().parse() {
                Ok(c) if (200..=999).contains(&c) => c,
                _ => return Err(Error::schema(ctx, format!("bad area code {:?}", row.code))),
            };
            let state = UsState::from_code(&row.state)
                .ok_or_else(|| Error::schema(ctx.clone(), format!("unknown state {:?}", row.state)))?;
            if map.insert(code, state).is_some_and(|prev| prev != state) {
                return Err(Error::schema(ctx, format!("area code {code} mapped twice")));
            }
        }
        Ok(Self { map })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let src = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_csv_str(&src)
    }

    pub fn builtin() -> Self {
        Self::from_csv_str(crate::defaults::AREA_CODES).expect("bundled area-code table is valid")
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    pub fn lookup(&self, phone: &NormalizedPhone) -> Option<UsState> {
        let code: u16 = phone.area_code().parse().ok()?;
        self.map.get(&code).copied()
    }
}

/// Agreement among domain, claimed job, and phone locations.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum MatchCategory {
    AllMatch,
    AllMismatch,
    PhoneLocMismatch,
    DomainLocMismatch,
    JobLocMismatch,
    DomainLocUnspecMatch,
    DomainLocUnspecMismatch,
    PhoneLocUnknownMatch,
    PhoneLocUnknownMismatch,
    JobLocUnknownMatch,
    JobLocUnknownMismatch,
    NotComparable,
}

impl MatchCategory {
    pub const ALL: [MatchCategory; 12] = [
        MatchCategory::AllMatch,
        MatchCategory::AllMismatch,
        MatchCategory::PhoneLocMismatch,
        MatchCategory::DomainLocMismatch,
        MatchCategory::JobLocMismatch,
        MatchCategory::DomainLocUnspecMatch,
        MatchCategory::DomainLocUnspecMismatch,
        MatchCategory::PhoneLocUnknownMatch,
        MatchCategory::PhoneLocUnknownMismatch,
        MatchCategory::JobLocUnknownMatch,
        MatchCategory::JobLocUnknownMismatch,
        MatchCategory::NotComparable,
    ];

    pub fn display_name(self) -> &'static str {
        match self {
            MatchCategory::AllMatch => "All Match",
            MatchCategory::AllMismatch => "All Mismatch",
            MatchCategory::PhoneLocMismatch => "Phone Loc Mismatch",
            MatchCategory::DomainLocMismatch => "Domain Loc Mismatch",
            MatchCategory::JobLocMismatch => "Job Loc Mismatch",
            MatchCategory::DomainLocUnspecMatch => "Domain Loc Unspec (Match)",
            MatchCategory::DomainLocUnspecMismatch => "Domain Loc Unspec (Mismatch)",
            MatchCategory::PhoneLocUnknownMatch => "Phone Loc Unknown (Match)",
            MatchCategory::PhoneLocUnknownMismatch => "Phone Loc Unknown (Mismatch)",
            MatchCategory::JobLocUnknownMatch => "Job Loc Unknown (Match)",
            MatchCategory::JobLocUnknownMismatch => "Job Loc Unknown (Mismatch)",
            MatchCategory::NotComparable => "Not Comparable",
        }
    }
}

impl fmt::Display for MatchCategory {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.display_name())
    }
}

/// Two or more missing fields are not comparable. With one missing, the
/// other two decide Match/Mismatch. With none, a single odd field names
/// the mismatch.
pub fn match_category(
    domain: Option<UsState>,
    job: Option<UsState>,
    phone: Option<UsState>,
) -> MatchCategory {
    use MatchCategory::*;
    match (domain, job, phone) {
        (None, None, _) | (None, _, None) | (_, None, None) => NotComparable,
        (None, Some(j), Some(p)) => {
            if j == p {
                DomainLocUnspecMatch
            } else {
                DomainLocUnspecMismatch
            }
        }
        (Some(d), None, Some(p)) => {
            if d == p {
                JobLocUnknownMatch
            } else {
                JobLocUnknownMismatch
            }
        }
        (Some(d), Some(j), None) => {
            if d == j {
                PhoneLocUnknownMatch
            } else {
                PhoneLocUnknownMismatch
            }
        }
        (Some(d), Some(j), Some(p)) => match (d == j, d == p, j == p) {
            (true, true, _) => AllMatch,
            (true, false, _) => PhoneLocMismatch,
            (false, true, _) => JobLocMismatch,
            (false, false, true) => DomainLocMismatch,
            (false, false, false) => AllMismatch,
        },
    }
}
