use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::Error;

/// Ten-digit US national significant number.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NormalizedPhone([u8; 10]);

impl NormalizedPhone {
    pub fn digits(&self) -> &str {
        // constructed from ASCII digits only
        std::str::from_utf8(&self.0).expect("ascii digits")
    }

    pub fn area_code(&self) -> &str {
        &self.digits()[..3]
    }
}

impl FromStr for NormalizedPhone {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bytes = s.as_bytes();
        if bytes.len() != 10 || !bytes.iter().all(u8::is_ascii_digit) {
            return Err(Error::InvalidInput(format!(
                "`{s}` is not a 10-digit phone number"
            )));
        }
        let mut digits = [0u8; 10];
        digits.copy_from_slice(bytes);
        Ok(Self(digits))
    }
}

impl fmt::Display for NormalizedPhone {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.digits())
    }
}

impl fmt::Debug for NormalizedPhone {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Phone({})", self.digits())
    }
}

impl Serialize for NormalizedPhone {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(self.digits())
    }
}

impl<'de> Deserialize<'de> for NormalizedPhone {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// One phone number located in a text, with the byte span of the raw match.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PhoneMatch {
    pub phone: NormalizedPhone,
    pub raw: String,
    pub start: usize,
    pub end: usize,
}

const SEPARATORS: &[char] = &[' ', '-', '(', ')', '.', '+'];
const MAX_SEPARATOR_RUN: usize = 3;

/// Maximal ASCII digit run with its byte span.
#[derive(Debug, Clone, Copy)]
struct DigitGroup {
    start: usize,
    end: usize,
}

/// Find every phone number in `text`, in order of appearance.
///
/// Digit groups joined by short runs of `space - ( ) . +` are treated as one
/// candidate. Starting from each group, groups are accumulated until they hold
/// exactly 10 digits, or exactly 11 digits beginning with `1` (the country
/// code is dropped). A start that overshoots is abandoned and the scan moves
/// to the next group, so a bare run of 12 digits never yields a number.
pub fn find_phones(text: &str) -> Vec<PhoneMatch> {
    let bytes = text.as_bytes();
    let mut runs: Vec<Vec<DigitGroup>> = Vec::new();
    let mut current: Vec<DigitGroup> = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        if bytes[i].is_ascii_digit() {
            let start = i;
            while i < bytes.len() && bytes[i].is_ascii_digit() {
                i += 1;
            }
            current.push(DigitGroup { start, end: i });
            // look ahead across separators to decide whether the run continues
            let mut j = i;
            while j < bytes.len() && j - i < MAX_SEPARATOR_RUN + 1 && SEPARATORS.contains(&(bytes[j] as char)) {
                j += 1;
            }
            let continues = j > i
                && j - i <= MAX_SEPARATOR_RUN
                && j < bytes.len()
                && bytes[j].is_ascii_digit();
            if continues {
                i = j;
            } else {
                runs.push(std::mem::take(&mut current));
            }
        } else {
            i += 1;
        }
    }
    if !current.is_empty() {
        runs.push(current);
    }

    let mut out = Vec::new();
    for groups in &runs {
        let mut g = 0;
        while g < groups.len() {
            match take_number(text, &groups[g..]) {
                Some((phone, used)) => {
                    let first = groups[g];
                    let last = groups[g + used - 1];
                    let mut start = first.start;
                    if start > 0 && matches!(bytes[start - 1], b'+' | b'(') {
                        start -= 1;
                    }
                    out.push(PhoneMatch {
                        phone,
                        raw: text[start..last.end].to_string(),
                        start,
                        end: last.end,
                    });
                    g += used;
                }
                None => g += 1,
            }
        }
    }
    out
}

fn take_number(text: &str, groups: &[DigitGroup]) -> Option<(NormalizedPhone, usize)> {
    let mut digits = String::with_capacity(11);
    for (n, group) in groups.iter().enumerate() {
        digits.push_str(&text[group.start..group.end]);
        match digits.len() {
            10 => return Some((digits.parse().ok()?, n + 1)),
            11 if digits.starts_with('1') => return Some((digits[1..].parse().ok()?, n + 1)),
            len if len >= 11 => return None,
            _ => {}
        }
    }
    None
}

pub fn extract_phones(text: &str) -> BTreeSet<NormalizedPhone> {
    find_phones(text).into_iter().map(|m| m.phone).collect()
}

/// True iff the search snippet literally carries the queried number.
pub fn snippet_match(snippet: &str, query: &NormalizedPhone) -> bool {
    extract_phones(snippet).contains(query)
}

pub const PHONE_PLACEHOLDER: &str = "<PHONE>";

/// Replace every located phone number with [`PHONE_PLACEHOLDER`].
pub fn scrub_text(text: &str) -> String {
    let matches = find_phones(text);
    if matches.is_empty() {
        return text.to_string();
    }
    let mut out = String::with_capacity(text.len());
    let mut last = 0;
    for m in &matches {
        out.push_str(&text[last..m.start]);
        out.push_str(PHONE_PLACEHOLDER);
        last = m.end;
    }
    out.push_str(&text[last..]);
    out
}
