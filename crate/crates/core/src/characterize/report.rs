use std::collections::{BTreeMap, HashMap};
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::attributes::{location_label, AttributeRecord};
use super::location::{match_category, MatchCategory};
use crate::corpus::AdId;
use crate::error::{Error, Result};
use crate::labelnet::RiskClass;

/// Counts for one value of one attribute.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValueRow {
    pub value: String,
    pub safe: u64,
    pub risky: u64,
    pub total: u64,
    /// Share of this value's ads that are risky, in percent.
    pub risky_pct: f64,
    /// Share of all safe ads carrying this value, in percent.
    pub safe_share_pct: f64,
    /// Share of all risky ads carrying this value, in percent.
    pub risky_share_pct: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Dimension {
    pub name: String,
    /// A record may contribute to several values, so shares need not sum
    /// to 100.
    pub multi_valued: bool,
    pub rows: Vec<ValueRow>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatchRow {
    pub category: MatchCategory,
    pub name: String,
    pub safe: u64,
    pub risky: u64,
    pub safe_pct: f64,
    pub risky_pct: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CharacterizationReport {
    pub total: u64,
    pub safe: u64,
    pub risky: u64,
    /// Sex-work rows, included in every table.
    pub flagged: u64,
    pub dimensions: Vec<Dimension>,
    pub location_match: Vec<MatchRow>,
}

pub fn percent(part: u64, whole: u64) -> f64 {
    if whole == 0 {
        0.0
    } else {
        100.0 * part as f64 / whole as f64
    }
}

fn dimension(
    name: &str,
    multi_valued: bool,
    rows: &[(&AttributeRecord, RiskClass)],
    values: impl Fn(&AttributeRecord) -> Vec<String>,
    totals: (u64, u64),
) -> Dimension {
    let mut counts: BTreeMap<String, (u64, u64)> = BTreeMap::new();
    for (a, label) in rows {
        for v in values(a) {
            let c = counts.entry(v).or_default();
            match label {
                RiskClass::Safe => c.0 += 1,
                RiskClass::Risky => c.1 += 1,
            }
        }
    }
    let mut rows: Vec<ValueRow> = counts
        .into_iter()
        .map(|(value, (safe, risky))| ValueRow {
            value,
            safe,
            risky,
            total: safe + risky,
            risky_pct: percent(risky, safe + risky),
            safe_share_pct: percent(safe, totals.0),
            risky_share_pct: percent(risky, totals.1),
        })
        .collect();
    rows.sort_by(|a, b| b.risky.cmp(&a.risky).then(b.total.cmp(&a.total)).then(a.value.cmp(&b.value)));
    Dimension {
        name: name.into(),
        multi_valued,
        rows,
    }
}

/// Volume and percentage tables per attribute plus the location-match
/// table. Every attribute record needs a label.
pub fn build_report(
    attributes: &[AttributeRecord],
    labels: &HashMap<AdId, RiskClass>,
) -> Result<CharacterizationReport> {
    let mut rows = Vec::with_capacity(attributes.len());
    for a in attributes {
        let label = labels
            .get(&a.id)
            .ok_or_else(|| Error::InvalidInput(format!("no label for ad {}", a.id)))?;
        rows.push((a, *label));
    }
    let risky = rows.iter().filter(|(_, l)| *l == RiskClass::Risky).count() as u64;
    let safe = rows.len() as u64 - risky;
    let totals = (safe, risky);
    let one = |v: String| vec![v];
    let dimensions = vec![
        dimension("domain_location", false, &rows, |a| one(location_label(a.domain_loc, "Unspecified")), totals),
        dimension("job_location", false, &rows, |a| one(location_label(a.job_loc, "Unknown")), totals),
        dimension("phone_location", false, &rows, |a| one(location_label(a.phone_loc, "Unknown")), totals),
        dimension("gender", false, &rows, |a| one(a.gender.to_string()), totals),
        dimension("industry", false, &rows, |a| one(a.industry.clone()), totals),
        dimension(
            "primary_contact",
            false,
            &rows,
            |a| one(a.primary_contact.map_or("Unspecified", |m| m.as_str()).to_string()),
            totals,
        ),
        dimension(
            "contact_methods",
            true,
            &rows,
            |a| a.contact_methods.iter().map(|m| m.as_str().to_string()).collect(),
            totals,
        ),
    ];

    let mut by_cat: BTreeMap<MatchCategory, (u64, u64)> = BTreeMap::new();
    for (a, label) in &rows {
        let c = by_cat
            .entry(match_category(a.domain_loc, a.job_loc, a.phone_loc))
            .or_default();
        match label {
            RiskClass::Safe => c.0 += 1,
            RiskClass::Risky => c.1 += 1,
        }
    }
    let location_match = MatchCategory::ALL
        .iter()
        .map(|&cat| {
            let (s, r) = by_cat.get(&cat).copied().unwrap_or_default();
            MatchRow {
                category: cat,
                name: cat.display_name().into(),
                safe: s,
                risky: r,
                safe_pct: percent(s, safe),
                risky_pct: percent(r, risky),
            }
        })
        .collect();

    Ok(CharacterizationReport {
        total: rows.len() as u64,
        safe,
        risky,
        flagged: rows.iter().filter(|(a, _)| a.flagged).count() as u64,
        dimensions,
        location_match,
    })
}

impl CharacterizationReport {
    pub fn dimension(&self, name: &str) -> Option<&Dimension> {
        self.dimensions.iter().find(|d| d.name == name)
    }

    /// Long-format CSV of every dimension.
    pub fn write_dimensions_csv(&self, path: &Path) -> Result<()> {
        let mut w = csv::Writer::from_path(path).map_err(|e| csv_io(path, e))?;
        w.write_record([
            "dimension", "value", "safe", "risky", "total", "risky_pct", "safe_share_pct", "risky_share_pct",
        ])?;
        for d in &self.dimensions {
            for r in &d.rows {
                w.write_record([
                    d.name.clone(),
                    r.value.clone(),
                    r.safe.to_string(),
                    r.risky.to_string(),
                    r.total.to_string(),
                    format!("{:.2}", r.risky_pct),
                    format!("{:.2}", r.safe_share_pct),
                    format!("{:.2}", r.risky_share_pct),
                ])?;
            }
        }
        w.flush().map_err(|e| Error::io(path, e))
    }

    pub fn write_match_csv(&self, path: &Path) -> Result<()> {
        let mut w = csv::Writer::from_path(path).map_err(|e| csv_io(path, e))?;
        w.write_record(["category", "safe", "safe_pct", "risky", "risky_pct"])?;
        for r in &self.location_match {
            w.write_record([
                r.name.clone(),
                r.safe.to_string(),
                format!("{:.1}", r.safe_pct),
                r.risky.to_string(),
                format!("{:.1}", r.risky_pct),
            ])?;
        }
        w.flush().map_err(|e| Error::io(path, e))
    }
}

fn csv_io(path: &Path, e: csv::Error) -> Error {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::io(path, io),
        other => Error::schema(path.display().to_string(), format!("{other:?}")),
    }
}

/// `id,pc1,pc2,label`; a missing second coordinate is written as 0.
pub fn write_scatter_csv(
    path: &Path,
    ids: &[AdId],
    coords: &ndarray::Array2<f64>,
    labels: &[RiskClass],
) -> Result<()> {
    if ids.len() != coords.nrows() || ids.len() != labels.len() {
        return Err(Error::InvalidInput("scatter inputs are not aligned".into()));
    }
    let mut w = csv::Writer::from_path(path).map_err(|e| csv_io(path, e))?;
    w.write_record(["id", "pc1", "pc2", "label"])?;
    for (i, id) in ids.iter().enumerate() {
        let c = |j: usize| if j < coords.ncols() { coords[[i, j]] } else { 0.0 };
        w.write_record([
            id.to_string(),
            c(0).to_string(),
            c(1).to_string(),
            labels[i].as_str().to_string(),
        ])?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}
