//! Per-ad attributes (locations, industry, gender, contact channels) and the
//! aggregate reports built from them.

pub mod attributes;
pub mod location;
pub mod report;

pub use attributes::{
    contact_methods, domain_location, gender_preference, job_attributes, phone_location,
    primary_phone, AttributeRecord, ContactMethod, Gender, LexiconPaths, Lexicons,
    SEX_WORK_INDUSTRY, UNCATEGORIZED_INDUSTRY,
};
pub use location::{match_category, AreaCodeTable, MatchCategory, UsState};
pub use report::{build_report, percent, write_scatter_csv, CharacterizationReport, Dimension, MatchRow, ValueRow};
