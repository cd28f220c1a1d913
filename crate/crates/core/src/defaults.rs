//! Lexicons and lookup tables bundled with the crate. Each can be replaced by
//! a user-supplied file of the same format.

pub const DOMAIN_CATEGORIES: &str = include_str!("../data/domain_categories.toml");
pub const DOMAIN_LOCATIONS: &str = include_str!("../data/domain_locations.toml");
pub const JOB_LOCATIONS: &str = include_str!("../data/job_locations.toml");
pub const INDUSTRIES: &str = include_str!("../data/industries.toml");
pub const GENDER: &str = include_str!("../data/gender.toml");
pub const CONTACT_METHODS: &str = include_str!("../data/contact_methods.toml");
pub const AREA_CODES: &str = include_str!("../data/areacodes.csv");
