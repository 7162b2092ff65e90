pub mod chain;
pub mod field;
pub mod invariants;
pub mod limit_series;
pub mod linalg;
pub mod oracle;
pub mod strata;
