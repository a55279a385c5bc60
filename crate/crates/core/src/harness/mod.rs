//! Seeded instance generators, independent oracles and the property suites.

pub mod chains;
pub mod generate;
pub mod oracle;
pub mod probes;
pub mod suites;
