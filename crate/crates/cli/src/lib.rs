//! Command-line front end: channel generators, analysis reports and the
//! acceptance suite.

pub mod gen;
pub mod report;
pub mod verify;
