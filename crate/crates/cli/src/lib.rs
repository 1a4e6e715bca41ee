//! Command-line plumbing for `sumideal`: input loading, report formatting,
//! seeded corpora and the acceptance criteria behind `selftest`.

pub mod acceptance;
pub mod commands;
pub mod corpus;
pub mod format;
pub mod inputs;
