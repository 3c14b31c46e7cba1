//! IO companion to `gluepo-core`: text-format parsers and emitters,
//! versioned JSON serialization, DOT rendering, seeded random model
//! generators, reusable property campaigns, and the CLI.

pub mod cli;
pub mod dot;
pub mod json;
pub mod parse;
pub mod random;
pub mod suite;
