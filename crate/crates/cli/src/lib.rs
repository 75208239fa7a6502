//! Command-line front-end for `eventpos`: input and output formats, budget
//! profiles, the example corpus and the pipelines behind each subcommand.

pub mod config;
pub mod corpus;
pub mod format;
pub mod input;
pub mod run;
