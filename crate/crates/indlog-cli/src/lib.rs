//! Library surface of the CLI: the problem-file parser, the report
//! model, and the canned-example registry. The `indlog` binary is a
//! thin clap front end over these.

pub mod problem;
pub mod registry;
pub mod report;
