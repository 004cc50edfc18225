//! Library side of the `eddm` command-line tool: fixture generators,
//! comparison reports, the polar benchmark and the command bodies.

pub mod bench;
pub mod commands;
pub mod report;
pub mod scenario;
