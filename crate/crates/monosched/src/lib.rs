//! Instance files, reports, parallel suite drivers and the command-line front end.

pub mod cli;
pub mod io;
pub mod report;
pub mod suites;
