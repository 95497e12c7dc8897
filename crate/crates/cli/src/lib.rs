//! Library half of the `tcim` binary: input loading, commands and reports.

pub mod commands;
pub mod report;
pub mod units;
