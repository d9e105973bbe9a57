//! Library side of the `rlab` command: field files, element expressions,
//! commands and JSON reports.

pub mod commands;
pub mod config;
pub mod expr;
pub mod report;
pub mod selftest;
