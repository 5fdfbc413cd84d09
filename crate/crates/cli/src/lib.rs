//! Scenario runner and command-line front end for `psg_core`.

pub mod error;
pub mod explain;
pub mod inputs;
pub mod report;
pub mod scenario;
pub mod tasks;
