//! Library surface of the scenario runner, so integration tests can drive the
//! same batteries the binary exposes.

pub mod commands;
pub mod report;
pub mod scenario;
pub mod svg;
