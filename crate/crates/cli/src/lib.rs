//! Support library for the `scn` binary: model persistence and report files.

pub mod model_file;
pub mod report;
