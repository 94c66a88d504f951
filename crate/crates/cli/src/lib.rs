//! Library surface of the command-line driver, exposed so integration
//! tests can drive commands and verify manifests in-process.

pub mod commands;
pub mod config;
pub mod csvio;
pub mod manifest;
pub mod pipeline;
pub mod svg;
pub mod tables;
