//! IO companion to `misinfo-core`: run configuration, the four subcommands,
//! CSV/JSON outputs, and SVG plot rendering.

pub mod commands;
pub mod config;
pub mod output;
pub mod svg;
