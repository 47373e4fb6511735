//! File formats, Markdown reports and the `triad` command line over
//! [`triad_core`].

pub mod cli;
pub mod commands;
pub mod config;
pub mod error;
pub mod formats;
pub mod jsonl;
pub mod report;
