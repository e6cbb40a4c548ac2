//! Command-line front end for ntlab: argument parsing, canonical JSON
//! reports, the on-disk cache and the acceptance suite.

pub mod acceptance;
pub mod cache;
mod commands;
pub mod config;

pub use commands::{run, run_with, Env, EXIT_OK, EXIT_RESOURCE, EXIT_USAGE};
