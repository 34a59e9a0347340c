//! Experiment runner for the damped-wave spectral lab: configuration files,
//! the `scenario`, `propcheck`, `gftcheck` and `tailbound` commands, and CSV
//! output.

// `!(x > 0.0)` style guards are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod commands;
pub mod config;

pub use commands::CliError;
pub use config::{ConfigError, RunConfig};

/// Path of a config shipped in this crate's `configs/` directory.
pub fn bundled_config(name: &str) -> std::path::PathBuf {
    std::path::Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("configs")
        .join(name)
}
