//! File formats and the command-line front end for `thermolap-core`.
//!
//! - [`seqfile`] – the `THERMOSEQ/1` binary sequence format.
//! - [`grid_csv`] – plain CSV grids in and out.
//! - [`png_export`] – 8-bit grayscale previews with a scale sidecar.
//! - [`spec`] – TOML simulation specs.
//! - [`profile`] – line profiles with defect markers.
//! - [`cli::run`] – the `thermolap` command, callable in-process.
//!
//! Every file is written to a temporary sibling and renamed into place, and
//! identical inputs produce byte-identical outputs.

pub mod cli;
pub mod error;
pub mod fsio;
pub mod grid_csv;
pub mod png_export;
pub mod profile;
pub mod seqfile;
pub mod spec;

pub use cli::run;
pub use error::{CliError, Result};
