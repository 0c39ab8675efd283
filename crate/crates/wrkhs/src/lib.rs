//! File formats, benchmark runners and the command-line front end for the
//! `wrkhs-core` regression library.
//!
//! * [`dataset`]: CSV datasets,
//! * [`model`]: JSON model and kernel files,
//! * [`surface`]: kernel surface grids,
//! * [`bench`]: parallel benchmark drivers,
//! * [`output`]: hashed, reproducible output files,
//! * [`cli`]: argument parsing and subcommands.

pub mod bench;
pub mod cli;
pub mod dataset;
mod error;
pub mod model;
pub mod output;
pub mod surface;

pub use error::{CliError, Result};
pub use wrkhs_core as core;
