//! File formats, rendering, decoding and the command-line front end for
//! `trellis-core`.

pub mod commands;
pub mod decode;
pub mod document;
pub mod dot;
pub mod error;
pub mod matrix_file;
pub mod trace;

pub use commands::{run, Cli};
pub use error::{CliError, Result};
