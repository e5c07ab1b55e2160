//! File formats, cube processing, benchmarking and the command-line front
//! end for `specunet-core`.

pub mod bench;
pub mod checkpoint;
pub mod cli;
pub mod config_file;
pub mod cube_io;
mod error;
pub mod fsutil;
pub mod history;
pub mod library_io;
pub mod processing;
pub mod report;
pub mod spectrum_csv;
pub mod synth_cube;

pub use error::{Error, Result};
pub use specunet_core as core;
