//! File formats, compression distances, parallel runs and the command line
//! around `quartet-core`.

pub mod bench;
pub mod cli;
pub mod compress;
pub mod error;
pub mod formats;
pub mod manifest;
pub mod parallel;

pub use error::{Error, Result};
