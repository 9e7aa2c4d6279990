//! File formats, multi-threaded drivers, the timing benchmark and the
//! command line for `path2vec-core`.

pub mod bench;
pub mod cli;
pub mod error;
pub mod io;
pub mod manifest;
pub mod parallel;

pub use error::{Error, Result};
pub use path2vec_core as core;
