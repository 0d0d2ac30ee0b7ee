//! File formats, result bundles and benchmark runners around the `hgricci`
//! library, shared by the `hgricci` binary and its tests.

pub mod bench;
pub mod bundle;
pub mod error;
pub mod io;
pub mod options;

pub use error::{CliError, Result};
