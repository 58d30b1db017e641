//! Block time stepping for sparse DIRK discretizations.

pub mod dirk;
pub mod error;
pub mod harness;
pub mod krylov;
pub mod perf;
pub mod problems;
pub mod sparse;

pub use error::{Error, Result};
