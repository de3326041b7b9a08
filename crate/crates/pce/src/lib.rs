//! Files, experiments and reports around [`pce_core`].
//!
//! * [`io`]: graph files (JSON and edge lists).
//! * [`harness`]: experiment plans, run records, baseline cache, the
//!   concurrent plan runner.
//! * [`report`]: aggregation into summary, contingency and cut-comparison
//!   tables, plus tidy CSV for plots.

pub mod error;
pub mod harness;
pub mod io;
pub mod report;

pub use error::{Error, Result};
pub use pce_core;
