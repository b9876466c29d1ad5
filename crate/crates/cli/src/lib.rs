//! Command-line frontend for the Gini grouping library.
//!
//! The binary reads instances from CSV datasets or JSON documents, runs
//! the impurity scorers, solvers, and checkers from `ginisplit-core`,
//! and prints machine-readable JSON. Logic lives in the library crate;
//! this crate only parses arguments, moves bytes, and shapes output.

pub mod app;
pub mod document;
pub mod ingest;
pub mod output;
