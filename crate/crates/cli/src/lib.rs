//! Library side of the ffs binary: subcommand dispatch, report emission,
//! and the acceptance suite, kept out of main.rs so the integration tests
//! can drive the same code paths.

pub mod acceptance;
pub mod report;
pub mod run;
