//! JSON documents, reports and the `obsrel` command-line tool.

pub mod app;
pub mod document;
pub mod error;
pub mod report;

pub use app::{run, Cli, Outcome};
pub use document::Document;
pub use error::CliError;
pub use report::Report;

/// Process exit codes.
pub mod exit {
    pub const HOLDS: i32 = 0;
    pub const FAILS: i32 = 1;
    pub const USAGE: i32 = 2;
    pub const INDETERMINATE: i32 = 3;
}
