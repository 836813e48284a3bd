//! Script front end for `regkit-core`: a small declaration language, a command runner that
//! cross-checks every regularity it reports, and a batch driver for script directories.

pub mod corpus;
pub mod dsl;
pub mod runner;

pub use dsl::{parse_session, parse_session_with, render, Diagnostic, ErrorCode, SessionScript};
pub use runner::{run, ResultDocument, RunFlags, Status};
