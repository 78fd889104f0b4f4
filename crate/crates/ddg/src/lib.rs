//! Files and command-line tools around [`ddg_core`]: an OBJ reader/writer,
//! JSON documents for vertex/edge functions and reports, and the `ddg` CLI.

pub mod cli;
pub mod error;
pub mod fmt;
pub mod json;
pub mod obj;

pub use error::CliError;
