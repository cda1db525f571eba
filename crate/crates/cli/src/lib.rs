//! JSON workspaces and the `rlsheaf` command set.

pub mod commands;
pub mod doc;
pub mod dot;
pub mod report;
pub mod workspace;

pub use commands::{execute, run, Cli, Command};
pub use report::{Format, Report};
pub use workspace::{builtin, load, parse_document, parse_workspace, LoadError, Mode, Workspace};
