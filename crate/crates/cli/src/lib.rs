//! Command-line front end: game files, profiles, and the `probgames`
//! subcommands.

pub mod build;
pub mod commands;
pub mod demo;
pub mod format;
pub mod profile;

pub use build::{load, Built};
pub use commands::{run, Output};
pub use format::{parse_game_file, serialize, FileError, GameExpr};
