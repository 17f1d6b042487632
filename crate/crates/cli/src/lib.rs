//! Command-line entry points and the interactive session service.

pub mod commands;
pub mod protocol;
pub mod server;
pub mod session;
