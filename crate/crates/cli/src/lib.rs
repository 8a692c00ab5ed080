//! Command-line front end and HTTP service for the wireframe toolkit.

pub mod commands;
pub mod server;

pub use commands::run;
