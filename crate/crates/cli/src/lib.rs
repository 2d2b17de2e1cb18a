//! Command-line entry points and the live session gateway.

pub mod commands;
pub mod gateway;
pub mod protocol;
