//! Scenario file format and command implementations for the co-adaptation
//! engine. The `rosa` binary is a thin wrapper over [`commands`].

pub mod commands;
pub mod format;
