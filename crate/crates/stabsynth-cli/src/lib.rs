//! File formats and command implementations behind the `stabsynth` binary.

pub mod commands;
pub mod format;
