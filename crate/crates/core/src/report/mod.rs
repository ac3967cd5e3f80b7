//! Command orchestration: run configuration, per-layer report tables and
//! the manifest that ties a reproduction run together.

pub mod cli;
mod commands;
mod config;
mod table;

pub use commands::{
    cmd_intrinsic, cmd_magnitude, cmd_report, cmd_selfsim, cmd_sentence_selfsim, cmd_sts,
    provenance, run_command, write_outputs, Command, Failure, IntrinsicTask, Manifest, Output,
    Skipped, Status, MANIFEST_FILE,
};
pub use config::{DumpEntry, Overrides, RunConfig, TaskPaths, OUT_ENV};
pub use table::{Provenance, ReportKey, ReportTable, SeriesSummary};
