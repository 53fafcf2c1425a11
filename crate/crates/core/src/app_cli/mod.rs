//! Configuration, drivers and writers behind the `axifep` binary.

pub mod commands;
pub mod config;
pub mod output;
pub mod verify;

pub use commands::{cmd_cavity, cmd_matpoint, cmd_run, simulate, IterStats, Simulation, StepLog, TrackRow};
pub use config::{load_config, parse_config, RunConfig, TrackPoint};
pub use verify::{cmd_verify, Check, SuiteReport, VerifyReport};
