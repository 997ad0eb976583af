//! JSON configs, CSV and SVG output, and the command implementations behind
//! the `nrule` binary.

pub mod commands;
pub mod config;
pub mod records;
pub mod svg;

pub use commands::{
    cmd_analyze, cmd_build_curve, cmd_simulate, simulate, BuildCurveArgs, CliError, Outcome,
    ReportFormat, SimulateArgs, Simulation,
};
pub use config::{load_config, ConfigError, LineSpec, Mode, RuleSpec, System, SystemConfig};
pub use records::{read_records, write_records, CurveRecord, Flag, OrbitRecord};
