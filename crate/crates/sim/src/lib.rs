//! Sweep harness for [`mel_game`]: TOML configuration, parallel
//! deadline/seed/policy sweeps and CSV/JSON result files.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod output;
pub mod sweep;

pub use config::{parse_config, ConfigError, RunConfig};
pub use output::emit_results;
pub use sweep::{aggregate, sweep, AggregateRow, RunError, RunRecord};
