//! Experiment runner for the forced damped Duffing oscillator: JSON
//! configuration, CSV/PGM/JSON artifacts and parallel ensembles on top of
//! `duffing-core`.
//!
//! Every subcommand writes `<name>.*` files plus `<name>.meta.json` into the
//! output directory. Ensemble member `k` always draws from random stream `k`
//! of the configured seed, so results do not depend on the thread count
//! (`DUFFING_QSD_THREADS`).

pub mod commands;
pub mod config;
pub mod error;
pub mod output;
pub mod parallel;

pub use commands::{run, RunReport, Subcommand};
pub use config::SimConfig;
pub use error::{CliError, ExitKind};
