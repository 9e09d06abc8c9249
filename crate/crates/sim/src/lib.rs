//! Configuration files, result formats, heatmaps and a thread-pool executor
//! around `rydberg-core`, plus the subcommands behind the `rydberg-sim`
//! binary.

pub mod commands;
pub mod config;
pub mod error;
pub mod heatmap;
pub mod output;
pub mod pool;

pub use commands::{run, Command, OutputOptions, Report};
pub use config::{load_config, parse_config, RunConfig};
pub use error::{Result, SimError};
pub use output::Format;
pub use pool::ThreadPool;
