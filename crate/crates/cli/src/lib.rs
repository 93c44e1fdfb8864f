//! Configuration, command dispatch and file output for the `qfed1d`
//! command-line tool.

pub mod config;
pub mod error;
pub mod output;
pub mod run;

pub use config::{parse_config, serialize_config, SimulationConfig};
pub use error::CliError;
pub use run::{run, Command};
