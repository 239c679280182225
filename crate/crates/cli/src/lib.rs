//! Command-line front end of the `apflow` solver: configuration parsing,
//! run orchestration and CSV output.

pub mod config;
pub mod converge;
pub mod error;
pub mod run;
pub mod validate;

pub use config::{parse_config, RunConfig};
pub use converge::{cmd_converge, ConvergeReport};
pub use error::{CliError, ConfigError, Result};
pub use run::{cmd_run, RunReport};
pub use validate::{cmd_validate, ValidateOptions, ValidationReport};
