//! Batch front end: configuration, subcommand drivers and table output.

pub mod config;
pub mod error;
pub mod report;
pub mod run;

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;

pub use config::{OutputFormat, Overrides, Resolved};
pub use error::{CliError, ConfigError};
pub use report::{Cell, ReportTable};
pub use run::Command;

/// Loads the config, runs `command` and writes its table to the configured
/// destination (stdout when no path is set).
pub fn execute(
    command: Command,
    config_path: &Path,
    overrides: &Overrides,
) -> Result<(), CliError> {
    let cfg = config::load(config_path, overrides)?;
    let table = command.run(&cfg)?;
    match &cfg.out {
        Some(path) => {
            let mut w = BufWriter::new(File::create(path)?);
            table.write(cfg.format, &mut w)?;
            w.flush()?;
        }
        None => {
            let stdout = io::stdout();
            let mut w = stdout.lock();
            table.write(cfg.format, &mut w)?;
            w.flush()?;
        }
    }
    Ok(())
}
