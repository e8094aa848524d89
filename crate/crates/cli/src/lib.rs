//! Command-line front end for `qreading`: single points and sweeps of the
//! information gain, the reference table, critical-number curves, and the
//! Fock-space cross-check.

pub mod commands;
pub mod config;
pub mod error;
pub mod format;
pub mod range;
pub mod verify;

use std::io::Write;

pub use config::{Cli, Command, GridDensity, Mode, SweepConfig};
pub use error::{CliError, Result};

/// Runs one invocation. `Ok(false)` means the command ran but a check failed.
pub fn run(cli: &Cli, stdout: &mut dyn Write) -> Result<bool> {
    let cfg = SweepConfig::resolve(cli)?;
    match cfg.mode {
        Mode::Gain => commands::cmd_gain(&cfg, stdout)?,
        Mode::Table => commands::cmd_table(&cfg, stdout)?,
        Mode::CriticalCurve => commands::cmd_critical_curve(&cfg, stdout)?,
        Mode::CriticalEnergy => commands::cmd_critical_energy(&cfg, stdout)?,
        Mode::Verify => return verify::cmd_verify(&cfg, stdout),
    }
    Ok(true)
}
