//! Scenario runner for the ghost-diffraction model.
//!
//! Each scenario writes one or more CSV files and returns a [`RunSummary`].

pub mod output;
pub mod scenario;
pub mod settings;

pub use output::{FringeReport, RunSummary, SweepRow};
pub use scenario::{run, Scenario, ScenarioKind};
pub use settings::{ConfigFile, Overrides, Settings};

use ghostdiff_core::Error;

/// Process exit status for an error.
pub fn exit_code(error: &Error) -> i32 {
    match error {
        Error::Validation { .. } | Error::Parse { .. } | Error::Sampling(_) => 2,
        Error::NonConvergence { .. } => 3,
        Error::Io(_) => 4,
        _ => 1,
    }
}
