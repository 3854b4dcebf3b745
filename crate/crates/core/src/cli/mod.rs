//! Configuration-driven front end: single points, sweeps and figure presets.
//!
//! Everything here produces a [`Table`](table::Table) so the binary only
//! has to pick a writer.

pub mod config;
pub mod presets;
pub mod sweep;
pub mod table;

use std::fmt::Display;

use thiserror::Error;

use crate::capacity::CapacityError;
use crate::channel::ChannelError;

pub use config::{AbsorptionChoice, Scenario, ScenarioFile};
pub use sweep::{run_point, run_sweep, SweepSpec};
pub use table::{Cell, Table};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CliError {
    /// Bad input: config, parameter ranges, table domain.
    #[error("{0}")]
    Validation(String),
    /// The numbers themselves failed (e.g. `|h| = 0` under a logarithm).
    #[error("{0}")]
    Numeric(String),
    #[error("{0}")]
    Io(String),
}

impl CliError {
    pub fn validation(path: &str, message: impl Display) -> Self {
        Self::Validation(format!("{path}: {message}"))
    }

    /// 1 for bad input, 2 for numeric failure.
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Validation(_) | Self::Io(_) => 1,
            Self::Numeric(_) => 2,
        }
    }

    pub(crate) fn from_channel(path: &str, e: ChannelError) -> Self {
        match e {
            ChannelError::ZeroGain => Self::Numeric(format!("{path}: {e}")),
            e => Self::validation(path, e),
        }
    }

    pub(crate) fn from_capacity(e: CapacityError) -> Self {
        match e {
            CapacityError::Channel {
                source: ChannelError::ZeroGain,
                ..
            } => Self::Numeric(format!("capacity: {e}")),
            e => Self::validation("capacity", e),
        }
    }
}
