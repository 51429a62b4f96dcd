//! CLI machinery for the kicked-top toolbox: option merging (flags over
//! key=value config files), experiment orchestration and serialization of
//! sweeps, EP atlases, sheet grids and monodromy reports to documented,
//! deterministic file formats.

pub mod commands;
pub mod config;
pub mod output;
pub mod parse;

use thiserror::Error;

/// Exit status contract: 0 success, 2 validation error, 3 numerical failure.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Parse(String),

    #[error("{0}")]
    Validation(String),

    #[error(transparent)]
    Core(#[from] kicked_top::Error),

    #[error("i/o failure: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Parse(_) | CliError::Validation(_) => 2,
            CliError::Core(e) => match e {
                kicked_top::Error::InvalidConfig(_)
                | kicked_top::Error::Precondition(_)
                | kicked_top::Error::Resonant { .. }
                | kicked_top::Error::NotSolvable { .. }
                | kicked_top::Error::Unsupported(_)
                | kicked_top::Error::SingularParameter
                | kicked_top::Error::DegenerateFamily { .. } => 2,
                kicked_top::Error::SolverDiverged { .. }
                | kicked_top::Error::RootsNotConverged { .. }
                | kicked_top::Error::TrackingAmbiguous { .. }
                | kicked_top::Error::LoopBlocked { .. }
                | kicked_top::Error::IllConditioned { .. } => 3,
            },
            CliError::Io(_) => 3,
        }
    }
}
