use stwpa::horizon::HorizonError;
use stwpa::lattice::io::FormatError;
use stwpa::lattice::{LatticeError, MeasureError};
use stwpa::scattering::ScatteringError;
use stwpa::snail::SnailError;
use stwpa::soliton::SolitonError;
use stwpa::units::UnitsError;
use thiserror::Error;

/// Failure of a subcommand, classified by exit code.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("parameter error: {0}")]
    Param(String),
    #[error("numerical failure: {0}")]
    Numeric(String),
    #[error("i/o error: {0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Param(_) => 2,
            CliError::Numeric(_) => 3,
            CliError::Io(_) => 1,
        }
    }

    pub fn io(context: impl std::fmt::Display, e: std::io::Error) -> Self {
        CliError::Io(format!("{context}: {e}"))
    }
}

pub fn param(msg: impl Into<String>) -> CliError {
    CliError::Param(msg.into())
}

impl From<SnailError> for CliError {
    fn from(e: SnailError) -> Self {
        match e {
            SnailError::AlphaOutOfRange(_) | SnailError::NonFiniteFlux(_) => CliError::Param(e.to_string()),
            _ => CliError::Numeric(e.to_string()),
        }
    }
}

impl From<UnitsError> for CliError {
    fn from(e: UnitsError) -> Self {
        CliError::Param(e.to_string())
    }
}

impl From<SolitonError> for CliError {
    fn from(e: SolitonError) -> Self {
        CliError::Param(e.to_string())
    }
}

impl From<LatticeError> for CliError {
    fn from(e: LatticeError) -> Self {
        match e {
            LatticeError::SolveFailed(_) | LatticeError::NonFiniteState { .. } => CliError::Numeric(e.to_string()),
            _ => CliError::Param(e.to_string()),
        }
    }
}

impl From<MeasureError> for CliError {
    fn from(e: MeasureError) -> Self {
        CliError::Numeric(e.to_string())
    }
}

impl From<HorizonError> for CliError {
    fn from(e: HorizonError) -> Self {
        match e {
            HorizonError::Lattice(l) => l.into(),
            HorizonError::Soliton(s) => s.into(),
            HorizonError::ImaginaryVelocity { .. } | HorizonError::BackgroundMismatch { .. } => {
                CliError::Param(e.to_string())
            }
            HorizonError::NoHorizon { .. } => CliError::Numeric(e.to_string()),
        }
    }
}

impl From<ScatteringError> for CliError {
    fn from(e: ScatteringError) -> Self {
        match e {
            ScatteringError::Lattice(l) => l.into(),
            ScatteringError::Measurement(_) => CliError::Numeric(e.to_string()),
            _ => CliError::Param(e.to_string()),
        }
    }
}

impl From<FormatError> for CliError {
    fn from(e: FormatError) -> Self {
        match e {
            FormatError::Io(io) => CliError::Io(io.to_string()),
            _ => CliError::Param(e.to_string()),
        }
    }
}
