use std::fmt;
use std::process::ExitCode;

use hnlab_core::bounds::BoundsError;
use hnlab_core::curves::{CurveError, OracleError};
use hnlab_core::hn::{HnError, ProfileLoadError};
use hnlab_core::TowerError;

/// Failure classes of the exit-code contract.
#[derive(Debug)]
pub enum CliError {
    /// Bad flags or parameter combinations: 64.
    Usage(String),
    /// Unreadable or malformed input: 65.
    Data(String),
    /// Well-formed input violating a structural invariant: 2.
    Invariant(String),
}

impl CliError {
    pub fn exit_code(&self) -> ExitCode {
        ExitCode::from(match self {
            CliError::Usage(_) => 64,
            CliError::Data(_) => 65,
            CliError::Invariant(_) => 2,
        })
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "usage error: {m}"),
            CliError::Data(m) => write!(f, "data error: {m}"),
            CliError::Invariant(m) => write!(f, "invariant violated: {m}"),
        }
    }
}

impl From<HnError> for CliError {
    fn from(e: HnError) -> Self {
        CliError::Invariant(e.to_string())
    }
}

impl From<TowerError> for CliError {
    fn from(e: TowerError) -> Self {
        CliError::Invariant(e.to_string())
    }
}

impl From<ProfileLoadError> for CliError {
    fn from(e: ProfileLoadError) -> Self {
        match e {
            ProfileLoadError::Format(m) => CliError::Data(m),
            ProfileLoadError::Invariant(e) => e.into(),
        }
    }
}

impl From<BoundsError> for CliError {
    fn from(e: BoundsError) -> Self {
        match e {
            BoundsError::MissingGeometryField(_) | BoundsError::GeometryMismatch(_) | BoundsError::GenusZero => {
                CliError::Usage(e.to_string())
            }
            BoundsError::Hn(inner) => inner.into(),
            other => CliError::Invariant(other.to_string()),
        }
    }
}

/// Generator and oracle errors come from command-line parameters.
impl From<CurveError> for CliError {
    fn from(e: CurveError) -> Self {
        match e {
            CurveError::Hn(inner) => inner.into(),
            CurveError::Bounds(inner) => inner.into(),
            other => CliError::Usage(other.to_string()),
        }
    }
}

impl From<OracleError> for CliError {
    fn from(e: OracleError) -> Self {
        CliError::Usage(e.to_string())
    }
}

pub fn data_err(e: impl fmt::Display) -> CliError {
    CliError::Data(e.to_string())
}
