use thiserror::Error;

use crate::transmitter::Line;

#[derive(Debug, Error)]
pub enum Error {
    #[error("config parse error: {0}")]
    Parse(String),

    #[error("invalid value for `{name}`: {value} ({reason})")]
    InvalidParam {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },

    #[error("inconsistent parameters: {0}")]
    Inconsistent(String),

    #[error("unknown concentration unit `{0}`")]
    UnknownUnit(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("length mismatch: expected {expected}, found {found}")]
    LengthMismatch { expected: usize, found: usize },

    #[error("gate needs input line {0:?}")]
    MissingLine(Line),

    #[error("calibration fit is {found}, operation needs {expected}")]
    WrongFitKind {
        expected: &'static str,
        found: &'static str,
    },

    #[error("empty detection window")]
    EmptyWindow,

    #[error("non-finite value in {0}")]
    NonFinite(&'static str),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    /// True for errors caused by user-supplied configuration rather than by
    /// the numerics of a run.
    pub fn is_config(&self) -> bool {
        matches!(
            self,
            Error::Parse(_)
                | Error::InvalidParam { .. }
                | Error::Inconsistent(_)
                | Error::UnknownUnit(_)
                | Error::InvalidArgument(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
