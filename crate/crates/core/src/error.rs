use thiserror::Error;

use crate::space::AtomId;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("space has no atoms")]
    EmptySpace,
    #[error("invalid space: {0}")]
    InvalidSpace(String),
    #[error("subset is not contained in the ambient set (first offender: atom {0})")]
    NotASubset(AtomId),
    #[error("set is not open (atom {0} lacks part of its minimal neighborhood)")]
    NotOpen(AtomId),
    #[error("set is not saturated with respect to the components of level {level}")]
    NotSaturated { level: usize },
    #[error("invalid tower: {}", .0.join("; "))]
    InvalidTower(Vec<String>),
    #[error("atom {0} is not a top cell")]
    NotATopCell(AtomId),
    #[error("invalid cell map: {0}")]
    InvalidMap(String),
    #[error("walk never settles in a single component of level {level}")]
    InsufficientHorizon { level: usize },
    #[error("non-finite value during integration at {0:?}")]
    NonFinite(Vec<f64>),
    #[error("degenerate grid: {0}")]
    DegenerateGrid(String),
    #[error("unknown fixture `{0}`")]
    UnknownFixture(String),
    #[error("config error at `{key}`: {message}")]
    Config { key: String, message: String },
}

impl Error {
    /// Stable machine-readable name of the variant.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::EmptySpace => "EmptySpace",
            Error::InvalidSpace(_) => "InvalidSpace",
            Error::NotASubset(_) => "NotASubset",
            Error::NotOpen(_) => "NotOpen",
            Error::NotSaturated { .. } => "NotSaturated",
            Error::InvalidTower(_) => "InvalidTower",
            Error::NotATopCell(_) => "NotATopCell",
            Error::InvalidMap(_) => "InvalidMap",
            Error::InsufficientHorizon { .. } => "InsufficientHorizon",
            Error::NonFinite(_) => "NonFinite",
            Error::DegenerateGrid(_) => "DegenerateGrid",
            Error::UnknownFixture(_) => "UnknownFixture",
            Error::Config { .. } => "Config",
        }
    }

    pub(crate) fn config(key: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Config {
            key: key.into(),
            message: message.into(),
        }
    }
}
