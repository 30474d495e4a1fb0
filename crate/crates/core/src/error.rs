//! Error type shared by every module of the engine.

use crate::searchspace::ArchIndex;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("architecture index {0} outside 0..=15624")]
    IndexOutOfRange(usize),

    #[error("op code {0} outside 0..=4")]
    InvalidOpCode(u8),

    #[error("genotype string {0:?} is not 6 base-5 digits")]
    InvalidGenotypeString(String),

    #[error("probability {0} outside [0, 1]")]
    InvalidProbability(f64),

    #[error("bins must be at least 2, got {0}")]
    InvalidBins(usize),

    #[error("feature samples incompatible: {0}")]
    FeatureShape(String),

    #[error("objective dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("empty population")]
    EmptyPopulation,

    #[error("population is not sorted (rank/crowding unassigned)")]
    UnsortedPopulation,

    #[error("need at least {need} members, have {have}")]
    InsufficientMembers { have: usize, need: usize },

    #[error("no benchmark row for architecture {0}")]
    MissingArchitecture(ArchIndex),

    #[error("unknown device {device:?}; available: {available}")]
    UnknownDevice { device: String, available: String },

    #[error("member {position}: {source}")]
    Member {
        position: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("invalid search config: {0}")]
    InvalidConfig(String),

    #[error("benchmark file line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("benchmark table incomplete: {missing} of 15625 rows missing")]
    Incomplete { missing: usize },

    #[error("benchmark validation failed: {0}")]
    Validation(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Wrap an error with the position of the population member it concerns.
    pub(crate) fn at_member(self, position: usize) -> Error {
        Error::Member {
            position,
            source: Box::new(self),
        }
    }
}
