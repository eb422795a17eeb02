use thiserror::Error;

use crate::algebra::AlgebraError;
use crate::syntax::ParseError;

/// Errors shared by every module of the workbench.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error(transparent)]
    Algebra(#[from] AlgebraError),

    #[error(transparent)]
    Parse(#[from] ParseError),

    #[error("budget exceeded: {what} reached {reached} (limit {limit})")]
    Budget {
        what: &'static str,
        limit: usize,
        reached: usize,
    },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("unknown corpus algebra `{0}`")]
    UnknownCorpus(String),

    #[error("parameter {value} out of range for `{name}` (supported: {range})")]
    ParameterOutOfRange {
        name: String,
        value: i64,
        range: &'static str,
    },

    #[error("partition is not a congruence: {0}")]
    NotACongruence(String),

    #[error("algebra is not subdirectly irreducible")]
    NotSubdirectlyIrreducible,

    #[error("variable `{0}` is not assigned")]
    UnassignedVariable(String),

    #[error("element index {index} out of range for an algebra of size {size}")]
    ElementOutOfRange { index: usize, size: usize },

    #[error("internal consistency failure: {0}")]
    Inconsistency(String),

    #[error("{0}")]
    Io(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn budget(what: &'static str, limit: usize, reached: usize) -> Self {
        Error::Budget {
            what,
            limit,
            reached,
        }
    }

    pub fn is_budget(&self) -> bool {
        matches!(self, Error::Budget { .. })
    }
}
