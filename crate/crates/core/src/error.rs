use std::fmt;

use thiserror::Error;

/// Precondition that an operation found unsatisfied.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Precondition {
    NotCommutative,
    NotDownwardComplete,
    NotSubsemigroup,
    NotMember,
    NotIsomorphism,
    NotCancellative,
    SubsetTooSmall,
    AmbientMismatch,
    Other(String),
}

impl fmt::Display for Precondition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Precondition::NotCommutative => f.write_str("ambient semigroup is not commutative"),
            Precondition::NotDownwardComplete => f.write_str("family is not downward complete"),
            Precondition::NotSubsemigroup => f.write_str("family is not closed under products"),
            Precondition::NotMember => f.write_str("set is not a member of the family"),
            Precondition::NotIsomorphism => f.write_str("morphism is not a verified isomorphism"),
            Precondition::NotCancellative => f.write_str("carrier is not cancellative"),
            Precondition::SubsetTooSmall => f.write_str("set must have at least two elements"),
            Precondition::AmbientMismatch => {
                f.write_str("morphism endpoints do not match the given families")
            }
            Precondition::Other(msg) => f.write_str(msg),
        }
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("table is not associative: ({i}*{j})*{k} != {i}*({j}*{k})")]
    NonAssociative { i: usize, j: usize, k: usize },

    #[error("index {index} out of range for order {order}")]
    IndexOutOfRange { index: usize, order: usize },

    #[error("order {order} is unsupported (allowed: {allowed})")]
    OrderUnsupported { order: usize, allowed: String },

    #[error("order {order} exceeds the materialization cap {cap}")]
    OrderCapExceeded { order: usize, cap: usize },

    #[error("subset mask {mask:#x} does not belong to a semigroup of order {order}")]
    AmbientMismatch { mask: u64, order: usize },

    #[error("partition is not compatible: {x1}~{y1} and {x2}~{y2} but {x1}*{x2} !~ {y1}*{y2}")]
    NotCompatible {
        x1: usize,
        y1: usize,
        x2: usize,
        y2: usize,
    },

    #[error("precondition violated: {0}")]
    PreconditionViolated(Precondition),

    #[error("theorem violation: {0}")]
    TheoremViolation(String),

    #[error("{value} is not a member of the numerical monoid")]
    NonMemberInput { value: u64 },

    #[error("invalid numerical monoid: {0}")]
    InvalidMonoid(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn precondition(p: Precondition) -> Self {
        Error::PreconditionViolated(p)
    }

    /// True for findings that contradict a proven statement.
    pub fn is_theorem_violation(&self) -> bool {
        matches!(self, Error::TheoremViolation(_))
    }
}

pub type Result<T> = std::result::Result<T, Error>;
