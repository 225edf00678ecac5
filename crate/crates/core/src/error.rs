use thiserror::Error;

/// Errors raised by the spectral calculus.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("complex dimension n = {0} is not supported (need 2 <= n <= {max})", max = crate::MAX_N)]
    InvalidDimension(usize),
    #[error("form degree j = {j} is outside [0, {max}] for n = {n}", max = .n - 1)]
    InvalidDegree { n: usize, j: usize },
    #[error("({p}, {q}, {kind}) does not name a component for n = {n}, j = {j}")]
    InvalidIndex {
        n: usize,
        j: usize,
        p: i64,
        q: i64,
        kind: &'static str,
    },
    #[error("point is not on the unit sphere: squared norm is {0}")]
    NotUnit(String),
    #[error("operands disagree: {0}")]
    Mismatch(String),
    #[error("the Gram system is inconsistent: {0}")]
    Inconsistent(String),
    #[error("rank {found} differs from the expected dimension {expected} for {what}")]
    RankMismatch {
        what: String,
        expected: String,
        found: usize,
    },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("the spectral sum diverges: {0}")]
    Divergent(String),
}

pub type Result<T> = std::result::Result<T, Error>;
