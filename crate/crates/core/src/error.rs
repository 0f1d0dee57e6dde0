use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("ground-set size mismatch: {0} vs {1}")]
    SizeMismatch(usize, usize),
    #[error("partition {0} is crossing")]
    Crossing(String),
    #[error("{0} is not a noncrossing pairing")]
    NotPairing(String),
    #[error("{0} is not a noncrossing partition with even blocks")]
    NotEvenBlocks(String),
    #[error("invalid partition: {0}")]
    InvalidPartition(String),
    #[error("subset {0} is out of range")]
    SubsetOutOfRange(String),
    #[error("index out of range: {0}")]
    IndexOutOfRange(String),
    #[error("Gram matrix for {group} with k={k}, n={n} is singular")]
    SingularGram { group: String, k: usize, n: u64 },
    #[error("order {requested} exceeds truncation order {order}")]
    TruncationExceeded { requested: usize, order: usize },
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("family is not R-cyclic")]
    NotRCyclic,
    #[error("determining series is not invariant under quantum permutations")]
    NotPermutationInvariant,
    #[error("incomplete moment data: {0}")]
    IncompleteMoments(String),
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
