//! Crate-wide error type.

use thiserror::Error;

/// Errors reported by the library.
#[derive(Debug, Error, PartialEq, Eq)]
pub enum Error {
    /// Multiplicative inverse of zero requested.
    #[error("ZeroInverse: 0 has no multiplicative inverse")]
    ZeroInverse,
    /// More distinct coordinates requested than the field has elements.
    #[error("FieldTooSmall: cannot sample {requested} distinct elements from a field of size {size}")]
    FieldTooSmall { requested: usize, size: u64 },
    /// The modulus is not prime (or too small).
    #[error("NotPrime: {0} is not a prime in the supported range")]
    NotPrime(u64),

    /// Graph with no vertices.
    #[error("EmptyGraph: operation requires at least one vertex")]
    EmptyGraph,
    /// Vertex or partition enumeration bound exceeded.
    #[error("TooLarge: {what} exceeds the enumeration bound ({limit})")]
    TooLarge { what: String, limit: u64 },
    /// Cycle basis requires t >= 3 (for t = 2 the basis is an empty matrix).
    #[error("TooSmall: cycle basis requires t >= 3, got {0}")]
    TooSmall(usize),

    /// Tree-assignment or decomposition enumeration budget exhausted.
    #[error("SearchBudgetExceeded: enumeration would visit more than {0} candidates")]
    SearchBudgetExceeded(u64),
    /// The given trees do not partition the edge list.
    #[error("NotADecomposition: {0}")]
    NotADecomposition(String),
    /// A k-tree-decomposition needs exactly k(t-1) edges.
    #[error("EdgeCountMismatch: expected {expected} edges, got {got}")]
    EdgeCountMismatch { expected: usize, got: usize },

    /// Weight of an empty index set requested.
    #[error("EmptyIndexSet: weight is defined for nonempty index sets")]
    EmptyIndexSet,
    /// A precondition of the tree-packing certificate is violated.
    #[error("PreconditionFailed({condition}): {detail}")]
    PreconditionFailed { condition: String, detail: String },
    /// Layered agreement sets are inconsistent with the given polynomials.
    #[error("AgreementMismatch: {0}")]
    AgreementMismatch(String),
    /// Malformed partial transversal.
    #[error("NotATransversal: {0}")]
    NotATransversal(String),

    /// All buckets empty; the system carries no generalized weight.
    #[error("DegenerateSystem: {0}")]
    DegenerateSystem(String),
    /// Not enough weight to trim down to the tight target.
    #[error("WeightDeficit: weight {got} is below the target {needed}")]
    WeightDeficit { got: u64, needed: u64 },
    /// Sieve hypotheses violated; lists each failed hypothesis.
    #[error("HypothesesUnmet: {0:?}")]
    HypothesesUnmet(Vec<String>),
    /// Retry budget exhausted without a successful trace.
    #[error("BudgetExhausted: no success within {0} retries")]
    BudgetExhausted(usize),

    /// Repeated column index in a separation query.
    #[error("DuplicateColumn: column {0} appears twice")]
    DuplicateColumn(u64),
    /// Stored record does not match the current schema or its checksum fails.
    #[error("VersionMismatch: {0}")]
    VersionMismatch(String),

    /// Malformed input (bad JSON, out-of-range vertex, ...).
    #[error("InvalidInput: {0}")]
    InvalidInput(String),
}

pub type Result<T> = std::result::Result<T, Error>;
