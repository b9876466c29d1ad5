//! Error type shared across the crate.

use thiserror::Error;

/// Everything that can go wrong when building instances or running solvers.
///
/// Variants carry enough context to produce a useful one-line message; the
/// CLI maps them onto exit codes without inspecting the payloads.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A count vector with all components zero was supplied where a
    /// nonempty class mass is required.
    #[error("count vector at index {index} is all zeros")]
    ZeroVector { index: usize },

    /// An instance needs at least one vector.
    #[error("instance contains no vectors")]
    EmptyInstance,

    /// Count vectors (or points) in one instance must share a dimension.
    #[error("dimension mismatch at index {index}: expected {expected}, got {got}")]
    DimensionMismatch {
        index: usize,
        expected: usize,
        got: usize,
    },

    /// The number of groups must satisfy `1 <= k <= n`.
    #[error("invalid group count k={k} for n={n} items (need 1 <= k <= n)")]
    InvalidK { k: usize, n: usize },

    /// An assignment must label every item exactly once.
    #[error("assignment length {got} does not match instance size {expected}")]
    AssignmentLength { expected: usize, got: usize },

    /// Assignment labels live in `0..k`.
    #[error("group label {label} at position {index} is out of range for k={k}")]
    LabelOutOfRange {
        label: usize,
        index: usize,
        k: usize,
    },

    /// Same-norm checks require every vector to have the same l1 norm.
    #[error("mixed l1 norms: vector {index} has norm {found}, expected {expected}")]
    MixedNorms {
        index: usize,
        expected: u64,
        found: u64,
    },

    /// Exhaustive search refuses instances beyond its guard.
    #[error("{what} is limited to {max} items, got {n}")]
    TooLarge {
        what: &'static str,
        n: usize,
        max: usize,
    },

    /// The sampling solver only supports small group counts.
    #[error("sampling solver supports k <= {max}, got k={k}")]
    KTooLarge { k: usize, max: usize },

    /// The accuracy knob of the sampling solver must lie in (0, 1).
    #[error("epsilon must lie in (0, 1), got {0}")]
    InvalidEpsilon(f64),

    /// A solver configuration disagrees with the instance it is applied to.
    #[error("configured group count {config_k} does not match instance group count {instance_k}")]
    ConfigMismatch { config_k: usize, instance_k: usize },

    /// An approximation ratio was requested against an oracle that is not
    /// actually optimal (the candidate beat it).
    #[error("oracle objective {oracle} is worse than candidate objective {candidate}; ratios need an exact oracle")]
    OracleNotExact { oracle: f64, candidate: f64 },

    /// Hardness instances are only defined for triangle-free graphs.
    #[error("graph contains triangle {a}-{b}-{c} (vertices 0-indexed)")]
    TriangleFound { a: usize, b: usize, c: usize },

    /// Hardness instances need at least one edge.
    #[error("graph has no edges")]
    NoEdges,

    /// A structurally invalid graph (bad endpoint, self-loop, duplicate edge).
    #[error("invalid graph: {0}")]
    InvalidGraph(String),

    /// The textual edge-list format could not be parsed.
    #[error("edge list parse error: {0}")]
    EdgeList(String),
}

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;
