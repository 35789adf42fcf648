use thiserror::Error;

/// Errors surfaced by instance construction, norm evaluation and the
/// covering/geometry kernels.
#[derive(Debug, Error)]
pub enum Error {
    /// Unknown ids, inconsistent references, nonpositive weights and the like.
    #[error("malformed input: {0}")]
    MalformedInput(String),

    /// A construction would produce an empty set or a zero-measure member.
    #[error("degenerate input: {0}")]
    Degenerate(String),

    /// Exact norm evaluation refused: family too large and not laminar.
    #[error("exact norm supports at most {cap} sets (got {size}); use the greedy lower bound or raise the cap")]
    NormCapacity { cap: usize, size: usize },

    /// A lemma hypothesis required by the operation does not hold.
    #[error("hypothesis violated: {0}")]
    Hypothesis(String),

    /// Scale/depth window too small for the requested construction.
    #[error("insufficient range: {0}")]
    Range(String),

    /// Rejection sampling ran out of attempts.
    #[error("sampling budget exhausted: {0}")]
    Sampling(String),

    #[error("json: {0}")]
    Json(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
