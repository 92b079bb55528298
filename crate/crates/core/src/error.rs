use thiserror::Error;

/// Errors shared by every module of the kernel.
#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum Error {
    /// Two series built over different alphabets or caps were combined.
    #[error("alphabet/cap mismatch: {0}")]
    AlphabetMismatch(String),

    /// Two Laurent polynomials with different variable counts were combined.
    #[error("variable-count mismatch: expected {expected}, got {got}")]
    VariableMismatch { expected: usize, got: usize },

    /// Inversion of a non-unit (zero constant term, or zero rational).
    #[error("not invertible: {0}")]
    NotInvertible(String),

    /// Infinite-product expansion with no finite bound under the grading.
    #[error("non-terminating expansion: {0}")]
    NonTerminating(String),

    /// Exact division left a nonzero remainder.
    #[error("not divisible: {0}")]
    NotDivisible(String),

    /// A q-Pochhammer order outside the supported range.
    #[error("unsupported: {0}")]
    Unsupported(String),

    /// Coincident (or forbidden zero) coordinates in a point-mode evaluation.
    #[error("degenerate point: {0}")]
    DegeneratePoint(String),

    /// A skew spin Hall-Littlewood denominator pairing is not a unit.
    #[error("degenerate norm: {0}")]
    DegenerateNorm(String),

    /// Symmetrization size guard tripped.
    #[error("too large: {0}")]
    TooLarge(String),

    /// Input to the dual operator has degree > 1 in some variable.
    #[error("not in V(m): {0}")]
    NotInVSpace(String),

    /// A basis-transition pivot failed to be a unit.
    #[error("singular transition matrix: {0}")]
    SingularTransition(String),

    /// Malformed user input (partitions, parameter files, flags).
    #[error("invalid input: {0}")]
    InvalidInput(String),
}

pub type Result<T> = std::result::Result<T, Error>;
