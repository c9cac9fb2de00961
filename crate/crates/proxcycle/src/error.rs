//! Error type shared across the crate.

use thiserror::Error;

/// Errors raised by construction, solving, verification, and I/O.
#[derive(Debug, Error)]
pub enum Error {
    /// Two objects that must agree in shape (block count or ambient
    /// dimension) do not.
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    /// A convex piece violates a structural invariant (zero direction,
    /// negative radius, crossed box bounds, ...).
    #[error("invalid piece: {0}")]
    InvalidPiece(String),

    /// A problem-level invariant is violated (empty piece list,
    /// inconsistent ambient dimensions, mode/kind mismatch, ...).
    #[error("invalid problem: {0}")]
    InvalidProblem(String),

    /// A solver configuration field is out of its admissible range.
    #[error("invalid solver configuration: {0}")]
    InvalidConfig(String),

    /// The scalar root solver inside a proximal oracle did not settle
    /// within its iteration cap.
    #[error("root solver did not converge: {0}")]
    RootSolver(String),

    /// The requested operation is not defined for this piece kind.
    #[error("operation not supported for piece kind `{0}`")]
    UnsupportedKind(&'static str),

    /// An exhaustive search was asked to evaluate more points than its
    /// budget allows.
    #[error("search budget exceeded: {0}")]
    BudgetExceeded(String),

    /// A problem file could not be read or parsed.
    #[error("cannot parse {path}: {detail}")]
    Parse { path: String, detail: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
