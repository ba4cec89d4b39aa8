use thiserror::Error;

/// Error type shared across the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("qubit count {0} outside supported range 1..={max}", max = crate::MAX_QUBITS)]
    QubitCount(u32),

    #[error("state length {0} is not a power of two >= 2")]
    BadLength(usize),

    #[error("shape mismatch: {left} vs {right}")]
    ShapeMismatch { left: usize, right: usize },

    #[error("parameter vector has {got} entries, layout expects {expected}")]
    LayoutMismatch { got: usize, expected: usize },

    #[error("invalid topology: {0}")]
    Topology(String),

    #[error("Walsh index {index} out of range for {n_qubits} qubits")]
    WalshIndex { index: usize, n_qubits: u32 },

    #[error("identity term r=0 has no gate realization (global phase only)")]
    IdentityTerm,

    #[error("validation failed: {0}")]
    Validation(String),

    #[error("training diverged at epoch {epoch}; last finite loss {last_loss:e}")]
    Divergence { epoch: usize, last_loss: f64 },

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
