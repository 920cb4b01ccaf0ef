//! Crate-wide error type.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("matrix is rank deficient")]
    RankDeficient,

    #[error("row {0} is all zero; a measurement must combine at least one direction")]
    ZeroRow(usize),

    #[error("no ({n}, k) code with correction capability {e_n} found within the search budget")]
    NoCodeFound { n: usize, e_n: usize },

    #[error("unknown code key `{0}`")]
    UnknownCode(String),

    #[error("code corrects up to {e_n} errors but {l} clusters were requested")]
    CapabilityTooLow { e_n: usize, l: usize },

    #[error("enumeration size {needed} exceeds the configured cap {cap}")]
    CapExceeded { needed: u128, cap: u128 },

    #[error("distinct sparse channels map to the same syndrome; code capability is too low for this sparsity")]
    SyndromeCollision,

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
