use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("empty-sequence: operation needs at least one symbol")]
    EmptySequence,
    #[error("invalid bit value {0} (expected 0 or 1)")]
    InvalidBit(u8),
    #[error("degenerate-state: the all-zero register state never leaves itself")]
    DegenerateState,
    #[error("invalid-state-sequence: {0}")]
    InvalidStateSequence(String),
    #[error("not-m-sequence: {0}")]
    NotMSequence(String),
    #[error("L-too-large: degree {degree} exceeds the ceiling {ceiling}")]
    DegreeTooLarge { degree: u32, ceiling: u32 },
    #[error("unsupported degree {0}")]
    UnsupportedDegree(u32),
    #[error("invalid polynomial near `{token}`: {reason}")]
    InvalidPolynomial { token: String, reason: String },
    #[error("invalid bit string near `{0}`: only 0 and 1 are allowed")]
    InvalidBitString(String),
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("incompatible input lengths: empirical N={empirical}, exact N={exact}")]
    IncompatibleLength { empirical: usize, exact: usize },
}
