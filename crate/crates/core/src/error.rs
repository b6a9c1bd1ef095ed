use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("invalid dg algebra: {0}")]
    InvalidAlgebra(String),

    #[error("invalid bimodule: {0}")]
    InvalidModule(String),

    #[error("carrier mismatch: {0}")]
    CarrierMismatch(String),

    #[error("unknown generator index {0}")]
    UnknownGenerator(usize),

    #[error("not simply connected: {0}")]
    NotSimplyConnected(String),

    #[error("closedness check failed at word length {len}: {detail}")]
    NotClosed { len: usize, detail: String },

    #[error("truncation overflow: connection known to word length {have}, differential needs {need}")]
    TruncationOverflow { have: usize, need: usize },

    #[error("degenerate pairing: {0}")]
    DegeneratePairing(String),

    #[error("invalid morphism: {0}")]
    InvalidMorphism(String),

    #[error("parse error at {line}:{col}: {msg}")]
    Parse { line: usize, col: usize, msg: String },

    #[error("unknown preset: {0}")]
    UnknownPreset(String),

    #[error("outside window: {0}")]
    OutsideWindow(String),

    #[error("budget exceeded: {0}")]
    Budget(String),

    #[error("{0}")]
    Invalid(String),
}
