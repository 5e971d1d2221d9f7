use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("degenerate chain: {0}")]
    DegenerateChain(String),

    #[error("system is not regular (alpha = {alpha} >= 1)")]
    NotRegular { alpha: f64 },

    #[error("resolved gamma = {gamma} but 1/2 is required for Dirichlet chains")]
    GammaMismatch { gamma: f64 },

    #[error("no sign change in allowed zone {n}: [{lo}, {hi}]")]
    NoSignChange { n: u64, lo: f64, hi: f64 },

    #[error("root {root} for n = {n} escaped its allowed zone [{lo}, {hi}]")]
    RootOutsideZone { n: u64, root: f64, lo: f64, hi: f64 },

    #[error("no root found while scanning up to k = {limit}")]
    ScanExhausted { limit: f64 },

    #[error("orbit length {q_max} exceeds the enumeration cap {cap}; use the grouped path")]
    EnumerationCap { q_max: usize, cap: usize },

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error("invalid config: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
