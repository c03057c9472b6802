use thiserror::Error;

use crate::lp::LpError;
use crate::transport::WireError;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("malformed function description: {0}")]
    Parse(String),

    #[error("arity mismatch: expected {expected}, found {found}")]
    ArityMismatch { expected: usize, found: usize },

    #[error("truth table has {found} entries, expected {expected}")]
    TableLength { expected: usize, found: usize },

    #[error("arity {0} exceeds the supported maximum of {max}", max = crate::bits::MAX_ARITY)]
    ArityTooLarge(usize),

    #[error("value {0} is not +1 or -1")]
    NotSign(i64),

    #[error("non-finite value at index {0}")]
    NonFinite(usize),

    #[error("empty spectrum")]
    EmptySpectrum,

    #[error("linear program failed: {0}")]
    Lp(#[from] LpError),

    #[error("required sample count {0:.0} exceeds 2^31")]
    SampleOverflow(f64),

    #[error("character {alpha} lies outside the round-{round} encoding domain")]
    OutsideDomain { alpha: String, round: usize },

    #[error("codeword {codeword} out of range for round {round} ({size} codewords)")]
    CodewordOutOfRange {
        codeword: u64,
        round: usize,
        size: usize,
    },

    #[error("amplitude {amplitude:e} on non-codeword index {index}")]
    StrayAmplitude { index: usize, amplitude: f64 },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("invariant violated: {0}")]
    Invariant(String),

    #[error("oracle limit exceeded: {0}")]
    OracleLimit(String),

    #[error(transparent)]
    Wire(#[from] WireError),
}
